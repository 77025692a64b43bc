#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "shw/comb.hpp"
#include "shw/io.hpp"
#include "shw/segmentation.hpp"
#include "shw/signal.hpp"
#include "shw/spectral.hpp"

namespace shw {

struct DetectConfig {
    WindowConfig window;
    DetectionParams params;
    Coverage coverage = Coverage::inclusive;
    int threads = 1;
    std::size_t chunk_samples = 1 << 20;
    std::vector<double> band_edges = default_bout_bands();

    void validate(int f0) const;
    FuseParams fuse_params(int f0) const;
};

struct DetectSinks {
    std::function<void(const WindowDecision&)> decision;
    std::function<void(const EpochRecord&)> epoch;
    std::function<void(const Bout&)> bout;
};

// Push-based detector: feed raw samples in arbitrary chunk sizes, receive
// decisions, fused epochs, and bouts in order. Output is byte-for-byte
// independent of chunking and thread count; resident memory is bounded by the
// scoring batch plus tau seconds of signal.
class StreamingDetector {
public:
    StreamingDetector(const DetectConfig& config, int f0, DetectSinks sinks);
    ~StreamingDetector();
    StreamingDetector(const StreamingDetector&) = delete;
    StreamingDetector& operator=(const StreamingDetector&) = delete;

    void push(std::span<const Sample> samples);
    void finish();

    std::int64_t total_samples() const;
    std::int64_t n_epochs() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct DetectResult {
    std::vector<WindowDecision> decisions;
    std::vector<EpochRecord> epochs;
    std::vector<Bout> bouts;
};

// In-memory run over a materialized signal.
DetectResult detect_signal(const TriaxialSignal& signal, const DetectConfig& config);

SummaryData build_summary(std::span<const EpochRecord> epochs, std::span<const Bout> bouts,
                          std::span<const double> band_edges, std::int64_t n_epochs);

struct DetectFileReport {
    std::int64_t n_epochs = 0;
    std::int64_t n_decisions = 0;
    SummaryData summary;
};

// Streams a recording through the detector and writes epochs.csv, bouts.csv,
// iwf_samples.csv, hourly_matrix.csv, bout_bands.csv, and summary.json.
DetectFileReport detect_to_files(SignalReader& reader, const DetectConfig& config,
                                 const std::filesystem::path& out_dir);

}  // namespace shw
