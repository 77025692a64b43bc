#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "shw/evaluation.hpp"
#include "shw/signal.hpp"

namespace shw {

enum class SegmentKind { rest, position_change, compound, harmonic_walk };

// Instantaneous orthonormal re-orientation of the device: from this time on
// the clean signal is rotated so gravity points along new_gravity.
struct RotationEvent {
    double time_s = 0.0;
    std::array<double, 3> new_gravity = {0.0, 0.0, 1.0};
};

struct SegmentSpec {
    SegmentKind kind = SegmentKind::rest;
    double duration_s = 10.0;
    double noise_sd = 0.0;                         // white Gaussian, per axis, in g
    std::array<double, 3> gravity = {0.0, 0.0, 1.0};

    // harmonic_walk: sinusoids at l * fundamental/2 for l = 2, 3, ... with the
    // given amplitudes, oscillating along a fixed direction orthogonal to gravity.
    double fundamental_hz = 2.0;
    std::vector<double> amplitudes = {0.3, 0.15, 0.05};
    std::vector<double> phases;                    // padded with zeros
    double drift_hz_per_s = 0.0;                   // fundamental drifts s + drift * t

    std::vector<RotationEvent> rotations;
};

struct GeneratedSignal {
    TriaxialSignal signal;
    LabelTrack labels;
};

// Deterministic per (specs, f0, seed); each segment draws from its own
// seed-derived substream.
GeneratedSignal generate(std::span<const SegmentSpec> specs, int f0, std::uint64_t seed);

// Chunked variant that never materializes the whole signal.
void generate_stream(std::span<const SegmentSpec> specs, int f0, std::uint64_t seed,
                     const std::function<void(std::span<const Sample>)>& sink);

LabelTrack schedule_labels(std::span<const SegmentSpec> specs);
std::int64_t schedule_samples(std::span<const SegmentSpec> specs, int f0);

struct CorpusSpec {
    int n_subjects = 1;
    double duration_s = 7200.0;
    int f0 = 50;
    double w_rest = 0.40;
    double w_position = 0.10;
    double w_compound = 0.25;
    double w_walk = 0.25;
    double walk_fmin_hz = 1.4;
    double walk_fmax_hz = 2.5;
    double noise_sd = 0.05;
    double max_drift_hz_per_s = 0.002;
    std::int64_t start_unix = 0;
};

struct SubjectTruth {
    std::string subject_id;
    std::uint64_t seed = 0;
    std::string signal_file;
    std::string label_file;
    double walking_seconds = 0.0;
    std::vector<double> bout_lengths_s;  // contiguous walking spans, merged
    std::vector<double> iwf_hz;          // planted fundamentals, one per walk segment
};

struct CorpusManifest {
    std::uint64_t seed = 0;
    int f0 = 50;
    std::vector<SubjectTruth> subjects;
};

// Random segment schedule drawn from the corpus mixture weights.
std::vector<SegmentSpec> random_schedule(const CorpusSpec& spec, std::uint64_t seed);

// Streams one subject's recording + labels to disk; returns its truth record.
SubjectTruth write_subject(const std::filesystem::path& out_dir, const std::string& subject_id,
                           std::span<const SegmentSpec> schedule, int f0, std::uint64_t seed,
                           std::int64_t start_unix);

// Full corpus on disk with a manifest.json of per-file seeds and truth stats.
CorpusManifest make_corpus(const CorpusSpec& spec, std::uint64_t seed,
                           const std::filesystem::path& out_dir);

}  // namespace shw
