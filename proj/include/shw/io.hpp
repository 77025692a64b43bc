#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shw/errors.hpp"
#include "shw/evaluation.hpp"
#include "shw/segmentation.hpp"
#include "shw/signal.hpp"
#include "shw/stats.hpp"

namespace shw {

enum class SignalFormat { auto_detect, binary, csv };

struct RecordingHeader {
    std::uint16_t version = 1;
    std::uint32_t f0 = 50;
    std::uint64_t n_samples = 0;  // 0 while unknown (CSV input)
    std::int64_t start_unix = 0;
    std::string subject_id;
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Writes to <path>.tmp and renames into place on commit; anything not
// committed is removed, so outputs are complete or absent.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path path);
    ~AtomicFile();
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    std::ofstream& stream() { return out_; }
    void commit();

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

// Chunked pull reader; never materializes the full recording.
class SignalReader {
public:
    virtual ~SignalReader() = default;
    virtual const RecordingHeader& header() const = 0;
    // Appends up to max_samples readings to out; returns the number appended,
    // 0 at end of stream.
    virtual std::size_t read_chunk(std::vector<Sample>& out, std::size_t max_samples) = 0;
};

std::unique_ptr<SignalReader> open_signal(const std::filesystem::path& path,
                                          SignalFormat format = SignalFormat::auto_detect,
                                          int f0_hint = 0);

// Whole-file convenience loader for small recordings and tests.
TriaxialSignal read_signal(const std::filesystem::path& path,
                           SignalFormat format = SignalFormat::auto_detect, int f0_hint = 0);

// Streaming writer for the binary recording format. The header's n_samples is
// fixed up front; finish() verifies the payload matched it.
class BinarySignalWriter {
public:
    BinarySignalWriter(const std::filesystem::path& path, const RecordingHeader& header);
    void append(std::span<const Sample> samples);
    void finish();

private:
    AtomicFile file_;
    std::uint64_t expected_;
    std::uint64_t written_ = 0;
    std::vector<char> buffer_;
};

void write_signal_binary(const std::filesystem::path& path, const TriaxialSignal& signal,
                         const RecordingHeader& header);
void write_signal_csv(const std::filesystem::path& path, const TriaxialSignal& signal);

LabelTrack read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelTrack& track);

// epochs.csv: `epoch,y,w,v` with w empty on non-walking seconds.
class EpochCsvWriter {
public:
    explicit EpochCsvWriter(const std::filesystem::path& path);
    void write(const EpochRecord& record);
    void finish();

private:
    AtomicFile file_;
};

void write_epochs_csv(const std::filesystem::path& path, std::span<const EpochRecord> records);
std::vector<EpochRecord> read_epochs_csv(const std::filesystem::path& path);

void write_bouts_csv(const std::filesystem::path& path, std::span<const Bout> bouts);
std::vector<Bout> read_bouts_csv(const std::filesystem::path& path);

struct DaySummary {
    std::int64_t day = 0;
    std::int64_t walking_seconds = 0;
    std::int64_t n_bouts = 0;
    double bout_seconds = 0.0;
    std::vector<std::int64_t> band_counts;
    std::vector<double> band_seconds;
};

struct SummaryData {
    std::int64_t n_epochs = 0;
    std::int64_t walking_epochs = 0;
    std::int64_t n_bouts = 0;
    double total_bout_seconds = 0.0;
    std::vector<double> band_edges;
    std::vector<DaySummary> per_day;
    stats::FiveNumber iwf;
};

void write_summary_json(const std::filesystem::path& path, const SummaryData& summary);
void write_hourly_csv(const std::filesystem::path& path,
                      std::span<const std::array<double, 24>> matrix);
void write_bands_csv(const std::filesystem::path& path, const SummaryData& summary);

// iwf_samples.csv: `epoch,w` for every walking second.
class IwfCsvWriter {
public:
    explicit IwfCsvWriter(const std::filesystem::path& path);
    void write(const EpochRecord& record);
    void finish();

private:
    AtomicFile file_;
};

void write_roc_csv(const std::filesystem::path& path, std::span<const RocPoint> points);
void write_roc_json(const std::filesystem::path& path, double auc, std::int64_t n_seconds,
                    std::int64_t n_walking);

// Tuning tables (`subject_id,n_m,delta` / `subject_id,n_m,cv`).
struct DeltaRow {
    std::string subject_id;
    int n_m = 0;
    double delta = 0.0;
};
struct CvRow {
    std::string subject_id;
    int n_m = 0;
    std::optional<double> cv;
};
void write_delta_csv(const std::filesystem::path& path, std::span<const DeltaRow> rows);
void write_cv_csv(const std::filesystem::path& path, std::span<const CvRow> rows);

// Input listing for tuning/evaluation runs: `subject_id,signal_path,label_path`.
struct SubjectFiles {
    std::string subject_id;
    std::filesystem::path signal_path;
    std::filesystem::path label_path;
};
std::vector<SubjectFiles> read_subject_manifest(const std::filesystem::path& path);

}  // namespace shw
