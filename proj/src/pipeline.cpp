#include "shw/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "shw/parallel.hpp"

namespace fs = std::filesystem;

namespace shw {

void DetectConfig::validate(int f0) const {
    if (f0 <= 0) throw config_error("sampling frequency must be a positive integer");
    window.validate();
    params.validate(static_cast<double>(f0) / 2.0);
    if (threads < 1) throw config_error("thread count must be at least 1");
    if (chunk_samples < 1) throw config_error("chunk size must be at least 1 sample");
}

FuseParams DetectConfig::fuse_params(int f0) const {
    return FuseParams{window.tau_s, window.stride_s, f0, coverage};
}

struct StreamingDetector::Impl {
    DetectConfig cfg;
    int f0;
    std::int64_t tau_samples;
    std::int64_t stride_samples;
    CombBank bank;
    std::vector<std::unique_ptr<SpectrumEngine>> engines;
    EpochFuser fuser;
    BoutAssembler bouts;
    DetectSinks sinks;

    std::vector<Sample> buf;
    std::int64_t base = 0;          // absolute index of buf[0]
    std::int64_t next_window = 0;   // absolute sample index of the next window
    std::int64_t next_epoch = 0;    // next epoch without a vm count yet
    std::int64_t total = 0;
    bool finished = false;

    struct Task {
        std::int64_t start = 0;
        std::array<std::vector<double>, 3> axes;
    };
    std::vector<Task> batch;
    std::vector<WindowDecision> batch_out;
    std::size_t batch_capacity;

    Impl(const DetectConfig& config, int sample_rate, DetectSinks s)
        : cfg(config),
          f0(sample_rate),
          tau_samples(config.window.window_samples(sample_rate)),
          stride_samples(config.window.stride_samples(sample_rate)),
          bank(make_comb_bank(config.params, make_grid(config.window, sample_rate))),
          fuser(config.fuse_params(sample_rate)),
          bouts(config.fuse_params(sample_rate)),
          sinks(std::move(s)) {
        cfg.validate(sample_rate);
        const int threads = std::max(1, cfg.threads);
        engines.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            engines.push_back(std::make_unique<SpectrumEngine>(cfg.window, f0));
        }
        batch_capacity = std::max<std::size_t>(64, static_cast<std::size_t>(threads) * 16);
        batch.reserve(batch_capacity);
    }

    void emit_epoch(const EpochRecord& record) {
        if (sinks.epoch) sinks.epoch(record);
        bouts.push_epoch(record);
        for (const auto& b : bouts.drain()) {
            if (sinks.bout) sinks.bout(b);
        }
    }

    void run_batch() {
        if (batch.empty()) return;
        batch_out.resize(batch.size());
        parallel::for_each_ordered(
            batch.size(), cfg.threads, [&](std::size_t thread, std::size_t i) {
                TriSpectra tri;
                tri.window_start = batch[i].start;
                for (int axis = 0; axis < 3; ++axis) {
                    tri.axes[static_cast<std::size_t>(axis)] = engines[thread]->compute(
                        batch[i].axes[static_cast<std::size_t>(axis)], tri.window_start);
                }
                batch_out[i] = decide_window(tri, bank);
            });
        for (const auto& d : batch_out) {
            if (sinks.decision) sinks.decision(d);
            bouts.push_decision(d);
            fuser.push_decision(d);
            for (const auto& e : fuser.drain()) emit_epoch(e);
        }
        batch.clear();
    }

    void process_buffer(bool flush) {
        const std::int64_t end = base + static_cast<std::int64_t>(buf.size());

        while ((next_epoch + 1) * f0 <= end) {
            const auto offset = static_cast<std::size_t>(next_epoch * f0 - base);
            double acc = 0.0;
            for (int i = 0; i < f0; ++i) {
                const Sample& s = buf[offset + static_cast<std::size_t>(i)];
                const double vm = std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z);
                acc += std::abs(vm - 1.0);
            }
            fuser.push_vm(acc / f0);
            ++next_epoch;
        }

        while (next_window + tau_samples <= end) {
            Task task;
            task.start = next_window;
            const auto offset = static_cast<std::size_t>(next_window - base);
            for (int axis = 0; axis < 3; ++axis) {
                auto& dst = task.axes[static_cast<std::size_t>(axis)];
                dst.resize(static_cast<std::size_t>(tau_samples));
                for (std::int64_t u = 0; u < tau_samples; ++u) {
                    const Sample& s = buf[offset + static_cast<std::size_t>(u)];
                    dst[static_cast<std::size_t>(u)] = axis == 0 ? s.x : axis == 1 ? s.y : s.z;
                }
            }
            batch.push_back(std::move(task));
            next_window += stride_samples;
            if (batch.size() >= batch_capacity) run_batch();
        }
        if (flush) run_batch();

        const std::int64_t keep_from = std::min(next_window, next_epoch * static_cast<std::int64_t>(f0));
        if (keep_from > base) {
            buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(keep_from - base));
            base = keep_from;
        }
    }
};

StreamingDetector::StreamingDetector(const DetectConfig& config, int f0, DetectSinks sinks)
    : impl_(std::make_unique<Impl>(config, f0, std::move(sinks))) {}

StreamingDetector::~StreamingDetector() = default;

void StreamingDetector::push(std::span<const Sample> samples) {
    if (impl_->finished) throw config_error("detector already finished");
    for (const auto& s : samples) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z)) {
            throw invalid_sample_error("non-finite acceleration sample");
        }
    }
    impl_->buf.insert(impl_->buf.end(), samples.begin(), samples.end());
    impl_->total += static_cast<std::int64_t>(samples.size());
    impl_->process_buffer(false);
}

void StreamingDetector::finish() {
    if (impl_->finished) return;
    impl_->finished = true;
    impl_->process_buffer(true);
    for (const auto& e : impl_->fuser.finish()) impl_->emit_epoch(e);
    for (const auto& b : impl_->bouts.finish()) {
        if (impl_->sinks.bout) impl_->sinks.bout(b);
    }
}

std::int64_t StreamingDetector::total_samples() const { return impl_->total; }

std::int64_t StreamingDetector::n_epochs() const { return impl_->total / impl_->f0; }

DetectResult detect_signal(const TriaxialSignal& signal, const DetectConfig& config) {
    DetectResult result;
    DetectSinks sinks;
    sinks.decision = [&](const WindowDecision& d) { result.decisions.push_back(d); };
    sinks.epoch = [&](const EpochRecord& e) { result.epochs.push_back(e); };
    sinks.bout = [&](const Bout& b) { result.bouts.push_back(b); };
    StreamingDetector detector(config, signal.f0, std::move(sinks));
    detector.push(signal.samples);
    detector.finish();
    return result;
}

SummaryData build_summary(std::span<const EpochRecord> epochs, std::span<const Bout> bouts,
                          std::span<const double> band_edges, std::int64_t n_epochs) {
    SummaryData summary;
    summary.n_epochs = n_epochs;
    summary.band_edges.assign(band_edges.begin(), band_edges.end());

    const std::int64_t n_days = n_epochs > 0 ? (n_epochs - 1) / 86400 + 1 : 0;
    summary.per_day.resize(static_cast<std::size_t>(n_days));
    for (std::int64_t d = 0; d < n_days; ++d) {
        auto& day = summary.per_day[static_cast<std::size_t>(d)];
        day.day = d;
        day.band_counts.assign(band_edges.size() + 1, 0);
        day.band_seconds.assign(band_edges.size() + 1, 0.0);
    }

    for (const auto& e : epochs) {
        if (!e.y) continue;
        ++summary.walking_epochs;
        const auto day = static_cast<std::size_t>(e.epoch_index / 86400);
        if (day < summary.per_day.size()) ++summary.per_day[day].walking_seconds;
    }

    const auto day_bands = summarize_bouts(bouts, band_edges);
    for (const auto& db : day_bands) {
        if (static_cast<std::size_t>(db.day) >= summary.per_day.size()) continue;
        auto& day = summary.per_day[static_cast<std::size_t>(db.day)];
        day.band_counts = db.counts;
        day.band_seconds = db.seconds;
        for (std::size_t band = 0; band < db.counts.size(); ++band) {
            day.n_bouts += db.counts[band];
            day.bout_seconds += db.seconds[band];
        }
    }
    for (const auto& b : bouts) {
        ++summary.n_bouts;
        summary.total_bout_seconds += b.duration_s;
    }
    summary.iwf = iwf_distribution(epochs);
    return summary;
}

DetectFileReport detect_to_files(SignalReader& reader, const DetectConfig& config,
                                 const fs::path& out_dir) {
    const int f0 = static_cast<int>(reader.header().f0);
    config.validate(f0);
    fs::create_directories(out_dir);

    EpochCsvWriter epoch_writer(out_dir / "epochs.csv");
    IwfCsvWriter iwf_writer(out_dir / "iwf_samples.csv");
    std::vector<EpochRecord> epochs;
    std::vector<Bout> bouts;

    DetectFileReport report;
    DetectSinks sinks;
    sinks.decision = [&](const WindowDecision&) { ++report.n_decisions; };
    sinks.epoch = [&](const EpochRecord& e) {
        epoch_writer.write(e);
        iwf_writer.write(e);
        epochs.push_back(e);
    };
    sinks.bout = [&](const Bout& b) { bouts.push_back(b); };

    StreamingDetector detector(config, f0, std::move(sinks));
    std::vector<Sample> chunk;
    chunk.reserve(config.chunk_samples);
    while (reader.read_chunk(chunk, config.chunk_samples) > 0) {
        detector.push(chunk);
        chunk.clear();
    }
    detector.finish();

    report.n_epochs = detector.n_epochs();
    report.summary = build_summary(epochs, bouts, config.band_edges, report.n_epochs);

    epoch_writer.finish();
    iwf_writer.finish();
    write_bouts_csv(out_dir / "bouts.csv", bouts);
    write_hourly_csv(out_dir / "hourly_matrix.csv", hourly_walking_matrix(epochs));
    write_bands_csv(out_dir / "bout_bands.csv", report.summary);
    write_summary_json(out_dir / "summary.json", report.summary);
    return report;
}

}  // namespace shw
