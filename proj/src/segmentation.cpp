#include "shw/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shw {

void FuseParams::validate() const {
    if (tau_s < 1) throw config_error("tau must be at least 1 second");
    if (stride_s < 1) throw config_error("stride must be at least 1 second");
    if (stride_s > tau_s) throw config_error("stride must not exceed tau");
    if (f0 <= 0) throw config_error("sampling frequency must be a positive integer");
}

EpochFuser::EpochFuser(const FuseParams& params) : params_(params) { params_.validate(); }

void EpochFuser::push_vm(double v) { vm_.push_back(v); }

void EpochFuser::push_decision(const WindowDecision& d) {
    const std::int64_t stride_samples =
        static_cast<std::int64_t>(params_.stride_s) * params_.f0;
    if (d.window_start < 0 || d.window_start % stride_samples != 0) {
        throw alignment_error("window start is not a stride multiple");
    }
    const std::int64_t start_s = d.window_start / params_.f0;
    if (start_s <= last_start_s_) {
        throw alignment_error("window decisions must arrive in increasing start order");
    }
    // No later window can cover epochs before this start.
    finalize_ready(ready_, start_s);
    pending_.push_back(d);
    last_start_s_ = start_s;
}

EpochRecord EpochFuser::fuse_one(std::int64_t epoch) const {
    EpochRecord r;
    r.epoch_index = epoch;
    r.v = vm_[static_cast<std::size_t>(epoch - vm_base_)];
    double best_w_score = -1.0;
    for (const auto& d : pending_) {
        const std::int64_t start_s = d.window_start / params_.f0;
        if (start_s + params_.tau_s <= epoch) continue;
        const std::int64_t hi = params_.coverage == Coverage::inclusive ? epoch : epoch - 1;
        if (start_s > hi) break;
        r.score = std::max(r.score, d.max_score);
        if (d.is_walking) {
            ++r.support_count;
            if (d.max_score > best_w_score) {
                best_w_score = d.max_score;
                r.w = d.s_hat_hz;
            }
        }
    }
    r.y = r.support_count > 0;
    if (!r.y) r.w.reset();
    return r;
}

void EpochFuser::finalize_ready(std::vector<EpochRecord>& out, std::int64_t limit) {
    const std::int64_t vm_end = vm_base_ + static_cast<std::int64_t>(vm_.size());
    limit = std::min(limit, vm_end);
    while (next_epoch_ < limit) {
        out.push_back(fuse_one(next_epoch_));
        ++next_epoch_;
        while (!vm_.empty() && vm_base_ < next_epoch_) {
            vm_.pop_front();
            ++vm_base_;
        }
        while (!pending_.empty() &&
               pending_.front().window_start / params_.f0 + params_.tau_s <= next_epoch_) {
            pending_.pop_front();
        }
    }
}

std::vector<EpochRecord> EpochFuser::drain() {
    std::vector<EpochRecord> out;
    out.swap(ready_);
    return out;
}

std::vector<EpochRecord> EpochFuser::finish() {
    const std::int64_t total = vm_base_ + static_cast<std::int64_t>(vm_.size());
    if (last_start_s_ >= 0 && last_start_s_ + params_.tau_s > total) {
        throw alignment_error("decision stream extends past the epoch series");
    }
    std::vector<EpochRecord> out;
    out.swap(ready_);
    finalize_ready(out, total);
    return out;
}

BoutAssembler::BoutAssembler(const FuseParams& params) : params_(params) { params_.validate(); }

void BoutAssembler::push_decision(const WindowDecision& d) {
    const std::int64_t start_s = d.window_start / params_.f0;
    if (!runs_.empty() && runs_.back().open) {
        auto& back = runs_.back();
        if (d.is_walking && start_s == back.last_start_s + params_.stride_s) {
            back.last_start_s = start_s;
            ++back.n_windows;
            return;
        }
        if (start_s > back.last_start_s) back.open = false;
    }
    if (d.is_walking) {
        Run run;
        run.start_s = start_s;
        run.last_start_s = start_s;
        run.n_windows = 1;
        runs_.push_back(run);
    }
}

void BoutAssembler::push_epoch(const EpochRecord& e) {
    epochs_seen_ = e.epoch_index + 1;
    if (e.y) {
        bool assigned = false;
        for (auto& run : runs_) {
            if (run.start_s <= e.epoch_index && e.epoch_index < span_end(run)) {
                run.sum_w += e.w.value_or(0.0);
                run.sum_v += e.v;
                ++run.n_assigned;
                assigned = true;
                break;
            }
        }
        if (!assigned) throw alignment_error("walking epoch outside every bout span");
    }
    close_front(ready_);
}

void BoutAssembler::close_front(std::vector<Bout>& out) {
    while (!runs_.empty() && !runs_.front().open && epochs_seen_ >= span_end(runs_.front())) {
        const Run& r = runs_.front();
        Bout b;
        b.start_epoch = r.start_s;
        b.n_windows = r.n_windows;
        b.duration_s = static_cast<double>((r.n_windows - 1) * params_.stride_s + params_.tau_s);
        b.mean_iwf = r.n_assigned > 0 ? r.sum_w / static_cast<double>(r.n_assigned) : 0.0;
        b.mean_vm = r.n_assigned > 0 ? r.sum_v / static_cast<double>(r.n_assigned) : 0.0;
        out.push_back(b);
        runs_.pop_front();
    }
}

std::vector<Bout> BoutAssembler::drain() {
    std::vector<Bout> out;
    out.swap(ready_);
    return out;
}

std::vector<Bout> BoutAssembler::finish() {
    std::vector<Bout> out;
    out.swap(ready_);
    for (auto& run : runs_) run.open = false;
    epochs_seen_ = std::numeric_limits<std::int64_t>::max();
    close_front(out);
    return out;
}

std::vector<EpochRecord> fuse_epochs(std::span<const WindowDecision> decisions,
                                     std::span<const double> vm, const FuseParams& params) {
    EpochFuser fuser(params);
    for (double v : vm) fuser.push_vm(v);
    std::vector<EpochRecord> out;
    for (const auto& d : decisions) {
        fuser.push_decision(d);
        auto ready = fuser.drain();
        out.insert(out.end(), ready.begin(), ready.end());
    }
    auto tail = fuser.finish();
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

std::vector<Bout> extract_bouts(std::span<const WindowDecision> decisions,
                                std::span<const EpochRecord> epochs, const FuseParams& params) {
    BoutAssembler assembler(params);
    for (const auto& d : decisions) assembler.push_decision(d);
    std::vector<Bout> out;
    for (const auto& e : epochs) {
        assembler.push_epoch(e);
        auto ready = assembler.drain();
        out.insert(out.end(), ready.begin(), ready.end());
    }
    auto tail = assembler.finish();
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

std::vector<DayBandSummary> summarize_bouts(std::span<const Bout> bouts,
                                            std::span<const double> band_edges) {
    const std::size_t n_bands = band_edges.size() + 1;
    std::vector<DayBandSummary> days;
    if (bouts.empty()) return days;
    std::int64_t max_day = 0;
    for (const auto& b : bouts) max_day = std::max(max_day, b.start_epoch / 86400);
    days.resize(static_cast<std::size_t>(max_day + 1));
    for (std::int64_t d = 0; d <= max_day; ++d) {
        days[static_cast<std::size_t>(d)].day = d;
        days[static_cast<std::size_t>(d)].counts.assign(n_bands, 0);
        days[static_cast<std::size_t>(d)].seconds.assign(n_bands, 0.0);
    }
    for (const auto& b : bouts) {
        std::size_t band = band_edges.size();
        for (std::size_t i = 0; i < band_edges.size(); ++i) {
            if (b.duration_s <= band_edges[i]) {
                band = i;
                break;
            }
        }
        auto& day = days[static_cast<std::size_t>(b.start_epoch / 86400)];
        ++day.counts[band];
        day.seconds[band] += b.duration_s;
    }
    return days;
}

std::vector<std::array<double, 24>> hourly_walking_matrix(std::span<const EpochRecord> epochs) {
    std::vector<std::array<double, 24>> matrix;
    if (epochs.empty()) return matrix;
    const std::int64_t max_day = epochs.back().epoch_index / 86400;
    std::vector<std::array<std::int64_t, 24>> counts(static_cast<std::size_t>(max_day + 1));
    for (auto& row : counts) row.fill(0);
    for (const auto& e : epochs) {
        if (!e.y) continue;
        const std::int64_t day = e.epoch_index / 86400;
        const std::int64_t hour = (e.epoch_index % 86400) / 3600;
        ++counts[static_cast<std::size_t>(day)][static_cast<std::size_t>(hour)];
    }
    matrix.resize(counts.size());
    for (std::size_t d = 0; d < counts.size(); ++d) {
        for (std::size_t h = 0; h < 24; ++h) {
            matrix[d][h] = static_cast<double>(counts[d][h]) / 60.0;
        }
    }
    return matrix;
}

stats::FiveNumber iwf_distribution(std::span<const EpochRecord> epochs) {
    std::vector<double> w;
    for (const auto& e : epochs) {
        if (e.y && e.w) w.push_back(*e.w);
    }
    return stats::five_number(std::move(w));
}

}  // namespace shw
