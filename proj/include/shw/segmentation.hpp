#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "shw/comb.hpp"
#include "shw/stats.hpp"

namespace shw {

// Which sliding windows vote on an epoch. `inclusive` counts every window
// whose span [start, start+tau) contains the epoch (tau/stride windows in
// steady state); `interior` drops the window that starts on the epoch itself,
// reproducing a tau/stride - 1 count.
enum class Coverage { inclusive, interior };

struct FuseParams {
    int tau_s = 10;
    int stride_s = 1;
    int f0 = 50;
    Coverage coverage = Coverage::inclusive;

    void validate() const;
};

// Per-second fused output b(t) = {y, w, v}.
struct EpochRecord {
    std::int64_t epoch_index = 0;
    bool y = false;
    std::optional<double> w;  // IWF in Hz, present iff y
    double v = 0.0;           // per-second vm count
    int support_count = 0;    // covering windows that voted walking
    double score = 0.0;       // max score over all covering windows
};

struct Bout {
    std::int64_t start_epoch = 0;  // first positive window's start second
    std::int64_t n_windows = 0;
    double duration_s = 0.0;       // (n_windows - 1) * stride + tau
    double mean_iwf = 0.0;
    double mean_vm = 0.0;
};

// Orders epoch emission against an increasing stream of window decisions.
// An epoch is final once a window starting after it has been seen (or the
// stream ends), so memory stays bounded by tau/stride pending windows.
class EpochFuser {
public:
    explicit EpochFuser(const FuseParams& params);

    void push_vm(double v);
    void push_decision(const WindowDecision& d);
    // Epochs finalized since the last call, in order.
    std::vector<EpochRecord> drain();
    // Flushes everything up to the final epoch count (= number of vm values pushed).
    std::vector<EpochRecord> finish();

private:
    EpochRecord fuse_one(std::int64_t epoch) const;
    void finalize_ready(std::vector<EpochRecord>& out, std::int64_t limit);

    FuseParams params_;
    std::deque<WindowDecision> pending_;
    std::deque<double> vm_;
    std::int64_t vm_base_ = 0;    // epoch index of vm_.front()
    std::int64_t next_epoch_ = 0;
    std::int64_t last_start_s_ = -1;
    std::vector<EpochRecord> ready_;
};

// Groups maximal runs of consecutive walking-positive windows into bouts and
// assigns every walking epoch to the earliest bout whose span covers it.
class BoutAssembler {
public:
    explicit BoutAssembler(const FuseParams& params);

    void push_decision(const WindowDecision& d);
    void push_epoch(const EpochRecord& e);
    std::vector<Bout> drain();
    std::vector<Bout> finish();

private:
    struct Run {
        std::int64_t start_s = 0;
        std::int64_t last_start_s = 0;
        std::int64_t n_windows = 0;
        bool open = true;
        double sum_w = 0.0;
        double sum_v = 0.0;
        std::int64_t n_assigned = 0;
    };

    std::int64_t span_end(const Run& r) const { return r.last_start_s + params_.tau_s; }
    void close_front(std::vector<Bout>& out);

    FuseParams params_;
    std::deque<Run> runs_;
    std::int64_t epochs_seen_ = 0;
    std::vector<Bout> ready_;
};

// Materialized forms of the two streaming folds above.
std::vector<EpochRecord> fuse_epochs(std::span<const WindowDecision> decisions,
                                     std::span<const double> vm, const FuseParams& params);
std::vector<Bout> extract_bouts(std::span<const WindowDecision> decisions,
                                std::span<const EpochRecord> epochs, const FuseParams& params);

// Per-day bout counts and total walking seconds by duration band. Band i
// covers (edges[i-1], edges[i]] with a leading [0, edges[0]] band and a
// trailing (edges.back(), inf) band; edges are closed on the right.
struct DayBandSummary {
    std::int64_t day = 0;
    std::vector<std::int64_t> counts;
    std::vector<double> seconds;
};

inline const std::vector<double>& default_bout_bands() {
    static const std::vector<double> edges{10.0, 30.0, 60.0};
    return edges;
}

std::vector<DayBandSummary> summarize_bouts(std::span<const Bout> bouts,
                                            std::span<const double> band_edges);

// Minutes of walking per (day, hour-of-recording); each entry lies in [0, 60].
std::vector<std::array<double, 24>> hourly_walking_matrix(std::span<const EpochRecord> epochs);

// Five-number summary of the IWF over walking epochs.
stats::FiveNumber iwf_distribution(std::span<const EpochRecord> epochs);

}  // namespace shw
