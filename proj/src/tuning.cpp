#include "shw/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shw/stats.hpp"

namespace shw {

LabeledScoreSet split_scores(std::span<const EpochRecord> epochs, const LabelTrack& labels,
                             std::string subject_id) {
    const std::int64_t n = epochs.empty() ? 0 : epochs.back().epoch_index + 1;
    const auto truth = labels.walking_epochs(n);
    LabeledScoreSet set;
    set.subject_id = std::move(subject_id);
    for (const auto& e : epochs) {
        if (truth[static_cast<std::size_t>(e.epoch_index)]) {
            set.walking.push_back(e.score);
        } else {
            set.nonwalking.push_back(e.score);
        }
    }
    return set;
}

double silverman_bandwidth(std::span<const double> data) {
    if (data.size() < 2) return 0.0;
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = stats::sample_sd(data);
    const double iqr = stats::quantile_sorted(sorted, 0.75) - stats::quantile_sorted(sorted, 0.25);
    double sigma = std::min(sd, iqr / 1.34);
    if (sigma <= 0) sigma = std::max(sd, iqr / 1.34);
    if (sigma <= 0) return 0.0;
    return 0.9 * sigma * std::pow(static_cast<double>(data.size()), -0.2);
}

std::vector<double> gaussian_kde(std::span<const double> data, std::span<const double> grid,
                                 double bandwidth) {
    if (data.empty()) throw insufficient_data_error("KDE needs at least one observation");
    if (bandwidth <= 0) throw config_error("KDE bandwidth must be positive");
    const double inv_h = 1.0 / bandwidth;
    const double norm = inv_h / (static_cast<double>(data.size()) * std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> density(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        for (double x : data) {
            const double z = (grid[i] - x) * inv_h;
            acc += std::exp(-0.5 * z * z);
        }
        density[i] = acc * norm;
    }
    return density;
}

namespace {

// Balanced misclassification rate of the rule score > delta.
double balanced_error(const LabeledScoreSet& scores, double delta) {
    std::int64_t fn = 0;
    for (double s : scores.walking) fn += s <= delta ? 1 : 0;
    std::int64_t fp = 0;
    for (double s : scores.nonwalking) fp += s > delta ? 1 : 0;
    return 0.5 * static_cast<double>(fn) / static_cast<double>(scores.walking.size()) +
           0.5 * static_cast<double>(fp) / static_cast<double>(scores.nonwalking.size());
}

}  // namespace

DeltaEstimate estimate_delta_subject(const LabeledScoreSet& scores, const KdeConfig& config) {
    const auto min_n = static_cast<std::size_t>(config.min_scores_per_class);
    if (scores.walking.size() < min_n || scores.nonwalking.size() < min_n) {
        throw insufficient_data_error("need at least " + std::to_string(config.min_scores_per_class) +
                                      " scores per class");
    }
    if (config.grid_points < 16) throw config_error("KDE grid is too coarse");

    double lo = scores.walking[0];
    double hi = scores.walking[0];
    for (double s : scores.walking) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    for (double s : scores.nonwalking) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const double med_w = stats::median(scores.walking);
    const double med_nw = stats::median(scores.nonwalking);
    if (!(hi > lo)) return {0.5 * (med_w + med_nw), true};

    const auto n_grid = static_cast<std::size_t>(config.grid_points);
    const double dx = (hi - lo) / static_cast<double>(n_grid - 1);
    std::vector<double> grid(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) grid[i] = lo + dx * static_cast<double>(i);

    // Floor the bandwidth at two grid steps so near-degenerate samples still
    // produce densities the crossing scan can see.
    double h_w = config.bandwidth;
    double h_nw = config.bandwidth;
    if (h_w <= 0) h_w = std::max(silverman_bandwidth(scores.walking), 2.0 * dx);
    if (h_nw <= 0) h_nw = std::max(silverman_bandwidth(scores.nonwalking), 2.0 * dx);

    const auto f_w = gaussian_kde(scores.walking, grid, h_w);
    const auto f_nw = gaussian_kde(scores.nonwalking, grid, h_nw);

    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < n_grid; ++i) {
        const double d0 = f_nw[i] - f_w[i];
        const double d1 = f_nw[i + 1] - f_w[i + 1];
        if (d0 > 0 && d1 <= 0) {
            crossings.push_back(grid[i] + dx * d0 / (d0 - d1));
        }
    }
    if (crossings.empty()) return {0.5 * (med_w + med_nw), true};

    double best = crossings.front();
    double best_err = balanced_error(scores, best);
    for (std::size_t i = 1; i < crossings.size(); ++i) {
        const double err = balanced_error(scores, crossings[i]);
        if (err < best_err) {
            best = crossings[i];
            best_err = err;
        }
    }
    return {best, false};
}

double estimate_delta_population(std::span<const double> subject_deltas) {
    if (subject_deltas.empty()) {
        throw insufficient_data_error("population threshold needs at least one subject");
    }
    return stats::median(std::vector<double>(subject_deltas.begin(), subject_deltas.end()));
}

std::vector<CvCell> cv_study(const TriaxialSignal& signal, const LabelTrack& labels, int nm_lo,
                             int nm_hi, const DetectConfig& base_config) {
    if (nm_lo < 2 || nm_hi < nm_lo) throw config_error("bad harmonic range");
    labels.validate();

    // Materialize the labeled walking stretches once.
    std::vector<TriaxialSignal> slices;
    for (const auto& iv : labels.intervals) {
        if (iv.label != kWalkingLabel) continue;
        const auto begin = std::max<std::int64_t>(0, std::llround(iv.start_s * signal.f0));
        const auto end = std::min<std::int64_t>(signal.size(), std::llround(iv.end_s * signal.f0));
        if (end <= begin) continue;
        TriaxialSignal slice;
        slice.f0 = signal.f0;
        slice.samples.assign(signal.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                             signal.samples.begin() + static_cast<std::ptrdiff_t>(end));
        slices.push_back(std::move(slice));
    }
    if (slices.empty()) throw insufficient_data_error("no labeled walking interval");

    std::vector<CvCell> cells;
    for (int n_m = nm_lo; n_m <= nm_hi; ++n_m) {
        DetectConfig cfg = base_config;
        cfg.params.n_m = n_m;
        std::vector<double> w;
        for (const auto& slice : slices) {
            if (slice.size() < cfg.window.window_samples(slice.f0)) continue;
            const auto result = detect_signal(slice, cfg);
            for (const auto& e : result.epochs) {
                if (e.y && e.w) w.push_back(*e.w);
            }
        }
        CvCell cell;
        cell.n_m = n_m;
        if (w.size() >= 2) {
            const double m = stats::mean(w);
            if (m > 0) cell.cv = stats::sample_sd(w) / m;
        }
        cells.push_back(cell);
    }
    return cells;
}

}  // namespace shw
