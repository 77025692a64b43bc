#include "shw/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shw {

void LabelTrack::validate() const {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        if (!(iv.start_s < iv.end_s)) throw config_error("label interval must have start < end");
        if (i > 0 && intervals[i].start_s < intervals[i - 1].end_s) {
            throw config_error("label intervals must be ordered and non-overlapping");
        }
    }
}

bool LabelTrack::walking_at(double t) const {
    for (const auto& iv : intervals) {
        if (t < iv.start_s) return false;
        if (t < iv.end_s) return iv.label == kWalkingLabel;
    }
    return false;
}

std::vector<bool> LabelTrack::walking_epochs(std::int64_t n_epochs) const {
    std::vector<bool> out(static_cast<std::size_t>(n_epochs), false);
    for (const auto& iv : intervals) {
        if (iv.label != kWalkingLabel) continue;
        const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(iv.start_s - 0.5)));
        for (std::int64_t e = lo; e < n_epochs; ++e) {
            const double mid = static_cast<double>(e) + 0.5;
            if (mid >= iv.end_s) break;
            if (mid >= iv.start_s) out[static_cast<std::size_t>(e)] = true;
        }
    }
    return out;
}

double LabelTrack::end_s() const {
    double end = 0.0;
    for (const auto& iv : intervals) end = std::max(end, iv.end_s);
    return end;
}

RocResult roc_curve(std::span<const double> scores, const std::vector<bool>& truth) {
    if (scores.size() != truth.size()) {
        throw alignment_error("scores and truth must cover the same time span");
    }
    std::int64_t n_pos = 0;
    for (bool t : truth) n_pos += t ? 1 : 0;
    const std::int64_t n_neg = static_cast<std::int64_t>(truth.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw roc_error("ROC is undefined for single-class truth");
    }

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocResult roc;
    roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0;
    double prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // One sweep point per distinct score: predicted positive iff score > t,
        // so the point appears after consuming every sample tied at t.
        while (i < order.size() && scores[order[i]] == threshold) {
            if (truth[order[i]]) {
                ++tp;
            } else {
                ++fp;
            }
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
        const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
        // Points are generated at thresholds just below each distinct score.
        roc.points.push_back({threshold, fpr, tpr});
        auc += 0.5 * (fpr - prev_fpr) * (tpr + prev_tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    roc.auc = auc;
    return roc;
}

double label_overlap(const std::vector<bool>& a, const std::vector<bool>& b,
                     OverlapMetric metric) {
    const std::size_t n = std::max(a.size(), b.size());
    std::int64_t inter = 0;
    std::int64_t uni = 0;
    std::int64_t in_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool in_a_i = i < a.size() && a[i];
        const bool in_b_i = i < b.size() && b[i];
        inter += (in_a_i && in_b_i) ? 1 : 0;
        uni += (in_a_i || in_b_i) ? 1 : 0;
        in_b += in_b_i ? 1 : 0;
    }
    if (metric == OverlapMetric::jaccard) {
        return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
    return in_b == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(in_b);
}

}  // namespace shw
