#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shw/errors.hpp"

namespace shw {

struct LabelInterval {
    double start_s = 0.0;
    double end_s = 0.0;
    std::string label;
};

inline constexpr const char* kWalkingLabel = "walking";

// Ordered, non-overlapping activity intervals from an observer or from
// visually corrected annotations.
struct LabelTrack {
    enum class Source { observer, corrected };

    std::vector<LabelInterval> intervals;
    Source source = Source::observer;

    void validate() const;
    // Epoch e counts as walking when its midpoint e + 0.5 falls in a walking interval.
    bool walking_at(double t) const;
    std::vector<bool> walking_epochs(std::int64_t n_epochs) const;
    double end_s() const;
};

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points;  // swept from the highest threshold down
    double auc = 0.0;
};

// Threshold sweep over all distinct score values; AUC by the trapezoid rule.
// Throws roc_error when the truth contains a single class.
RocResult roc_curve(std::span<const double> scores, const std::vector<bool>& truth);

enum class OverlapMetric { jaccard, recall };

// Walking-set agreement between two per-second indicator tracks. Jaccard is
// |A∩B| / |A∪B|; recall anchors on b: |A∩B| / |B|. Two empty sets overlap fully.
double label_overlap(const std::vector<bool>& a, const std::vector<bool>& b,
                     OverlapMetric metric = OverlapMetric::jaccard);

}  // namespace shw
