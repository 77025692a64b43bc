#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shw/evaluation.hpp"
#include "shw/pipeline.hpp"
#include "shw/signal.hpp"

namespace shw {

// Per-second detector scores split by the labeled truth.
struct LabeledScoreSet {
    std::vector<double> walking;
    std::vector<double> nonwalking;
    std::string subject_id;
};

LabeledScoreSet split_scores(std::span<const EpochRecord> epochs, const LabelTrack& labels,
                             std::string subject_id = {});

struct KdeConfig {
    int grid_points = 512;
    double bandwidth = 0.0;  // 0 selects Silverman's rule of thumb
    int min_scores_per_class = 30;
};

// Gaussian kernel density estimate evaluated on an explicit grid.
std::vector<double> gaussian_kde(std::span<const double> data, std::span<const double> grid,
                                 double bandwidth);
double silverman_bandwidth(std::span<const double> data);

struct DeltaEstimate {
    double delta = 0.0;
    // Set when the class densities never cross and the midpoint of the class
    // medians is reported instead.
    bool degraded = false;
};

// Subject-level threshold: the crossing of the non-walking and walking score
// densities (non-walking dominant below, walking above). Multiple crossings
// resolve to the one with the lowest balanced misclassification rate.
DeltaEstimate estimate_delta_subject(const LabeledScoreSet& scores, const KdeConfig& config = {});

// Population threshold: the median of the subject thresholds.
double estimate_delta_population(std::span<const double> subject_deltas);

struct CvCell {
    int n_m = 0;
    std::optional<double> cv;
};

// IWF coefficient of variation over the labeled walking intervals as a
// function of the harmonic count.
std::vector<CvCell> cv_study(const TriaxialSignal& signal, const LabelTrack& labels, int nm_lo,
                             int nm_hi, const DetectConfig& base_config);

}  // namespace shw
