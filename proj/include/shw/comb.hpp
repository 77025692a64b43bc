#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "shw/errors.hpp"
#include "shw/spectral.hpp"

namespace shw {

// Eq-literal mode puts teeth at l*s/2 for l = 2..n_m (n_m - 1 teeth); prose
// mode extends the upper limit by one so the comb has n_m teeth.
enum class TeethCountMode { formula, prose };

struct DetectionParams {
    double delta = 0.115;
    double f_min = 1.2;
    double f_max = 4.0;
    int n_m = 6;
    TeethCountMode teeth_mode = TeethCountMode::formula;
    double score_cap = 1e9;

    void validate(double f_nyquist) const;
};

// Discrete frequency grid of a windowed transform: bin j sits at j / (tau_s * pad_factor) Hz.
struct SpectralGrid {
    int tau_s = 10;
    int pad_factor = 1;
    int f0 = 50;

    int fft_size() const { return tau_s * pad_factor * f0; }
    int max_bin() const { return fft_size() / 2; }
    int n_bins() const { return max_bin() + 1; }
    int bins_per_hz() const { return tau_s * pad_factor; }
    double bin_hz() const { return 1.0 / bins_per_hz(); }
    double freq_of(int bin) const { return static_cast<double>(bin) / bins_per_hz(); }
    // Nearest bin; throws grid_error when hz is not a grid frequency.
    int bin_of(double hz) const;
};

SpectralGrid make_grid(const WindowConfig& config, int f0);

// Frequency-bin support of the comb C(f; s): one three-frequency tooth
// {c - 1/tau_s, c, c + 1/tau_s} per harmonic center c = l*s/2, clipped to
// [1/tau_s, f0/2]. Teeth whose center exceeds the Nyquist frequency are dropped.
struct CombSpec {
    double s_hz = 0.0;
    int s_bin = 0;
    int n_m = 0;
    double tooth_halfwidth_hz = 0.0;
    std::vector<int> bins;  // sorted, unique
};

CombSpec build_comb(double s_hz, const DetectionParams& params, const SpectralGrid& grid);

// Every comb for the candidate bins inside [f_min, f_max]; shared read-only by
// all window evaluations.
struct CombBank {
    SpectralGrid grid;
    DetectionParams params;
    std::vector<CombSpec> combs;  // ascending s
};

CombBank make_comb_bank(const DetectionParams& params, const SpectralGrid& grid);

// (total spectral area, area inside the comb support).
std::pair<double, double> spectrum_areas(const Spectrum& spec, const CombSpec& comb);

// Y = IS_comb / (IS_total - IS_comb), 0 for empty combs or all-zero spectra,
// capped when the comb captures everything.
double score(const Spectrum& spec, const CombSpec& comb, double score_cap = 1e9);

struct WindowDecision {
    std::int64_t window_start = 0;  // sample index
    double max_score = 0.0;
    double s_hat_hz = 0.0;
    int s_hat_bin = 0;
    bool is_walking = false;
    int best_axis = 0;
};

WindowDecision decide_window(const TriSpectra& tri, const CombBank& bank);
WindowDecision decide_window(const TriSpectra& tri, const DetectionParams& params,
                             const SpectralGrid& grid);

}  // namespace shw
