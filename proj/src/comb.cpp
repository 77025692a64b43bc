#include "shw/comb.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace shw {

void DetectionParams::validate(double f_nyquist) const {
    if (delta <= 0) throw config_error("delta must be positive");
    if (!(f_min > 0) || !(f_min < f_max)) throw config_error("need 0 < f_min < f_max");
    if (f_max > f_nyquist + 1e-9) throw config_error("f_max exceeds the Nyquist frequency");
    if (n_m < 2) throw config_error("harmonic count must be at least 2");
    if (score_cap <= 0) throw config_error("score cap must be positive");
}

int SpectralGrid::bin_of(double hz) const {
    const double exact = hz * bins_per_hz();
    const auto bin = static_cast<int>(std::llround(exact));
    if (std::abs(exact - bin) > 1e-6) {
        throw grid_error("frequency is not on the spectral grid");
    }
    return bin;
}

SpectralGrid make_grid(const WindowConfig& config, int f0) {
    config.validate();
    if (f0 <= 0) throw config_error("sampling frequency must be a positive integer");
    return SpectralGrid{config.tau_s, config.pad_factor, f0};
}

CombSpec build_comb(double s_hz, const DetectionParams& params, const SpectralGrid& grid) {
    params.validate(static_cast<double>(grid.f0) / 2.0);
    const int j = grid.bin_of(s_hz);
    if (s_hz < params.f_min - 1e-9 || s_hz > params.f_max + 1e-9) {
        throw config_error("candidate frequency outside [f_min, f_max]");
    }

    CombSpec comb;
    comb.s_hz = grid.freq_of(j);
    comb.s_bin = j;
    comb.n_m = params.n_m;
    comb.tooth_halfwidth_hz = 1.0 / grid.tau_s;

    // Tooth centers in half-bin units: l * j. Centers landing on a half bin
    // round up; the +-1/tau_s neighbors are an exact pad_factor bins away.
    const int l_max = params.teeth_mode == TeethCountMode::formula ? params.n_m : params.n_m + 1;
    const std::int64_t nyquist_half_bins = grid.fft_size();
    const int lo = grid.pad_factor;  // lowest admissible bin, 1/tau_s
    const int hi = grid.max_bin();
    for (int l = 2; l <= l_max; ++l) {
        const std::int64_t num = static_cast<std::int64_t>(l) * j;
        if (num > nyquist_half_bins) continue;
        const auto center = static_cast<int>((num + (num & 1)) / 2);
        for (int b : {center - grid.pad_factor, center, center + grid.pad_factor}) {
            if (b >= lo && b <= hi) comb.bins.push_back(b);
        }
    }
    std::sort(comb.bins.begin(), comb.bins.end());
    comb.bins.erase(std::unique(comb.bins.begin(), comb.bins.end()), comb.bins.end());
    return comb;
}

CombBank make_comb_bank(const DetectionParams& params, const SpectralGrid& grid) {
    params.validate(static_cast<double>(grid.f0) / 2.0);
    const auto j_min = static_cast<int>(std::ceil(params.f_min * grid.bins_per_hz() - 1e-9));
    const auto j_max = std::min(
        static_cast<int>(std::floor(params.f_max * grid.bins_per_hz() + 1e-9)), grid.max_bin());
    if (j_min > j_max) throw config_error("no candidate frequencies on the grid in [f_min, f_max]");

    CombBank bank{grid, params, {}};
    bank.combs.reserve(static_cast<std::size_t>(j_max - j_min + 1));
    for (int j = j_min; j <= j_max; ++j) {
        bank.combs.push_back(build_comb(grid.freq_of(j), params, grid));
    }
    return bank;
}

std::pair<double, double> spectrum_areas(const Spectrum& spec, const CombSpec& comb) {
    double total = 0.0;
    for (double m : spec.magnitudes) total += m;
    double inside = 0.0;
    for (int b : comb.bins) {
        if (b < 0 || static_cast<std::size_t>(b) >= spec.magnitudes.size()) {
            throw shape_error("comb bin outside the spectrum grid");
        }
        inside += spec.magnitudes[static_cast<std::size_t>(b)];
    }
    total *= spec.bin_hz;
    inside *= spec.bin_hz;
    assert(inside <= total * (1.0 + 1e-12) + 1e-300);
    return {total, inside};
}

namespace {

double score_from_areas(double total, double inside, double cap) {
    if (inside <= 0.0) return 0.0;
    const double rest = total - inside;
    if (rest <= 0.0) return cap;
    return std::min(inside / rest, cap);
}

}  // namespace

double score(const Spectrum& spec, const CombSpec& comb, double score_cap) {
    const auto [total, inside] = spectrum_areas(spec, comb);
    return score_from_areas(total, inside, score_cap);
}

WindowDecision decide_window(const TriSpectra& tri, const CombBank& bank) {
    const std::size_t n_bins = static_cast<std::size_t>(bank.grid.n_bins());
    for (const auto& spec : tri.axes) {
        if (spec.magnitudes.size() != n_bins) {
            throw shape_error("spectrum size does not match the detection grid");
        }
    }
    double axis_total[3];
    for (int k = 0; k < 3; ++k) {
        double t = 0.0;
        for (double m : tri.axes[static_cast<std::size_t>(k)].magnitudes) t += m;
        axis_total[k] = t;
    }

    WindowDecision d;
    d.window_start = tri.window_start;
    bool first = true;
    for (const auto& comb : bank.combs) {
        double best_axis_score = 0.0;
        int best_axis = 0;
        for (int k = 0; k < 3; ++k) {
            double inside = 0.0;
            const auto& mags = tri.axes[static_cast<std::size_t>(k)].magnitudes;
            for (int b : comb.bins) inside += mags[static_cast<std::size_t>(b)];
            const double y = score_from_areas(axis_total[k], inside, bank.params.score_cap);
            if (y > best_axis_score) {
                best_axis_score = y;
                best_axis = k;
            }
        }
        // Strict > keeps the lowest candidate frequency on ties.
        if (first || best_axis_score > d.max_score) {
            d.max_score = best_axis_score;
            d.s_hat_hz = comb.s_hz;
            d.s_hat_bin = comb.s_bin;
            d.best_axis = best_axis;
            first = false;
        }
    }
    d.is_walking = d.max_score > bank.params.delta;
    return d;
}

WindowDecision decide_window(const TriSpectra& tri, const DetectionParams& params,
                             const SpectralGrid& grid) {
    return decide_window(tri, make_comb_bank(params, grid));
}

}  // namespace shw
