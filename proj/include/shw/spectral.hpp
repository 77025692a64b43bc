#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "shw/errors.hpp"
#include "shw/signal.hpp"

namespace shw {

struct WindowConfig {
    int tau_s = 10;             // window length, seconds
    int stride_s = 1;           // window shift, seconds
    int pad_factor = 1;         // FFT zero-padding multiplier
    double hp_cutoff_hz = 0.0;  // bins at or below this frequency are zeroed (DC always is)

    void validate() const;
    int window_samples(int f0) const { return tau_s * f0; }
    int fft_size(int f0) const { return tau_s * f0 * pad_factor; }
    int stride_samples(int f0) const { return stride_s * f0; }
};

// Magnitude spectrum of one Hann-windowed, mean-subtracted segment.
// Bins run from DC to the Nyquist frequency f0/2 inclusive.
struct Spectrum {
    std::vector<double> magnitudes;
    double bin_hz = 0.0;
    double f_nyquist = 0.0;
    std::int64_t window_start = 0;
};

struct TriSpectra {
    std::int64_t window_start = 0;
    std::array<Spectrum, 3> axes;
};

// h(u) = 0.5 * (1 - cos(2 pi u / (tau - 1))), u = 0..tau-1.
std::vector<double> hann_weights(int tau);

// Reusable transform state for one (config, f0) pair. Not thread-safe; give
// each worker thread its own engine.
class SpectrumEngine {
public:
    SpectrumEngine(const WindowConfig& config, int f0);
    ~SpectrumEngine();
    SpectrumEngine(const SpectrumEngine&) = delete;
    SpectrumEngine& operator=(const SpectrumEngine&) = delete;

    Spectrum compute(std::span<const double> segment, std::int64_t window_start = 0);
    int window_samples() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around SpectrumEngine.
Spectrum window_spectrum(std::span<const double> segment, const WindowConfig& config, int f0,
                         std::int64_t window_start = 0);

// All tri-axial spectra at window starts 0, stride, 2*stride, ... that fit
// inside the signal. Shorter-than-one-window signals yield an empty result.
std::vector<TriSpectra> sliding_spectra(const TriaxialSignal& signal, const WindowConfig& config);

}  // namespace shw
