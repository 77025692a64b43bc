#include "shw/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace shw {

void WindowConfig::validate() const {
    if (tau_s < 1) throw config_error("tau must be at least 1 second");
    if (stride_s < 1) throw config_error("stride must be at least 1 second");
    if (stride_s > tau_s) throw config_error("stride must not exceed tau");
    if (pad_factor < 1) throw config_error("pad factor must be at least 1");
    if (hp_cutoff_hz < 0) throw config_error("high-pass cutoff must be non-negative");
}

std::vector<double> hann_weights(int tau) {
    if (tau < 2) throw config_error("Hann window needs at least 2 samples");
    std::vector<double> w(static_cast<std::size_t>(tau));
    for (int u = 0; u < tau; ++u) {
        w[static_cast<std::size_t>(u)] =
            0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u / (tau - 1)));
    }
    return w;
}

namespace {
// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct SpectrumEngine::Impl {
    int tau;     // samples per window
    int n;       // FFT size after zero padding
    int f0;
    double bin_hz;
    double hp_cutoff_hz;
    std::vector<double> hann;
    double* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan plan = nullptr;

    Impl(const WindowConfig& config, int sample_rate) {
        config.validate();
        if (sample_rate <= 0) throw config_error("sampling frequency must be a positive integer");
        f0 = sample_rate;
        tau = config.window_samples(f0);
        n = config.fft_size(f0);
        bin_hz = 1.0 / (static_cast<double>(config.tau_s) * config.pad_factor);
        hp_cutoff_hz = config.hp_cutoff_hz;
        hann = hann_weights(tau);
        std::lock_guard lock(plan_mutex());
        in = fftw_alloc_real(static_cast<std::size_t>(n));
        out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
        if (!plan) throw config_error("FFT plan creation failed");
    }

    ~Impl() {
        std::lock_guard lock(plan_mutex());
        if (plan) fftw_destroy_plan(plan);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
};

SpectrumEngine::SpectrumEngine(const WindowConfig& config, int f0)
    : impl_(std::make_unique<Impl>(config, f0)) {}

SpectrumEngine::~SpectrumEngine() = default;

int SpectrumEngine::window_samples() const { return impl_->tau; }

Spectrum SpectrumEngine::compute(std::span<const double> segment, std::int64_t window_start) {
    auto& im = *impl_;
    if (segment.size() != static_cast<std::size_t>(im.tau)) {
        throw shape_error("segment length does not match the window length");
    }
    double mean = 0.0;
    for (double v : segment) {
        if (!std::isfinite(v)) throw invalid_sample_error("non-finite acceleration sample");
        mean += v;
    }
    mean /= static_cast<double>(im.tau);

    for (int u = 0; u < im.tau; ++u) {
        im.in[u] = (segment[static_cast<std::size_t>(u)] - mean) * im.hann[static_cast<std::size_t>(u)];
    }
    std::fill(im.in + im.tau, im.in + im.n, 0.0);
    fftw_execute(im.plan);

    const int n_bins = im.n / 2 + 1;
    Spectrum spec;
    spec.magnitudes.resize(static_cast<std::size_t>(n_bins));
    spec.bin_hz = im.bin_hz;
    spec.f_nyquist = static_cast<double>(im.f0) / 2.0;
    spec.window_start = window_start;
    for (int b = 0; b < n_bins; ++b) {
        const double re = im.out[b][0];
        const double imag = im.out[b][1];
        spec.magnitudes[static_cast<std::size_t>(b)] = std::hypot(re, imag);
    }
    spec.magnitudes[0] = 0.0;
    for (int b = 1; b < n_bins; ++b) {
        if (static_cast<double>(b) * im.bin_hz <= im.hp_cutoff_hz) {
            spec.magnitudes[static_cast<std::size_t>(b)] = 0.0;
        } else {
            break;
        }
    }
    return spec;
}

Spectrum window_spectrum(std::span<const double> segment, const WindowConfig& config, int f0,
                         std::int64_t window_start) {
    SpectrumEngine engine(config, f0);
    return engine.compute(segment, window_start);
}

std::vector<TriSpectra> sliding_spectra(const TriaxialSignal& signal, const WindowConfig& config) {
    config.validate();
    SpectrumEngine engine(config, signal.f0);
    const std::int64_t tau = config.window_samples(signal.f0);
    const std::int64_t stride = config.stride_samples(signal.f0);
    std::vector<TriSpectra> out;
    if (signal.size() < tau) return out;
    std::vector<double> scratch(static_cast<std::size_t>(tau));
    for (std::int64_t start = 0; start + tau <= signal.size(); start += stride) {
        TriSpectra tri;
        tri.window_start = signal.start_offset + start;
        for (int axis = 0; axis < 3; ++axis) {
            for (std::int64_t u = 0; u < tau; ++u) {
                const Sample& s = signal.samples[static_cast<std::size_t>(start + u)];
                scratch[static_cast<std::size_t>(u)] = axis == 0 ? s.x : axis == 1 ? s.y : s.z;
            }
            tri.axes[static_cast<std::size_t>(axis)] = engine.compute(scratch, tri.window_start);
        }
        out.push_back(std::move(tri));
    }
    return out;
}

}  // namespace shw
