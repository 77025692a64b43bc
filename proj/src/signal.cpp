#include "shw/signal.hpp"

#include <cmath>

namespace shw {

void TriaxialSignal::validate() const {
    if (f0 <= 0) throw config_error("sampling frequency must be a positive integer");
    for (const auto& s : samples) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z)) {
            throw invalid_sample_error("non-finite acceleration sample");
        }
    }
}

EpochGrid make_epoch_grid(const TriaxialSignal& signal) {
    if (signal.f0 <= 0) throw config_error("sampling frequency must be a positive integer");
    return EpochGrid{1, signal.n_epochs()};
}

double vector_magnitude(const Sample& s) {
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z)) {
        throw invalid_sample_error("non-finite acceleration sample");
    }
    return std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z);
}

namespace {

double vm_mean_abs_dev(const TriaxialSignal& signal, std::int64_t begin, std::int64_t count) {
    double acc = 0.0;
    for (std::int64_t u = begin; u < begin + count; ++u) {
        acc += std::abs(vector_magnitude(signal.samples[static_cast<std::size_t>(u)]) - 1.0);
    }
    return acc / static_cast<double>(count);
}

}  // namespace

double vm_count(const TriaxialSignal& signal, std::int64_t center, std::int64_t tau) {
    if (tau <= 0) throw config_error("vm window length must be positive");
    const std::int64_t begin = center - tau / 2;
    if (begin < 0 || begin + tau > signal.size()) {
        throw bounds_error("vm window extends past the signal");
    }
    return vm_mean_abs_dev(signal, begin, tau);
}

std::vector<double> epoch_vm_series(const TriaxialSignal& signal) {
    if (signal.f0 <= 0) throw config_error("sampling frequency must be a positive integer");
    const std::int64_t n = signal.n_epochs();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t e = 0; e < n; ++e) {
        out.push_back(vm_mean_abs_dev(signal, e * signal.f0, signal.f0));
    }
    return out;
}

}  // namespace shw
