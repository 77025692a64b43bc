#pragma once

#include <cstdint>
#include <vector>

#include "shw/errors.hpp"

namespace shw {

// One tri-axial accelerometer reading, in g units.
struct Sample {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Uniformly sampled 3-axis acceleration. Time is counted in samples from the
// first observation; wall-clock alignment lives in the file header.
struct TriaxialSignal {
    std::vector<Sample> samples;
    int f0 = 50;                     // samples per second per axis
    std::int64_t start_offset = 0;   // absolute index of samples[0]

    std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
    std::int64_t n_epochs() const { return size() / f0; }
    double duration_s() const { return static_cast<double>(size()) / f0; }

    void validate() const;
};

struct EpochGrid {
    int epoch_len_s = 1;
    std::int64_t n_epochs = 0;
};

EpochGrid make_epoch_grid(const TriaxialSignal& signal);

// Euclidean norm of one reading. Throws invalid_sample_error on non-finite input.
double vector_magnitude(const Sample& s);

// Mean of |vm(u) - 1| over the tau samples starting at center - tau/2.
// The 1 g offset removes standing gravity.
double vm_count(const TriaxialSignal& signal, std::int64_t center, std::int64_t tau);

// One gravity-subtracted activity count per whole 1-second epoch. Partial
// trailing epochs are dropped.
std::vector<double> epoch_vm_series(const TriaxialSignal& signal);

}  // namespace shw
