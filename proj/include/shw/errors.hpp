#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shw {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameter or option combination (tau < 2, empty candidate set, ...).
struct config_error : error {
    using error::error;
};

// Requested frequency does not lie on the spectral grid.
struct grid_error : config_error {
    using config_error::config_error;
};

// NaN or infinite acceleration value.
struct invalid_sample_error : error {
    using error::error;
};

// Window or index outside the signal.
struct bounds_error : error {
    using error::error;
};

// Segment/spectrum length does not match the configuration.
struct shape_error : error {
    using error::error;
};

// Decision stream and epoch series do not line up.
struct alignment_error : error {
    using error::error;
};

struct insufficient_data_error : error {
    using error::error;
};

// Malformed input file; offset is the byte position of the problem.
struct parse_error : error {
    parse_error(const std::string& msg, std::uint64_t offset)
        : error(msg + " (byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::uint64_t byte_offset = 0;
};

struct io_error : error {
    using error::error;
};

// ROC is undefined when the truth contains a single class.
struct roc_error : error {
    using error::error;
};

}  // namespace shw
