#pragma once

#include <stdexcept>
#include <string>

namespace rvgan {

// All numerics run in double precision so finite-difference gradient checks
// stay well above float round-off.
using real = double;

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rvgan
