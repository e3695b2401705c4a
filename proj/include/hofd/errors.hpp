#pragma once

#include <stdexcept>
#include <string>

namespace hofd {

/// Invalid run configuration (bad keys, impossible knob combinations, missing files).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: singular or ill-conditioned systems, rank deficiency.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad input data: malformed files, non-finite values, degenerate columns.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hofd
