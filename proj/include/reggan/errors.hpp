#pragma once

#include <stdexcept>
#include <string>

namespace reggan {

// Invalid or inconsistent data (bad files, shape mismatches, out-of-range values).
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure during optimization or iteration (non-finite loss, non-convergence).
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace reggan
