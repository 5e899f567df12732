#pragma once

#include <stdexcept>
#include <string>

namespace srdreg {

/// Malformed or inconsistent input data (bad files, mismatched dimensions,
/// violated preconditions on user-supplied data).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine failed (non-convergence, loss of positive definiteness,
/// non-finite values).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Karcher-mean descent ran out of iterations.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double last_gradient_norm)
        : NumericalError(what), last_gradient_norm_(last_gradient_norm) {}

    double last_gradient_norm() const noexcept { return last_gradient_norm_; }

private:
    double last_gradient_norm_;
};

/// A region label that has no voxels in a mask.
class RegionAbsent : public DataError {
public:
    explicit RegionAbsent(const std::string& region)
        : DataError("region absent: " + region), region_(region) {}

    const std::string& region() const noexcept { return region_; }

private:
    std::string region_;
};

}  // namespace srdreg
