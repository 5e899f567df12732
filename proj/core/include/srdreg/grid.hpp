#pragma once

#include <Eigen/Core>
#include <cstddef>

namespace srdreg {

/// Uniform grid of m points on [0, 1], endpoints included.
inline double grid_spacing(std::size_t m) { return 1.0 / static_cast<double>(m - 1); }

inline double grid_point(std::size_t i, std::size_t m) {
    return static_cast<double>(i) * grid_spacing(m);
}

/// Trapezoidal integral over [0, 1] of values sampled on the uniform grid.
inline double trapezoid(const Eigen::Ref<const Eigen::VectorXd>& f) {
    const auto m = static_cast<std::size_t>(f.size());
    return grid_spacing(m) * (f.sum() - 0.5 * (f(0) + f(m - 1)));
}

/// Trapezoidal L2 inner product on the uniform grid.
inline double trapezoid_inner(const Eigen::Ref<const Eigen::VectorXd>& a,
                              const Eigen::Ref<const Eigen::VectorXd>& b) {
    const auto m = static_cast<std::size_t>(a.size());
    return grid_spacing(m) * (a.dot(b) - 0.5 * (a(0) * b(0) + a(m - 1) * b(m - 1)));
}

/// Diagonal trapezoid quadrature weights; trapezoid_inner(a, b) == a' diag(w) b.
inline Eigen::VectorXd trapezoid_weights(std::size_t m) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), grid_spacing(m));
    w(0) *= 0.5;
    w(static_cast<Eigen::Index>(m) - 1) *= 0.5;
    return w;
}

}  // namespace srdreg
