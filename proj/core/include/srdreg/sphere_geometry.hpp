#pragma once

#include <Eigen/Core>
#include <span>

#include "srdreg/density_ingest.hpp"

namespace srdreg {

/// Density values below this are raised to it before taking square roots.
inline constexpr double density_floor = 1e-10;

/// A point on the positive orthant of the unit L2 sphere: h = +sqrt(f),
/// strictly positive and of unit trapezoidal norm.
class SquareRootDensity {
public:
    SquareRootDensity() = default;

    /// Floors at sqrt(density_floor) and rescales to unit norm.
    explicit SquareRootDensity(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

    /// The density f = h^2 this point represents.
    Eigen::VectorXd density() const { return values_.array().square().matrix(); }

private:
    Eigen::VectorXd values_;
};

/// Element of the tangent space at `base`: <values, base> = 0.
struct TangentVector {
    Eigen::VectorXd base;
    Eigen::VectorXd values;

    double norm() const;
};

SquareRootDensity to_srd(const DensityGrid& f);

double inner_product(const SquareRootDensity& a, const SquareRootDensity& b);

/// Arc length arccos<h1, h2>, in [0, pi/2] for positive SRDs.
double geodesic_distance(const SquareRootDensity& h1, const SquareRootDensity& h2);

SquareRootDensity exp_map(const SquareRootDensity& h, const TangentVector& v);

/// Log map: theta * (h2 - cos(theta) h1) / sin(theta); zero when theta < 1e-12.
TangentVector inv_exp_map(const SquareRootDensity& h1, const SquareRootDensity& h2);

/// Sum of squared geodesic distances from h to the sample.
double variance_functional(const SquareRootDensity& h, std::span<const SquareRootDensity> samples);

struct KarcherOptions {
    double tolerance = 1e-6;  // stop when the mean tangent vector is shorter
    double step = 0.5;        // initial step along the mean tangent direction
    int max_iterations = 200;
};

struct KarcherResult {
    SquareRootDensity mean;
    int iterations = 0;
    double gradient_norm = 0.0;
};

/// Sample Karcher mean by safeguarded gradient descent from the normalized
/// extrinsic average. The step is halved whenever it fails to decrease the
/// variance functional. Throws ConvergenceError after max_iterations.
KarcherResult karcher_mean(std::span<const SquareRootDensity> samples, const KarcherOptions& options = {});

}  // namespace srdreg
