#include "srdreg/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srdreg/error.hpp"
#include "srdreg/grid.hpp"

namespace srdreg {

namespace {

const double srd_floor = std::sqrt(density_floor);

void require_same_grid(std::size_t a, std::size_t b) {
    if (a != b)
        throw DataError("grid mismatch: " + std::to_string(a) + " vs " + std::to_string(b) + " points");
}

}  // namespace

SquareRootDensity::SquareRootDensity(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() < 2) throw DataError("square-root density needs at least two grid points");
    if (!values_.allFinite()) throw NumericalError("non-finite square-root density");
    values_ = values_.cwiseMax(srd_floor);
    values_ /= std::sqrt(trapezoid_inner(values_, values_));
}

double TangentVector::norm() const { return std::sqrt(std::max(0.0, trapezoid_inner(values, values))); }

SquareRootDensity to_srd(const DensityGrid& f) {
    return SquareRootDensity(f.values.cwiseMax(density_floor).cwiseSqrt());
}

double inner_product(const SquareRootDensity& a, const SquareRootDensity& b) {
    require_same_grid(a.size(), b.size());
    return trapezoid_inner(a.values(), b.values());
}

namespace {

// Angle via 2 atan2(|a - b|, |a + b|): exact zero for equal inputs and no
// loss of precision near 0 as with acos.
double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd diff = a - b;
    const Eigen::VectorXd sum = a + b;
    return 2.0 * std::atan2(std::sqrt(trapezoid_inner(diff, diff)), std::sqrt(trapezoid_inner(sum, sum)));
}

}  // namespace

double geodesic_distance(const SquareRootDensity& h1, const SquareRootDensity& h2) {
    require_same_grid(h1.size(), h2.size());
    return angle_between(h1.values(), h2.values());
}

SquareRootDensity exp_map(const SquareRootDensity& h, const TangentVector& v) {
    require_same_grid(h.size(), static_cast<std::size_t>(v.values.size()));
    const double len = v.norm();
    if (len < 1e-12) return h;
    return SquareRootDensity(std::cos(len) * h.values() + (std::sin(len) / len) * v.values);
}

TangentVector inv_exp_map(const SquareRootDensity& h1, const SquareRootDensity& h2) {
    require_same_grid(h1.size(), h2.size());
    TangentVector v{h1.values(), Eigen::VectorXd::Zero(h1.values().size())};
    const double theta = angle_between(h1.values(), h2.values());
    if (theta < 1e-12) return v;
    const double cos_theta = std::cos(theta);
    v.values = (theta / std::sin(theta)) * (h2.values() - cos_theta * h1.values());
    return v;
}

double variance_functional(const SquareRootDensity& h, std::span<const SquareRootDensity> samples) {
    double total = 0.0;
    for (const auto& s : samples) {
        const double d = geodesic_distance(h, s);
        total += d * d;
    }
    return total;
}

namespace {

TangentVector mean_direction(const SquareRootDensity& at, std::span<const SquareRootDensity> samples) {
    TangentVector u{at.values(), Eigen::VectorXd::Zero(at.values().size())};
    for (const auto& s : samples) u.values += inv_exp_map(at, s).values;
    u.values /= static_cast<double>(samples.size());
    return u;
}

}  // namespace

KarcherResult karcher_mean(std::span<const SquareRootDensity> samples, const KarcherOptions& options) {
    if (samples.empty()) throw DataError("karcher mean of an empty sample");
    const std::size_t m = samples.front().size();
    Eigen::VectorXd extrinsic = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (const auto& s : samples) {
        require_same_grid(m, s.size());
        extrinsic += s.values();
    }

    KarcherResult result{SquareRootDensity(extrinsic), 0, 0.0};
    double variance = variance_functional(result.mean, samples);
    for (int iter = 0;; ++iter) {
        TangentVector u = mean_direction(result.mean, samples);
        result.gradient_norm = u.norm();
        result.iterations = iter;
        if (result.gradient_norm < options.tolerance) return result;
        if (iter >= options.max_iterations) {
            throw ConvergenceError("karcher mean did not converge in " + std::to_string(options.max_iterations) +
                                       " iterations (gradient norm " + std::to_string(result.gradient_norm) + ")",
                                   result.gradient_norm);
        }

        // Safeguarded step: halve until the variance functional decreases.
        bool moved = false;
        double step = options.step;
        for (int halving = 0; halving < 40; ++halving) {
            TangentVector trial_step{u.base, step * u.values};
            SquareRootDensity trial = exp_map(result.mean, trial_step);
            const double trial_variance = variance_functional(trial, samples);
            // Near the minimum the decrease drops below rounding in the
            // functional; a smaller gradient then decides.
            const bool decreased = trial_variance < variance ||
                                   (trial_variance <= variance * (1.0 + 1e-13) &&
                                    mean_direction(trial, samples).norm() < result.gradient_norm);
            if (decreased) {
                result.mean = std::move(trial);
                variance = trial_variance;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            throw ConvergenceError("karcher mean stalled: no descent step (gradient norm " +
                                       std::to_string(result.gradient_norm) + ")",
                                   result.gradient_norm);
        }
    }
}

}  // namespace srdreg
