#pragma once

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "srdreg/density_ingest.hpp"
#include "srdreg/grid.hpp"
#include "srdreg/random.hpp"
#include "srdreg/sphere_geometry.hpp"

namespace fixtures {

inline constexpr std::size_t m = 512;

/// Density sampled from a closed-form function on the grid, normalized.
template <class F>
srdreg::DensityGrid from_function(F f, std::size_t size = m) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(size));
    for (std::size_t i = 0; i < size; ++i) v(static_cast<Eigen::Index>(i)) = f(srdreg::grid_point(i, size));
    return {v / srdreg::trapezoid(v), 0.0};
}

inline srdreg::DensityGrid normal_mixture(const std::vector<double>& w, const std::vector<double>& mu,
                                          const std::vector<double>& sd, std::size_t size = m) {
    return from_function(
        [&](double x) {
            double acc = 0.0;
            for (std::size_t c = 0; c < w.size(); ++c) {
                const double z = (x - mu[c]) / sd[c];
                acc += w[c] * std::exp(-0.5 * z * z) / sd[c];
            }
            return acc;
        },
        size);
}

/// Random one- or two-component normal mixture.
inline srdreg::DensityGrid random_density(srdreg::Rng& rng, std::size_t size = m) {
    std::uniform_real_distribution<double> center(0.1, 0.9), width(0.05, 0.3), weight(0.1, 1.0);
    std::bernoulli_distribution two(0.5);
    std::vector<double> w{weight(rng)}, mu{center(rng)}, sd{width(rng)};
    if (two(rng)) {
        w.push_back(weight(rng));
        mu.push_back(center(rng));
        sd.push_back(width(rng));
    }
    return normal_mixture(w, mu, sd, size);
}

inline srdreg::SquareRootDensity random_srd(srdreg::Rng& rng, std::size_t size = m) {
    return srdreg::to_srd(random_density(rng, size));
}

inline double l2_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd d = a - b;
    return std::sqrt(srdreg::trapezoid_inner(d, d));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("srdreg_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixtures
