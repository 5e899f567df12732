#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "srdreg/gss_regression.hpp"
#include "srdreg/random.hpp"

// One-covariate, one-group regression whose posterior is reduced to a 1-D
// integral over log nu^-2 per zeta value: beta, sigma^-2 and w integrate out
// in closed form, so quadrature gives posterior functionals of beta without
// any sampling.
namespace toy {

struct Data {
    Eigen::VectorXd x;
    Eigen::VectorXd y;  // centered
};

inline Data make(std::uint64_t seed, double beta, double noise = 1.0, int n = 20) {
    auto rng = srdreg::make_rng(seed);
    std::normal_distribution<double> normal;
    Data d{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        d.x(i) = normal(rng);
        d.y(i) = beta * d.x(i) + noise * normal(rng);
    }
    d.y.array() -= d.y.mean();
    return d;
}

inline srdreg::GroupedDesignMatrix design(const Data& d) {
    srdreg::GroupedDesignMatrix m;
    m.X = d.x;
    m.group_of_column = {1};
    m.column_names = {"x"};
    m.group_names = {"g"};
    return m;
}

struct Posterior {
    double mean_beta = 0.0;
    double p_small = 0.0;  // P(|beta| <= c)
};

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline Posterior quadrature(const Data& d, const srdreg::Hyperparameters& hp, double c) {
    const double n = static_cast<double>(d.y.size());
    const double xx = d.x.squaredNorm();
    const double xy = d.x.dot(d.y);
    const double yy = d.y.squaredNorm();
    const double shape = hp.b1 + n / 2;

    struct Node {
        double log_weight, mean, q, rate;
    };
    std::vector<Node> nodes;
    const int points = 12000;
    const double lo = -40.0, hi = 20.0, du = (hi - lo) / (points - 1);
    for (double zeta : {hp.v0, 1.0}) {
        for (int k = 0; k < points; ++k) {
            const double u = lo + k * du;
            const double tau = std::exp(u);
            const double lambda = tau / zeta;
            const double q = xx + lambda;
            const double rate = hp.b2 + 0.5 * (yy - xy * xy / q);
            // Trapezoid end weights.
            const double edge = (k == 0 || k == points - 1) ? std::log(0.5) : 0.0;
            const double lw = hp.a1 * u - hp.a2 * tau + 0.5 * (std::log(lambda) - std::log(q)) - shape * std::log(rate) + edge;
            nodes.push_back({lw, xy / q, q, rate});
        }
    }
    double top = -INFINITY;
    for (const auto& node : nodes) top = std::max(top, node.log_weight);

    // Inner integral over log sigma^-2 for P(|beta| <= c).
    auto small_given = [&](const Node& node) {
        const int inner = 301;
        const double center = std::log(shape / node.rate);
        const double half = 12.0 / std::sqrt(shape);
        double num = 0.0, den = 0.0;
        for (int j = 0; j < inner; ++j) {
            const double v = center - half + 2 * half * j / (inner - 1);
            const double s = std::exp(v);
            const double lw = shape * (v - center) - node.rate * (s - shape / node.rate);
            const double wt = std::exp(lw);
            const double scale = std::sqrt(s * node.q);
            num += wt * (normal_cdf((c - node.mean) * scale) - normal_cdf((-c - node.mean) * scale));
            den += wt;
        }
        return num / den;
    };

    double total = 0.0, mean = 0.0, small = 0.0;
    for (const auto& node : nodes) {
        const double wt = std::exp(node.log_weight - top);
        if (wt < 1e-300) continue;
        total += wt;
        mean += wt * node.mean;
        if (wt > 1e-14) small += wt * small_given(node);
    }
    return {mean / total, small / total};
}

/// Monte-Carlo standard error of the mean by non-overlapping batch means.
inline double batch_se(const Eigen::VectorXd& x, int batches = 40) {
    const Eigen::Index size = x.size() / batches;
    Eigen::VectorXd means(batches);
    for (int b = 0; b < batches; ++b) means(b) = x.segment(b * size, size).mean();
    const double mu = means.mean();
    return std::sqrt((means.array() - mu).square().sum() / (batches - 1) / batches);
}

}  // namespace toy
