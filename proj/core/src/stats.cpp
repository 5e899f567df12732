#include "srdreg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srdreg/error.hpp"

namespace srdreg::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw DataError("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DataError("quantile of an empty sample");
    const double n = static_cast<double>(sorted.size());
    const double pos = std::clamp(p * n + 0.5, 1.0, n);  // 1-based
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo >= sorted.size()) return sorted.back();
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

double quantile(std::span<const double> x, double p) {
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, p);
}

namespace {

double central_moment(std::span<const double> x, double m, int order) {
    double acc = 0.0;
    for (double v : x) acc += std::pow(v - m, order);
    return acc / static_cast<double>(x.size());
}

}  // namespace

double skewness(std::span<const double> x) {
    const double m = mean(x);
    const double m2 = central_moment(x, m, 2);
    if (m2 <= 0.0) return 0.0;
    return central_moment(x, m, 3) / std::pow(m2, 1.5);
}

double kurtosis(std::span<const double> x) {
    const double m = mean(x);
    const double m2 = central_moment(x, m, 2);
    if (m2 <= 0.0) return 0.0;
    return central_moment(x, m, 4) / (m2 * m2);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw DataError("pearson: length mismatch");
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace srdreg::stats
