#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace srdreg::stats {

double mean(std::span<const double> x);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sd(std::span<const double> x);

/// Quantile with the piecewise-linear Hazen rule: position p*n + 0.5 on the
/// 1-based order statistics, clamped to the sample range.
double quantile(std::span<const double> x, double p);

/// Same as quantile() but on already sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

double skewness(std::span<const double> x);

/// Non-excess kurtosis (3 for a normal distribution).
double kurtosis(std::span<const double> x);

double normal_cdf(double z);

/// Ranks 1..n with ties given the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace srdreg::stats
