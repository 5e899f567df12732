#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "srdreg/config.hpp"
#include "srdreg/density_ingest.hpp"
#include "srdreg/gss_regression.hpp"
#include "srdreg/gsva.hpp"
#include "srdreg/tangent_pca.hpp"

namespace srdreg {

inline const std::vector<double>& default_v0_grid() {
    static const std::vector<double> grid{0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05, 0.1};
    return grid;
}

struct SpreadSummary {
    double mean_sd = 0.0;  // sum of s_gk / (G * L)
    double max_sd = 0.0;
};

/// `estimates` is L x K (one column per grid value); s_gk is the sample sd of
/// each row.
SpreadSummary estimate_spread(const Eigen::MatrixXd& estimates, int groups);

struct V0Sensitivity {
    std::string pathway;
    Eigen::MatrixXd estimates;  // L x K post-selection estimates
    SpreadSummary spread;
};

/// Refits every pathway at each v0 on the grid (same seeds) and summarizes
/// the spread of the post-selection estimates.
std::vector<V0Sensitivity> sensitivity_v0(const GroupedDesignMatrix& design, const PathwayScores& scores,
                                          const PipelineConfig& config, std::span<const double> grid);

void write_v0_sensitivity_csv(const std::filesystem::path& path, std::span<const V0Sensitivity> rows,
                              const std::string& config_hash = {});

struct BandwidthDistance {
    std::string subject_id;
    std::string sequence;
    std::string region;
    std::string rule;       // compared against the reference rule
    double distance = 0.0;  // geodesic distance between the two estimates
};

/// Geodesic distance between the reference-rule KDE and each other rule's
/// KDE for every sample.
std::vector<BandwidthDistance> bandwidth_distances(std::span<const IntensitySample> samples,
                                                   const BandwidthRule& reference,
                                                   std::span<const BandwidthRule> others, std::size_t m,
                                                   std::size_t workers = 1);

struct BandwidthSummary {
    std::string sequence;
    std::string region;
    std::string rule;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t count = 0;
};

/// Mean and sd of the distances per (sequence, region, rule).
std::vector<BandwidthSummary> summarize_bandwidth_distances(std::span<const BandwidthDistance> distances);

void write_bandwidth_csv(const std::filesystem::path& path, std::span<const BandwidthSummary> rows,
                         const std::string& config_hash = {});

/// `group,k,subject,distance` for leave-one-out basis stability.
void write_loo_csv(const std::filesystem::path& path, const std::string& group, const Eigen::MatrixXd& distances,
                   std::span<const std::string> subjects, const std::string& config_hash = {});

}  // namespace srdreg
