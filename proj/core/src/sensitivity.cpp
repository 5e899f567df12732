#include "srdreg/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/parallel.hpp"
#include "srdreg/pipeline.hpp"
#include "srdreg/selection.hpp"
#include "srdreg/sphere_geometry.hpp"
#include "srdreg/stats.hpp"

namespace srdreg {

SpreadSummary estimate_spread(const Eigen::MatrixXd& estimates, int groups) {
    if (estimates.cols() < 2) throw DataError("spread needs at least two grid values");
    if (groups < 1) throw DataError("spread needs at least one group");
    SpreadSummary out;
    double total = 0.0;
    std::vector<double> row(static_cast<std::size_t>(estimates.cols()));
    for (Eigen::Index j = 0; j < estimates.rows(); ++j) {
        for (Eigen::Index k = 0; k < estimates.cols(); ++k) row[static_cast<std::size_t>(k)] = estimates(j, k);
        const double s = stats::sd(row);
        total += s;
        out.max_sd = std::max(out.max_sd, s);
    }
    out.mean_sd = total / (static_cast<double>(groups) * static_cast<double>(estimates.rows()));
    return out;
}

std::vector<V0Sensitivity> sensitivity_v0(const GroupedDesignMatrix& design, const PathwayScores& scores,
                                          const PipelineConfig& config, std::span<const double> grid) {
    if (grid.size() < 2) throw DataError("v0 sensitivity needs at least two grid values");
    std::vector<V0Sensitivity> out(scores.sets.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].pathway = scores.sets[k];
        out[k].estimates.resize(design.X.cols(), static_cast<Eigen::Index>(grid.size()));
    }
    for (std::size_t v = 0; v < grid.size(); ++v) {
        PipelineConfig at = config;
        at.hp.v0 = grid[v];
        const auto fits = fit_pathways(design, scores, at);
        for (std::size_t k = 0; k < fits.size(); ++k)
            out[k].estimates.col(static_cast<Eigen::Index>(v)) = fits[k].report.beta_post;
    }
    for (auto& row : out) row.spread = estimate_spread(row.estimates, design.group_count());
    return out;
}

void write_v0_sensitivity_csv(const std::filesystem::path& path, std::span<const V0Sensitivity> rows,
                              const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "pathway,mean_sd,max_sd\n";
    for (const auto& r : rows)
        out << r.pathway << ',' << csv::format(r.spread.mean_sd) << ',' << csv::format(r.spread.max_sd) << '\n';
}

std::vector<BandwidthDistance> bandwidth_distances(std::span<const IntensitySample> samples,
                                                   const BandwidthRule& reference,
                                                   std::span<const BandwidthRule> others, std::size_t m,
                                                   std::size_t workers) {
    if (others.empty()) throw DataError("bandwidth comparison needs at least two rules");
    std::vector<BandwidthDistance> out(samples.size() * others.size());
    parallel_for(samples.size(), workers, [&](std::size_t i) {
        const auto& s = samples[i];
        const auto base = to_srd(kde(s.values, m, reference));
        for (std::size_t r = 0; r < others.size(); ++r) {
            const auto other = to_srd(kde(s.values, m, others[r]));
            out[i * others.size() + r] = {s.subject_id, s.sequence, s.region, others[r].to_string(),
                                          geodesic_distance(base, other)};
        }
    });
    return out;
}

std::vector<BandwidthSummary> summarize_bandwidth_distances(std::span<const BandwidthDistance> distances) {
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> buckets;
    for (const auto& d : distances) buckets[{d.sequence, d.region, d.rule}].push_back(d.distance);

    std::vector<std::string> sequences, regions;
    for (const auto& [key, values] : buckets) {
        sequences.push_back(std::get<0>(key));
        regions.push_back(std::get<1>(key));
    }
    std::sort(sequences.begin(), sequences.end());
    sequences.erase(std::unique(sequences.begin(), sequences.end()), sequences.end());
    std::sort(regions.begin(), regions.end());
    regions.erase(std::unique(regions.begin(), regions.end()), regions.end());
    sequences = canonical_order(sequences, known_sequences());
    regions = canonical_order(regions, known_regions());

    std::vector<BandwidthSummary> out;
    for (const auto& s : sequences)
        for (const auto& r : regions)
            for (const auto& [key, values] : buckets) {
                if (std::get<0>(key) != s || std::get<1>(key) != r) continue;
                out.push_back({s, r, std::get<2>(key), stats::mean(values),
                               values.size() > 1 ? stats::sd(values) : 0.0, values.size()});
            }
    return out;
}

void write_bandwidth_csv(const std::filesystem::path& path, std::span<const BandwidthSummary> rows,
                         const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "sequence,region,rule,mean,sd,count\n";
    for (const auto& r : rows)
        out << r.sequence << ',' << r.region << ',' << r.rule << ',' << csv::format(r.mean) << ','
            << csv::format(r.sd) << ',' << r.count << '\n';
}

void write_loo_csv(const std::filesystem::path& path, const std::string& group, const Eigen::MatrixXd& distances,
                   std::span<const std::string> subjects, const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "group,k,subject,distance\n";
    for (Eigen::Index k = 0; k < distances.rows(); ++k)
        for (Eigen::Index i = 0; i < distances.cols(); ++i)
            out << group << ',' << k + 1 << ',' << subjects[static_cast<std::size_t>(i)] << ','
                << csv::format(distances(k, i)) << '\n';
}

}  // namespace srdreg
