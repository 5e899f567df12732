#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace srdreg {

struct ExpressionMatrix {
    std::vector<std::string> genes;
    std::vector<std::string> samples;
    Eigen::MatrixXd values;  // genes x samples

    /// Columns restricted to `keep` (in that order); throws on unknown ids.
    ExpressionMatrix select_samples(std::span<const std::string> keep) const;
};

struct GeneSet {
    std::string name;
    std::string description;
    std::vector<std::string> genes;
};

struct PathwayScores {
    std::vector<std::string> sets;
    std::vector<std::string> samples;
    Eigen::MatrixXd values;  // sets x samples

    /// Scores of one set for the given samples (in that order).
    Eigen::VectorXd row_for(const std::string& set, std::span<const std::string> sample_ids) const;
};

enum class EnrichmentRule {
    difference_of_extremes,  // max(0, eta) - min(0, eta)
    max_deviation,           // the signed eta of largest magnitude
};

EnrichmentRule parse_enrichment_rule(const std::string& text);

/// Kernel CDF statistic per gene and sample:
/// F(z_ij) = (1/n) sum_r Phi((z_ij - z_ir) / s_i), s_i = max(sd_i / 4, 1e-6).
Eigen::MatrixXd expression_cdf_stats(const Eigen::MatrixXd& expression);

/// Kernel CDF of one gene row at a fixed bandwidth s.
std::vector<double> kernel_cdf_row(std::span<const double> row, double s);

struct RankedStatistics {
    /// order(r, j): gene index holding rank r + 1 in sample j (rank 1 = largest).
    Eigen::MatrixXi order;
    /// weight(r, j) = |p/2 - (r + 1)|, the normalized rank weight at rank r + 1.
    Eigen::MatrixXd weight;
};

/// Ranks genes within each sample by decreasing statistic, ties broken by
/// input gene order.
RankedStatistics rank_normalize(const Eigen::MatrixXd& stats);

/// Random walk eta(l), l = 1..p, over genes in rank order. `weights` and
/// `in_set` are indexed by rank.
std::vector<double> enrichment_walk(std::span<const double> weights, std::span<const char> in_set, double tau = 1.0);

double enrichment_from_walk(std::span<const double> walk, EnrichmentRule rule);

/// Score of one gene set (membership by gene index) in every sample.
Eigen::VectorXd enrichment_score(const RankedStatistics& ranked, std::span<const char> membership,
                                 double tau = 1.0, EnrichmentRule rule = EnrichmentRule::difference_of_extremes);

struct GsvaOptions {
    double tau = 1.0;
    EnrichmentRule rule = EnrichmentRule::difference_of_extremes;
};

/// Full scoring: genes absent from the matrix are dropped per set; sets left
/// empty are skipped with a warning.
PathwayScores gsva(const ExpressionMatrix& expression, std::span<const GeneSet> sets, const GsvaOptions& options = {});

ExpressionMatrix read_expression_csv(const std::filesystem::path& path);
void write_expression_csv(const std::filesystem::path& path, const ExpressionMatrix& expression);
std::vector<GeneSet> read_gmt(const std::filesystem::path& path);
void write_gmt(const std::filesystem::path& path, std::span<const GeneSet> sets);
void write_pathway_scores_csv(const std::filesystem::path& path, const PathwayScores& scores,
                              const std::string& config_hash = {});
PathwayScores read_pathway_scores_csv(const std::filesystem::path& path);

}  // namespace srdreg
