#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "srdreg/config.hpp"
#include "srdreg/density_ingest.hpp"
#include "srdreg/gss_regression.hpp"
#include "srdreg/gsva.hpp"
#include "srdreg/selection.hpp"
#include "srdreg/tangent_pca.hpp"

namespace srdreg {

/// Intensity samples from `voxels` or a raw-volume `volumes` manifest.
std::vector<IntensitySample> load_intensity_samples(const PipelineConfig& config);

/// (sequence, region) groups present anywhere in the data, in canonical order.
std::vector<GroupLabel> observed_groups(std::span<const IntensitySample> samples);
std::vector<GroupLabel> observed_groups(std::span<const DensityRecord> records);

struct CohortSelection {
    std::vector<std::string> subjects;  // sorted
    std::size_t incomplete = 0;         // lacking some (sequence, region)
    std::size_t without_expression = 0;
    std::size_t filtered_out = 0;
};

/// Subjects with every group present, intersected with the optional
/// expression samples and cohort filter.
CohortSelection select_cohort(const std::set<std::string>& subjects,
                              const std::set<std::pair<std::string, std::string>>& available,  // (subject, group)
                              std::span<const GroupLabel> groups,
                              const std::optional<std::vector<std::string>>& expression_samples,
                              const std::optional<std::vector<std::string>>& filter);

/// Rescales each sequence over the listed subjects' samples, then estimates
/// one density per (subject, sequence, region).
std::vector<DensityRecord> estimate_densities(std::vector<IntensitySample> samples,
                                              std::span<const std::string> subjects, std::size_t m,
                                              const BandwidthRule& rule, std::size_t workers = 1);

/// Tangent PCA per group over the listed subjects, in group order.
std::vector<TangentPcaFit> fit_group_pcas(std::span<const DensityRecord> records, std::span<const GroupLabel> groups,
                                          std::span<const std::string> subjects, const PcaOptions& options,
                                          std::size_t workers = 1);

/// GSVA on the expression samples allowed by the cohort filter.
PathwayScores compute_pathway_scores(const PipelineConfig& config);

struct PathwayFit {
    std::string pathway;
    std::vector<PosteriorDraws> chains;
    PosteriorDraws pooled;
    Eigen::VectorXd psrf;  // empty with one chain
    SelectionReport report;
    double intercept = 0.0;
    Eigen::VectorXd observed;
    Eigen::VectorXd fitted;  // intercept + X beta_post
    SpearmanResult spearman;
};

/// Seed of chain `chain` for a pathway under a master seed.
std::uint64_t chain_seed(std::uint64_t master, const std::string& pathway, int chain);

/// Fits every pathway (all chains) and runs selection.
std::vector<PathwayFit> fit_pathways(const GroupedDesignMatrix& design, const PathwayScores& scores,
                                     const PipelineConfig& config);

/// draws_/selection_/fitplot_ (and psrf_ with several chains) files.
void write_pathway_outputs(const std::filesystem::path& dir, const PathwayFit& fit, const GroupedDesignMatrix& design,
                           const std::string& config_hash);

/// Rows = pathways with at least one selection, columns = design columns,
/// entries = post-selection estimates.
void write_associations_csv(const std::filesystem::path& path, std::span<const PathwayFit> fits,
                            const GroupedDesignMatrix& design, const std::string& config_hash);

/// `pathway,rho,undefined,selected` per pathway.
void write_spearman_csv(const std::filesystem::path& path, std::span<const PathwayFit> fits,
                        const std::string& config_hash, const std::string& label = {});

struct PipelineResult {
    CohortSelection cohort;
    std::vector<GroupLabel> groups;
    std::vector<TangentPcaFit> pcas;
    GroupedDesignMatrix design;
    PathwayScores pathway_scores;
    std::vector<PathwayFit> fits;
};

/// densities -> per-group PCA -> GSVA -> per-pathway fit -> selection ->
/// association matrix, writing every artifact under config.out_dir. A failing
/// stage is rethrown with its name; files from earlier stages stay on disk.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Shared front half of the pipeline: the analysis cohort and its densities.
struct ImagingStage {
    CohortSelection cohort;
    std::vector<GroupLabel> groups;
    std::vector<DensityRecord> records;  // analysis cohort only
    std::vector<IntensitySample> samples;  // rescaled; empty when read from densities.csv
};

ImagingStage prepare_imaging(const PipelineConfig& config,
                             const std::optional<std::vector<std::string>>& expression_samples);

}  // namespace srdreg
