#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "srdreg/density_ingest.hpp"
#include "srdreg/gss_regression.hpp"
#include "srdreg/gsva.hpp"
#include "srdreg/selection.hpp"

namespace srdreg {

enum class DesignSource { gaussian, density };

struct SimScenario {
    std::vector<int> group_sizes{9, 7, 12};
    std::size_t n = 61;
    std::vector<double> snr{10.0, 1.5, 1.0, 0.8, 0.6, 0.4, 0.25};
    int replications = 50;
    double theta = 1.0;  // Laplace scale of the group-1 coefficients
    std::uint64_t seed = 8;
    DesignSource design = DesignSource::gaussian;
    Hyperparameters hp{};
    McmcSettings mcmc{};
    double alpha = 0.05;
    double c = 0.001;
    std::size_t workers = 0;

    void validate() const;
};

/// Standardized n x sum(group_sizes) design, fixed by the scenario seed:
/// standard normal entries, or PC scores of a synthetic density cohort.
GroupedDesignMatrix simulation_design(const SimScenario& scenario);

struct SimulatedData {
    GroupedDesignMatrix design;
    Eigen::VectorXd y;
    Eigen::VectorXd beta_true;
    double sigma = 0.0;
};

/// Group 1 ~ Laplace(theta), first coefficient of group 2 = 1, everything
/// else 0; y = X beta + N(0, sigma^2) with sigma = theta / snr.
SimulatedData simulate_group_data(const SimScenario& scenario, const GroupedDesignMatrix& design, double snr,
                                  std::uint64_t rep_seed);
SimulatedData simulate_group_data(const SimScenario& scenario, double snr, std::uint64_t rep_seed);

/// At least one group-1 coefficient selected and the first group-2
/// coefficient selected.
bool recovery_success(const SelectionReport& report, const GroupedDesignMatrix& design);

struct RecoveryRow {
    double snr = 0.0;
    int successes = 0;
    int replications = 0;
    double proportion() const { return replications ? static_cast<double>(successes) / replications : 0.0; }
};

std::vector<RecoveryRow> recovery_study(const SimScenario& scenario);

void write_recovery_csv(const std::filesystem::path& path, std::span<const RecoveryRow> rows,
                        const std::string& config_hash = {});

/// Densities of n unimodal truncated normals on [0,1] with random center and
/// width.
std::vector<DensityGrid> unimodal_density_cohort(std::size_t n, std::size_t m, std::uint64_t seed);

/// Densities of n random three-component normal mixtures on [0,1].
std::vector<DensityGrid> mixture_density_cohort(std::size_t n, std::size_t m, std::uint64_t seed);

/// Voxel-level synthetic cohort with matching expression data.
struct PhantomSpec {
    std::size_t subjects = 20;
    std::vector<std::string> sequences{"T1", "T2"};
    std::vector<std::string> regions{"NC", "ED", "ET"};
    std::size_t voxels = 300;          // per (subject, sequence, region)
    std::size_t incomplete = 0;        // subjects whose last region is left empty
    std::size_t genes = 60;
    std::size_t pathways = 5;
    std::size_t genes_per_pathway = 8;
    double signal = 1.5;               // expression shift per unit of the imaging latent
    std::uint64_t seed = 11;
};

struct PhantomCohort {
    std::vector<IntensitySample> samples;
    ExpressionMatrix expression;
    std::vector<GeneSet> gene_sets;
    std::vector<std::string> subject_ids;
    Eigen::VectorXd latent;  // per subject, drives the first sequence's last region and the first pathway
};

PhantomCohort make_phantom_cohort(const PhantomSpec& spec);

/// Writes voxels.csv, expression.csv, genesets.gmt and a pipeline.cfg that
/// points at them.
void write_phantom_inputs(const std::filesystem::path& dir, const PhantomCohort& cohort,
                          const std::string& extra_config = {});

/// Two-component mixtures 0.5 N(0.5 - d, s) + 0.5 N(0.5 + d, s) whose
/// separation d varies by subject while the mean stays 0.5; the response is
/// driven by d. One sequence, one region.
struct ShapeSignalFixture {
    std::vector<IntensitySample> samples;
    std::vector<std::string> subject_ids;
    Eigen::VectorXd separation;
    Eigen::VectorXd y;
};

ShapeSignalFixture shape_signal_fixture(std::size_t n, std::size_t voxels, double noise, std::uint64_t seed);

}  // namespace srdreg
