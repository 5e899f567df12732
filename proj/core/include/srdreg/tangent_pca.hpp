#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "srdreg/sphere_geometry.hpp"

namespace srdreg {

/// A (sequence, region) pair; the unit of grouping for PC scores.
struct GroupLabel {
    std::string sequence;
    std::string region;

    std::string name() const { return sequence + "_" + region; }
    bool operator==(const GroupLabel&) const = default;
};

/// Principal directions of a sample of SRDs in the tangent space at its
/// Karcher mean. Directions are orthonormal under the trapezoid inner product.
struct PcBasis {
    SquareRootDensity mean;
    Eigen::MatrixXd directions;       // m x L
    Eigen::VectorXd eigenvalues;      // L, non-increasing
    Eigen::VectorXd all_eigenvalues;  // full spectrum (length min(n, m))
    GroupLabel group;

    std::size_t size() const { return static_cast<std::size_t>(directions.cols()); }
};

struct PcScores {
    Eigen::MatrixXd values;  // n x L
    std::vector<std::string> subject_ids;
    GroupLabel group;

    /// `<SEQ>_<REGION>.<k>`, k starting at 1.
    std::vector<std::string> column_names() const;
};

struct PcaOptions {
    double variance_cutoff = 0.9999;
    KarcherOptions karcher{};
};

struct TangentPcaFit {
    PcBasis basis;
    PcScores scores;
    std::vector<TangentVector> tangents;  // inverse-exponential images at the mean
};

/// Karcher mean, tangent vectors, eigendecomposition of their covariance
/// (1/(n-1) normalization), truncation at the smallest L whose cumulative
/// variance fraction reaches the cutoff, and scores <v_i, u_k>.
/// Each direction's largest-magnitude coordinate is made positive.
TangentPcaFit fit_pca(std::span<const SquareRootDensity> srds, std::vector<std::string> subject_ids,
                      GroupLabel group = {}, const PcaOptions& options = {});

/// Angles in [0, pi/2] between the k-th full-sample direction and the k-th
/// direction refit without subject i. Returns a K x n matrix with
/// K = min(k_max, rank of the full sample, n - 2).
Eigen::MatrixXd loo_basis_stability(std::span<const SquareRootDensity> srds, std::size_t k_max,
                                    const PcaOptions& options = {});

/// Angle between two unit directions with the sign ambiguity folded out.
double folded_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Wide `subject_id,<SEQ>_<REGION>.<k>...` table and the companion
/// `column,group` map (groups numbered from 1 in the order given).
void write_pc_scores(const std::filesystem::path& scores_path, const std::filesystem::path& groups_path,
                     std::span<const PcScores> groups, const std::string& config_hash = {});

}  // namespace srdreg
