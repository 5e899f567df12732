#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "srdreg/random.hpp"
#include "srdreg/tangent_pca.hpp"

namespace srdreg {

/// Predictor matrix whose columns are partitioned into groups 1..G.
struct GroupedDesignMatrix {
    Eigen::MatrixXd X;                     // n x L
    std::vector<int> group_of_column;      // L entries in 1..G
    std::vector<std::string> column_names;
    std::vector<std::string> group_names;  // G entries
    std::vector<std::string> subject_ids;  // n entries, optional

    std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t columns() const { return static_cast<std::size_t>(X.cols()); }
    int group_count() const { return static_cast<int>(group_names.size()); }
    std::vector<int> group_sizes() const;

    /// Throws DataError unless every group is non-empty and labels line up.
    void validate() const;

    /// Copy with each column centered and scaled to unit sample sd.
    GroupedDesignMatrix standardized() const;
};

/// Concatenates per-group PC scores (group g = position in `groups` + 1).
GroupedDesignMatrix assemble_design(std::span<const PcScores> groups);

/// Reads `pcscores.csv` + `pcgroups.csv`.
GroupedDesignMatrix read_design(const std::filesystem::path& scores_path, const std::filesystem::path& groups_path);

/// Gamma shape/rate pairs for nu^-2 (a1, a2) and sigma^-2 (b1, b2), and the
/// spike hypervariance v0.
struct Hyperparameters {
    double a1 = 0.001;
    double a2 = 0.001;
    double b1 = 0.001;
    double b2 = 0.001;
    double v0 = 0.005;

    void validate() const;
};

struct McmcSettings {
    long iterations = 100000;
    long burnin = 20000;
    long thin = 125;

    void validate() const;
    std::size_t retained() const { return static_cast<std::size_t>((iterations - burnin) / thin); }
};

struct GibbsState {
    Eigen::VectorXd beta;       // L
    Eigen::VectorXd zeta;       // G, each v0 or 1
    Eigen::VectorXd nu_inv2;    // L
    double w = 0.5;
    double sigma_inv2 = 1.0;
};

/// One pathway's response. `y` is mean-centered; the removed mean is the
/// intercept estimate.
struct ResponseVector {
    Eigen::VectorXd y;
    std::string pathway;
    double intercept = 0.0;

    static ResponseVector centered(const Eigen::VectorXd& raw, std::string pathway);
};

struct PosteriorDraws {
    Eigen::MatrixXd beta;         // S x L
    Eigen::VectorXd sigma_inv2;   // S
    Eigen::VectorXd w;            // S
    Eigen::MatrixXd zeta;         // S x G
    std::vector<long> iterations; // sweep index of each retained draw
    McmcSettings settings;
    std::uint64_t seed = 0;
    std::vector<std::string> column_names;
    std::vector<int> group_of_column;

    std::size_t size() const { return static_cast<std::size_t>(beta.rows()); }
};

/// Probability that zeta_g = 1 given the group's coefficients, nu^-2, sigma^-2
/// and w, computed in log space.
double zeta_one_probability(std::span<const double> beta_g, std::span<const double> nu_inv2_g, double sigma_inv2,
                            double w, double v0);

/// Shape of the sigma^-2 full conditional: b1 + (n + L) / 2.
double sigma_conditional_shape(std::size_t n, std::size_t total_columns, double b1);

/// Data, hyperparameters and cached cross-products for the grouped
/// spike-and-slab linear model. Exposes the joint posterior density and every
/// full conditional so the sampler can be checked against them.
class GibbsModel {
public:
    GibbsModel(const GroupedDesignMatrix& design, Eigen::VectorXd y, Hyperparameters hp);

    std::size_t n() const { return static_cast<std::size_t>(y_.size()); }
    std::size_t columns() const { return static_cast<std::size_t>(X_.cols()); }
    int groups() const { return static_cast<int>(group_sizes_.size()); }
    const Hyperparameters& hyperparameters() const { return hp_; }
    const std::vector<int>& group_index() const { return group_index_; }  // 0-based per column
    const std::vector<int>& group_sizes() const { return group_sizes_; }

    GibbsState initial_state() const;

    /// Diagonal of Gamma^-1: nu^-2_gk / zeta_g.
    Eigen::VectorXd prior_precision(const GibbsState& s) const;
    double residual_sum_of_squares(const Eigen::VectorXd& beta) const;

    /// Conditional mean Sigma X'y and Sigma = (X'X + Gamma^-1)^-1.
    Eigen::VectorXd beta_conditional_mean(const GibbsState& s) const;
    Eigen::MatrixXd beta_conditional_sigma(const GibbsState& s) const;

    /// Unnormalized log joint posterior of (beta, zeta, nu^-2, w, sigma^-2).
    double log_joint(const GibbsState& s) const;

    /// Normalized log full-conditional densities at the state's current values.
    double log_conditional_beta(const GibbsState& s) const;
    double log_conditional_zeta(const GibbsState& s, int g) const;
    double log_conditional_nu(const GibbsState& s, Eigen::Index column) const;
    double log_conditional_w(const GibbsState& s) const;
    double log_conditional_sigma(const GibbsState& s) const;

    const Eigen::MatrixXd& X() const { return X_; }
    const Eigen::VectorXd& y() const { return y_; }
    const Eigen::MatrixXd& gram() const { return XtX_; }
    const Eigen::VectorXd& Xty() const { return Xty_; }

private:
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    Hyperparameters hp_;
    std::vector<int> group_index_;
    std::vector<int> group_sizes_;
    Eigen::MatrixXd XtX_;
    Eigen::VectorXd Xty_;
};

/// Gibbs sampler cycling beta, zeta, nu^-2, w, sigma^-2.
class GibbsSampler {
public:
    GibbsSampler(const GibbsModel& model, GibbsState initial, std::uint64_t seed);

    void sweep();
    void draw_beta();
    void draw_zeta();
    void draw_nu();
    void draw_w();
    void draw_sigma();

    const GibbsState& state() const { return state_; }
    GibbsState& mutable_state() { return state_; }

private:
    const GibbsModel& model_;
    GibbsState state_;
    Rng rng_;
};

/// Runs one chain and keeps every thin-th sweep after burn-in. Deterministic
/// given the seed. Numerical failures carry the sweep index.
PosteriorDraws gibbs_fit(const ResponseVector& response, const GroupedDesignMatrix& design, const Hyperparameters& hp,
                         const McmcSettings& settings, std::uint64_t seed);

/// Stacks the retained draws of several chains.
PosteriorDraws pool_draws(std::span<const PosteriorDraws> chains);

/// Mode of a 1-D Gaussian KDE (robust Silverman bandwidth).
double kde_mode(std::span<const double> draws);

/// Per-coefficient marginal posterior mode. Requires at least 100 draws.
Eigen::VectorXd map_estimate(const PosteriorDraws& draws);

/// Gelman-Rubin potential scale reduction factor for each coefficient:
/// sqrt(((S-1)/S W + (1 + 1/m) B/S) / W).
Eigen::VectorXd psrf(std::span<const PosteriorDraws> chains);

/// `iter,beta_<col>...,sigma2,w,zeta_1..zeta_G`.
void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws, int groups,
                     const std::string& config_hash = {});
PosteriorDraws read_draws_csv(const std::filesystem::path& path);

}  // namespace srdreg
