#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "srdreg/gss_regression.hpp"

namespace srdreg {

/// Per-coefficient proportion of draws with |beta| <= c.
Eigen::VectorXd local_fdr(const PosteriorDraws& draws, double c = 0.001);
double local_fdr(std::span<const double> draws, double c = 0.001);

struct FdrThreshold {
    double phi = 0.0;
    std::size_t u = 0;               // prefix length, 0 when no prefix qualifies
    std::vector<char> selected;      // p < phi
    std::size_t selected_count() const;
};

/// Largest sorted prefix whose mean local fdr is at most alpha; selects p < phi.
FdrThreshold fdr_threshold(std::span<const double> p, double alpha = 0.05);

struct SpearmanResult {
    double rho = 0.0;
    bool undefined = false;  // one side has zero variance
};

SpearmanResult spearman(std::span<const double> a, std::span<const double> b);

/// Spearman correlation between y and X beta.
SpearmanResult spearman_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

struct SelectionReport {
    std::string pathway;
    std::vector<std::string> column_names;
    std::vector<int> group_of_column;
    Eigen::VectorXd p;
    Eigen::VectorXd beta_map;
    Eigen::VectorXd beta_post;  // beta_map where selected, else 0
    std::vector<char> selected;
    double phi = 0.0;
    double alpha = 0.05;
    double c = 0.001;
    std::size_t selected_count() const;
};

SelectionReport select(const PosteriorDraws& draws, double alpha = 0.05, double c = 0.001, std::string pathway = {});

/// `column,group,p_gk,beta_map,selected,phi_alpha,alpha,c,beta_post`.
void write_selection_csv(const std::filesystem::path& path, const SelectionReport& report,
                         const std::string& config_hash = {});
SelectionReport read_selection_csv(const std::filesystem::path& path);

/// `subject_id,observed,fitted`, with fitted = intercept + X beta_post.
void write_fitplot_csv(const std::filesystem::path& path, std::span<const std::string> subject_ids,
                       const Eigen::VectorXd& observed, const Eigen::VectorXd& fitted,
                       const std::string& config_hash = {});

}  // namespace srdreg
