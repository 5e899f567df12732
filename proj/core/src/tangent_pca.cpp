#include "srdreg/tangent_pca.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/grid.hpp"

namespace srdreg {

std::vector<std::string> PcScores::column_names() const {
    std::vector<std::string> names;
    for (Eigen::Index k = 0; k < values.cols(); ++k) names.push_back(group.name() + "." + std::to_string(k + 1));
    return names;
}

TangentPcaFit fit_pca(std::span<const SquareRootDensity> srds, std::vector<std::string> subject_ids,
                      GroupLabel group, const PcaOptions& options) {
    const std::size_t n = srds.size();
    if (n < 2) throw DataError("PCA of group " + group.name() + " needs n >= 2 subjects, got " + std::to_string(n));
    if (subject_ids.size() != n) throw DataError("subject id count does not match the sample");
    if (!(options.variance_cutoff > 0.0 && options.variance_cutoff <= 1.0))
        throw DataError("variance cutoff must lie in (0, 1]");

    TangentPcaFit fit;
    fit.basis.group = group;
    fit.basis.mean = karcher_mean(srds, options.karcher).mean;

    const auto m = static_cast<Eigen::Index>(fit.basis.mean.size());
    const auto rows = static_cast<Eigen::Index>(n);
    // Rows are tangent vectors scaled by sqrt of the quadrature weights, so the
    // Euclidean SVD below is the eigendecomposition in the trapezoid metric.
    const Eigen::VectorXd sqrt_w = trapezoid_weights(static_cast<std::size_t>(m)).cwiseSqrt();
    Eigen::MatrixXd weighted(rows, m);
    fit.tangents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        fit.tangents.push_back(inv_exp_map(fit.basis.mean, srds[i]));
        weighted.row(static_cast<Eigen::Index>(i)) = fit.tangents.back().values.cwiseProduct(sqrt_w).transpose();
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(weighted, Eigen::ComputeThinV);
    const Eigen::VectorXd singular = svd.singularValues();
    fit.basis.all_eigenvalues = singular.array().square().matrix() / static_cast<double>(n - 1);

    const double total = fit.basis.all_eigenvalues.sum();
    Eigen::Index keep = 1;
    if (total > 0.0) {
        double cumulative = 0.0;
        keep = fit.basis.all_eigenvalues.size();
        for (Eigen::Index k = 0; k < fit.basis.all_eigenvalues.size(); ++k) {
            cumulative += fit.basis.all_eigenvalues(k);
            if (cumulative / total >= options.variance_cutoff) {
                keep = k + 1;
                break;
            }
        }
    }

    fit.basis.eigenvalues = fit.basis.all_eigenvalues.head(keep);
    fit.basis.directions.resize(m, keep);
    for (Eigen::Index k = 0; k < keep; ++k) {
        Eigen::VectorXd u = svd.matrixV().col(k).cwiseQuotient(sqrt_w);
        Eigen::Index arg = 0;
        u.cwiseAbs().maxCoeff(&arg);
        if (u(arg) < 0.0) u = -u;
        fit.basis.directions.col(k) = u;
    }

    fit.scores.group = group;
    fit.scores.subject_ids = std::move(subject_ids);
    fit.scores.values.resize(rows, keep);
    for (std::size_t i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < keep; ++k)
            fit.scores.values(static_cast<Eigen::Index>(i), k) =
                trapezoid_inner(fit.tangents[i].values, fit.basis.directions.col(k));
    return fit;
}

double folded_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double c = trapezoid_inner(a, b) / std::sqrt(trapezoid_inner(a, a) * trapezoid_inner(b, b));
    const double d = std::acos(std::clamp(c, -1.0, 1.0));
    return d > std::numbers::pi / 2 ? std::numbers::pi - d : d;
}

Eigen::MatrixXd loo_basis_stability(std::span<const SquareRootDensity> srds, std::size_t k_max,
                                    const PcaOptions& options) {
    const std::size_t n = srds.size();
    if (n < 3) throw DataError("leave-one-out basis stability needs n >= 3");
    if (k_max == 0) throw DataError("k_max must be positive");

    PcaOptions full_options = options;
    full_options.variance_cutoff = 1.0;
    const auto full = fit_pca(srds, std::vector<std::string>(n), {}, full_options);
    // A leave-one-out sample of n - 1 points spans at most n - 2 directions.
    const std::size_t k_count =
        std::min({k_max, static_cast<std::size_t>(full.basis.directions.cols()), n - 2});

    Eigen::MatrixXd distances(static_cast<Eigen::Index>(k_count), static_cast<Eigen::Index>(n));
    std::vector<SquareRootDensity> held_in;
    held_in.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        held_in.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) held_in.push_back(srds[j]);
        const auto loo = fit_pca(held_in, std::vector<std::string>(n - 1), {}, full_options);
        for (std::size_t k = 0; k < k_count; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            distances(kk, static_cast<Eigen::Index>(i)) =
                folded_angle(full.basis.directions.col(kk), loo.basis.directions.col(kk));
        }
    }
    return distances;
}

void write_pc_scores(const std::filesystem::path& scores_path, const std::filesystem::path& groups_path,
                     std::span<const PcScores> groups, const std::string& config_hash) {
    if (groups.empty()) throw DataError("no PC score groups to write");
    const auto& ids = groups.front().subject_ids;
    for (const auto& g : groups)
        if (g.subject_ids != ids) throw DataError("PC score groups list different subjects");

    auto out = csv::open_output(scores_path);
    csv::write_hash_comment(out, config_hash);
    out << "subject_id";
    for (const auto& g : groups)
        for (const auto& name : g.column_names()) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i];
        for (const auto& g : groups)
            for (Eigen::Index k = 0; k < g.values.cols(); ++k)
                out << ',' << csv::format(g.values(static_cast<Eigen::Index>(i), k));
        out << '\n';
    }

    auto map = csv::open_output(groups_path);
    csv::write_hash_comment(map, config_hash);
    map << "column,group\n";
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (const auto& name : groups[g].column_names()) map << name << ',' << g + 1 << '\n';
}

}  // namespace srdreg
