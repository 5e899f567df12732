#include "srdreg/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/stats.hpp"

namespace srdreg {

double local_fdr(std::span<const double> draws, double c) {
    if (draws.empty()) throw DataError("local fdr needs at least one draw");
    if (!(c > 0.0)) throw DataError("local fdr threshold c must be positive");
    std::size_t inside = 0;
    for (double b : draws)
        if (std::abs(b) <= c) ++inside;
    return static_cast<double>(inside) / static_cast<double>(draws.size());
}

Eigen::VectorXd local_fdr(const PosteriorDraws& draws, double c) {
    Eigen::VectorXd p(draws.beta.cols());
    std::vector<double> column(draws.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        for (std::size_t s = 0; s < column.size(); ++s) column[s] = draws.beta(static_cast<Eigen::Index>(s), j);
        p(j) = local_fdr(column, c);
    }
    return p;
}

std::size_t FdrThreshold::selected_count() const {
    return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), 1));
}

FdrThreshold fdr_threshold(std::span<const double> p, double alpha) {
    if (p.empty()) throw DataError("fdr threshold of an empty list");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in (0, 1]");
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw DataError("local fdr values must lie in [0, 1]");
    std::vector<double> sorted(p.begin(), p.end());
    std::stable_sort(sorted.begin(), sorted.end());

    FdrThreshold out;
    double running = 0.0;
    for (std::size_t l = 0; l < sorted.size(); ++l) {
        running += sorted[l];
        if (running / static_cast<double>(l + 1) <= alpha) out.u = l + 1;
    }
    out.phi = out.u > 0 ? sorted[out.u - 1] : 0.0;
    out.selected.resize(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) out.selected[j] = out.u > 0 && p[j] < out.phi ? 1 : 0;
    return out;
}

SpearmanResult spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("spearman inputs differ in length");
    if (a.size() < 2) return {0.0, true};
    const auto ra = stats::average_ranks(a);
    const auto rb = stats::average_ranks(b);
    auto constant = [](const std::vector<double>& r) {
        return std::all_of(r.begin(), r.end(), [&](double v) { return v == r.front(); });
    };
    if (constant(ra) || constant(rb)) return {0.0, true};
    return {stats::pearson(ra, rb), false};
}

SpearmanResult spearman_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
    if (X.rows() != y.size() || X.cols() != beta.size()) throw DataError("spearman fit dimensions do not match");
    const Eigen::VectorXd fitted = X * beta;
    return spearman(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                    std::span<const double>(fitted.data(), static_cast<std::size_t>(fitted.size())));
}

std::size_t SelectionReport::selected_count() const {
    return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), 1));
}

SelectionReport select(const PosteriorDraws& draws, double alpha, double c, std::string pathway) {
    SelectionReport r;
    r.pathway = std::move(pathway);
    r.column_names = draws.column_names;
    r.group_of_column = draws.group_of_column;
    r.alpha = alpha;
    r.c = c;
    r.p = local_fdr(draws, c);
    r.beta_map = map_estimate(draws);
    const auto threshold = fdr_threshold(std::span<const double>(r.p.data(), static_cast<std::size_t>(r.p.size())), alpha);
    r.phi = threshold.phi;
    r.selected = threshold.selected;
    r.beta_post = Eigen::VectorXd::Zero(r.p.size());
    for (Eigen::Index j = 0; j < r.p.size(); ++j)
        if (r.selected[static_cast<std::size_t>(j)]) r.beta_post(j) = r.beta_map(j);
    return r;
}

void write_selection_csv(const std::filesystem::path& path, const SelectionReport& r, const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "column,group,p_gk,beta_map,selected,phi_alpha,alpha,c,beta_post\n";
    for (Eigen::Index j = 0; j < r.p.size(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        out << (ju < r.column_names.size() ? r.column_names[ju] : std::to_string(j + 1)) << ','
            << (ju < r.group_of_column.size() ? r.group_of_column[ju] : 0) << ',' << csv::format(r.p(j)) << ','
            << csv::format(r.beta_map(j)) << ',' << (r.selected[ju] ? 1 : 0) << ',' << csv::format(r.phi) << ','
            << csv::format(r.alpha) << ',' << csv::format(r.c) << ',' << csv::format(r.beta_post(j)) << '\n';
    }
}

SelectionReport read_selection_csv(const std::filesystem::path& path) {
    const auto t = csv::read(path);
    const std::string where = path.string();
    const auto c_col = t.column("column");
    const auto c_group = t.column("group");
    const auto c_p = t.column("p_gk");
    const auto c_map = t.column("beta_map");
    const auto c_sel = t.column("selected");
    const auto c_phi = t.column("phi_alpha");
    const auto c_alpha = t.column("alpha");
    const auto c_c = t.column("c");
    const bool has_post = t.has_column("beta_post");
    SelectionReport r;
    const auto L = static_cast<Eigen::Index>(t.rows.size());
    r.p.resize(L);
    r.beta_map.resize(L);
    r.beta_post.resize(L);
    for (Eigen::Index j = 0; j < L; ++j) {
        const auto& row = t.rows[static_cast<std::size_t>(j)];
        r.column_names.push_back(row[c_col]);
        r.group_of_column.push_back(static_cast<int>(csv::to_double(row[c_group], where)));
        r.p(j) = csv::to_double(row[c_p], where);
        r.beta_map(j) = csv::to_double(row[c_map], where);
        r.selected.push_back(csv::to_double(row[c_sel], where) != 0.0 ? 1 : 0);
        r.phi = csv::to_double(row[c_phi], where);
        r.alpha = csv::to_double(row[c_alpha], where);
        r.c = csv::to_double(row[c_c], where);
        r.beta_post(j) = has_post ? csv::to_double(row[t.column("beta_post")], where)
                                  : (r.selected.back() ? r.beta_map(j) : 0.0);
    }
    return r;
}

void write_fitplot_csv(const std::filesystem::path& path, std::span<const std::string> subject_ids,
                       const Eigen::VectorXd& observed, const Eigen::VectorXd& fitted, const std::string& config_hash) {
    if (observed.size() != fitted.size() || subject_ids.size() != static_cast<std::size_t>(observed.size()))
        throw DataError("fit plot columns differ in length");
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "subject_id,observed,fitted\n";
    for (Eigen::Index i = 0; i < observed.size(); ++i)
        out << subject_ids[static_cast<std::size_t>(i)] << ',' << csv::format(observed(i)) << ','
            << csv::format(fitted(i)) << '\n';
}

}  // namespace srdreg
