#include "srdreg/gsva.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/stats.hpp"

namespace srdreg {

ExpressionMatrix ExpressionMatrix::select_samples(std::span<const std::string> keep) const {
    ExpressionMatrix out;
    out.genes = genes;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const auto it = std::find(samples.begin(), samples.end(), keep[k]);
        if (it == samples.end()) throw DataError("sample '" + keep[k] + "' not in expression matrix");
        out.values.col(static_cast<Eigen::Index>(k)) = values.col(it - samples.begin());
        out.samples.push_back(keep[k]);
    }
    return out;
}

Eigen::VectorXd PathwayScores::row_for(const std::string& set, std::span<const std::string> sample_ids) const {
    const auto s = std::find(sets.begin(), sets.end(), set);
    if (s == sets.end()) throw DataError("unknown pathway '" + set + "'");
    Eigen::VectorXd out(static_cast<Eigen::Index>(sample_ids.size()));
    for (std::size_t i = 0; i < sample_ids.size(); ++i) {
        const auto it = std::find(samples.begin(), samples.end(), sample_ids[i]);
        if (it == samples.end()) throw DataError("no pathway score for sample '" + sample_ids[i] + "'");
        out(static_cast<Eigen::Index>(i)) = values(s - sets.begin(), it - samples.begin());
    }
    return out;
}

EnrichmentRule parse_enrichment_rule(const std::string& text) {
    if (text == "diff" || text == "difference_of_extremes") return EnrichmentRule::difference_of_extremes;
    if (text == "max" || text == "max_deviation") return EnrichmentRule::max_deviation;
    throw DataError("enrichment rule must be 'diff' or 'max_deviation', got '" + text + "'");
}

std::vector<double> kernel_cdf_row(std::span<const double> row, double s) {
    if (!(s > 0.0)) throw DataError("kernel CDF bandwidth must be positive");
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        double acc = 0.0;
        for (double z : row) acc += stats::normal_cdf((row[j] - z) / s);
        out[j] = acc / static_cast<double>(row.size());
    }
    return out;
}

Eigen::MatrixXd expression_cdf_stats(const Eigen::MatrixXd& expression) {
    const Eigen::Index p = expression.rows();
    const Eigen::Index n = expression.cols();
    if (n < 1) throw DataError("expression matrix has no samples");
    Eigen::MatrixXd out(p, n);
    std::vector<double> row(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = expression(i, j);
        const auto cdf = kernel_cdf_row(row, std::max(stats::sd(row) / 4.0, 1e-6));
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = cdf[static_cast<std::size_t>(j)];
    }
    return out;
}

RankedStatistics rank_normalize(const Eigen::MatrixXd& stats) {
    const Eigen::Index p = stats.rows();
    const Eigen::Index n = stats.cols();
    RankedStatistics ranked;
    ranked.order.resize(p, n);
    ranked.weight.resize(p, n);
    std::vector<int> order(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < n; ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return stats(a, j) > stats(b, j); });
        for (Eigen::Index r = 0; r < p; ++r) {
            ranked.order(r, j) = order[static_cast<std::size_t>(r)];
            ranked.weight(r, j) = std::abs(static_cast<double>(p) / 2.0 - static_cast<double>(r + 1));
        }
    }
    return ranked;
}

std::vector<double> enrichment_walk(std::span<const double> weights, std::span<const char> in_set, double tau) {
    const std::size_t p = weights.size();
    if (in_set.size() != p) throw DataError("walk weights and membership differ in length");
    std::vector<double> step(p, 0.0);
    std::size_t members = 0;
    double member_weight = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        if (!in_set[i]) continue;
        ++members;
        step[i] = std::pow(std::abs(weights[i]), tau);
        member_weight += step[i];
    }
    if (members == 0) throw DataError("gene set has no members among the ranked genes");
    if (members == p) throw DataError("set spans all genes");
    if (member_weight == 0.0) {
        // Every member sits at a zero-weight rank; fall back to equal weights.
        for (std::size_t i = 0; i < p; ++i) step[i] = in_set[i] ? 1.0 : 0.0;
        member_weight = static_cast<double>(members);
    }

    std::vector<double> walk(p);
    double hit = 0.0;
    std::size_t misses = 0;
    const double miss_total = static_cast<double>(p - members);
    for (std::size_t i = 0; i < p; ++i) {
        if (in_set[i]) hit += step[i]; else ++misses;
        walk[i] = hit / member_weight - static_cast<double>(misses) / miss_total;
    }
    return walk;
}

double enrichment_from_walk(std::span<const double> walk, EnrichmentRule rule) {
    double hi = 0.0;
    double lo = 0.0;
    for (double v : walk) {
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    if (rule == EnrichmentRule::difference_of_extremes) return hi - lo;
    return hi >= -lo ? hi : lo;
}

Eigen::VectorXd enrichment_score(const RankedStatistics& ranked, std::span<const char> membership, double tau,
                                 EnrichmentRule rule) {
    if (!(tau > 0.0)) throw DataError("tau must be positive");
    const Eigen::Index p = ranked.order.rows();
    const Eigen::Index n = ranked.order.cols();
    if (static_cast<Eigen::Index>(membership.size()) != p) throw DataError("membership length differs from gene count");

    Eigen::VectorXd scores(n);
    std::vector<double> weights(static_cast<std::size_t>(p));
    std::vector<char> in_set(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index r = 0; r < p; ++r) {
            weights[static_cast<std::size_t>(r)] = ranked.weight(r, j);
            in_set[static_cast<std::size_t>(r)] = membership[static_cast<std::size_t>(ranked.order(r, j))];
        }
        scores(j) = enrichment_from_walk(enrichment_walk(weights, in_set, tau), rule);
    }
    return scores;
}

PathwayScores gsva(const ExpressionMatrix& expression, std::span<const GeneSet> sets, const GsvaOptions& options) {
    const auto p = static_cast<std::size_t>(expression.values.rows());
    if (p < 2) throw DataError("expression matrix needs at least two genes");
    const auto ranked = rank_normalize(expression_cdf_stats(expression.values));

    std::unordered_map<std::string, std::size_t> gene_index;
    for (std::size_t i = 0; i < p; ++i)
        if (!gene_index.emplace(expression.genes[i], i).second)
            throw DataError("duplicate gene id '" + expression.genes[i] + "'");

    PathwayScores out;
    out.samples = expression.samples;
    std::vector<Eigen::VectorXd> rows;
    for (const auto& set : sets) {
        std::vector<char> membership(p, 0);
        std::size_t dropped = 0;
        std::size_t members = 0;
        for (const auto& gene : set.genes) {
            const auto it = gene_index.find(gene);
            if (it == gene_index.end()) {
                ++dropped;
                continue;
            }
            if (!membership[it->second]) ++members;
            membership[it->second] = 1;
        }
        if (dropped > 0) spdlog::info("gene set {}: {} genes not in the expression matrix", set.name, dropped);
        if (members == 0) {
            spdlog::warn("gene set {} has no genes in the expression matrix; skipped", set.name);
            continue;
        }
        if (members == p) throw DataError("gene set " + set.name + ": set spans all genes");
        out.sets.push_back(set.name);
        rows.push_back(enrichment_score(ranked, membership, options.tau, options.rule));
    }
    out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.samples.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) out.values.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    return out;
}

ExpressionMatrix read_expression_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    if (table.header.empty() || table.header.front() != "gene")
        throw DataError(path.string() + ": first column must be 'gene'");
    ExpressionMatrix e;
    e.samples.assign(table.header.begin() + 1, table.header.end());
    e.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(e.samples.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        e.genes.push_back(table.rows[i][0]);
        for (std::size_t j = 0; j < e.samples.size(); ++j) {
            const double v = csv::to_double(table.rows[i][j + 1], path.string());
            if (!std::isfinite(v)) throw DataError(path.string() + ": missing or non-finite expression value");
            e.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return e;
}

void write_expression_csv(const std::filesystem::path& path, const ExpressionMatrix& expression) {
    auto out = csv::open_output(path);
    out << "gene";
    for (const auto& s : expression.samples) out << ',' << s;
    out << '\n';
    for (std::size_t i = 0; i < expression.genes.size(); ++i) {
        out << expression.genes[i];
        for (Eigen::Index j = 0; j < expression.values.cols(); ++j)
            out << ',' << csv::format(expression.values(static_cast<Eigen::Index>(i), j));
        out << '\n';
    }
}

std::vector<GeneSet> read_gmt(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<GeneSet> sets;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = csv::split(line, '\t');
        if (fields.size() < 3) throw DataError(path.string() + ": GMT line needs name, description and genes");
        GeneSet set{fields[0], fields[1], {}};
        for (std::size_t k = 2; k < fields.size(); ++k)
            if (!fields[k].empty()) set.genes.push_back(fields[k]);
        sets.push_back(std::move(set));
    }
    return sets;
}

void write_gmt(const std::filesystem::path& path, std::span<const GeneSet> sets) {
    auto out = csv::open_output(path);
    for (const auto& set : sets) {
        out << set.name << '\t' << set.description;
        for (const auto& g : set.genes) out << '\t' << g;
        out << '\n';
    }
}

void write_pathway_scores_csv(const std::filesystem::path& path, const PathwayScores& scores,
                              const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "pathway";
    for (const auto& s : scores.samples) out << ',' << s;
    out << '\n';
    for (std::size_t k = 0; k < scores.sets.size(); ++k) {
        out << scores.sets[k];
        for (Eigen::Index j = 0; j < scores.values.cols(); ++j)
            out << ',' << csv::format(scores.values(static_cast<Eigen::Index>(k), j));
        out << '\n';
    }
}

PathwayScores read_pathway_scores_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    PathwayScores s;
    s.samples.assign(table.header.begin() + 1, table.header.end());
    s.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(s.samples.size()));
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        s.sets.push_back(table.rows[k][0]);
        for (std::size_t j = 0; j < s.samples.size(); ++j)
            s.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                csv::to_double(table.rows[k][j + 1], path.string());
    }
    return s;
}

}  // namespace srdreg
