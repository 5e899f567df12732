#include "srdreg/gss_regression.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/stats.hpp"

namespace srdreg {

// ---- design -------------------------------------------------------------

std::vector<int> GroupedDesignMatrix::group_sizes() const {
    std::vector<int> sizes(static_cast<std::size_t>(group_count()), 0);
    for (int g : group_of_column) {
        if (g < 1 || g > group_count()) throw DataError("group label out of range");
        ++sizes[static_cast<std::size_t>(g - 1)];
    }
    return sizes;
}

void GroupedDesignMatrix::validate() const {
    if (X.rows() < 1 || X.cols() < 1) throw DataError("design matrix is empty");
    if (group_of_column.size() != columns()) throw DataError("group labels do not match design columns");
    if (!column_names.empty() && column_names.size() != columns())
        throw DataError("column names do not match design columns");
    if (!subject_ids.empty() && subject_ids.size() != rows()) throw DataError("subject ids do not match design rows");
    for (int size : group_sizes())
        if (size == 0) throw DataError("design has an empty group");
    if (!X.allFinite()) throw DataError("design matrix has non-finite entries");
}

GroupedDesignMatrix GroupedDesignMatrix::standardized() const {
    GroupedDesignMatrix out = *this;
    const double n = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double mu = X.col(j).mean();
        out.X.col(j).array() -= mu;
        const double sd = n > 1 ? std::sqrt(out.X.col(j).squaredNorm() / (n - 1)) : 0.0;
        if (sd > 0.0) out.X.col(j) /= sd;
    }
    return out;
}

GroupedDesignMatrix assemble_design(std::span<const PcScores> groups) {
    if (groups.empty()) throw DataError("no predictor groups");
    GroupedDesignMatrix d;
    d.subject_ids = groups.front().subject_ids;
    Eigen::Index total = 0;
    for (const auto& g : groups) {
        if (g.subject_ids != d.subject_ids) throw DataError("predictor groups list different subjects");
        total += g.values.cols();
    }
    d.X.resize(static_cast<Eigen::Index>(d.subject_ids.size()), total);
    Eigen::Index at = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        d.X.middleCols(at, groups[g].values.cols()) = groups[g].values;
        at += groups[g].values.cols();
        d.group_names.push_back(groups[g].group.name());
        for (const auto& name : groups[g].column_names()) {
            d.column_names.push_back(name);
            d.group_of_column.push_back(static_cast<int>(g + 1));
        }
    }
    d.validate();
    return d;
}

GroupedDesignMatrix read_design(const std::filesystem::path& scores_path, const std::filesystem::path& groups_path) {
    const auto scores = csv::read(scores_path);
    const auto groups = csv::read(groups_path);
    const auto c_column = groups.column("column");
    const auto c_group = groups.column("group");
    std::map<std::string, int> group_of;
    int max_group = 0;
    for (const auto& row : groups.rows) {
        const int g = static_cast<int>(csv::to_double(row[c_group], groups_path.string()));
        group_of[row[c_column]] = g;
        max_group = std::max(max_group, g);
    }

    GroupedDesignMatrix d;
    if (scores.header.empty() || scores.header.front() != "subject_id")
        throw DataError(scores_path.string() + ": first column must be subject_id");
    d.column_names.assign(scores.header.begin() + 1, scores.header.end());
    d.group_names.assign(static_cast<std::size_t>(max_group), std::string{});
    for (const auto& name : d.column_names) {
        const auto it = group_of.find(name);
        if (it == group_of.end()) throw DataError(groups_path.string() + ": no group for column " + name);
        d.group_of_column.push_back(it->second);
        if (it->second < 1) throw DataError(groups_path.string() + ": group numbers start at 1");
        auto& gname = d.group_names[static_cast<std::size_t>(it->second - 1)];
        if (gname.empty()) gname = name.substr(0, name.rfind('.'));
    }
    d.X.resize(static_cast<Eigen::Index>(scores.rows.size()), static_cast<Eigen::Index>(d.column_names.size()));
    for (std::size_t i = 0; i < scores.rows.size(); ++i) {
        d.subject_ids.push_back(scores.rows[i][0]);
        for (std::size_t j = 0; j < d.column_names.size(); ++j)
            d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                csv::to_double(scores.rows[i][j + 1], scores_path.string());
    }
    d.validate();
    return d;
}

// ---- settings -----------------------------------------------------------

void Hyperparameters::validate() const {
    if (!(a1 > 0 && a2 > 0 && b1 > 0 && b2 > 0 && v0 > 0)) throw DataError("hyperparameters must be positive");
    if (!(v0 < 1.0)) throw DataError("v0 must be below 1");
}

void McmcSettings::validate() const {
    if (iterations < 1 || burnin < 0 || thin < 1 || burnin >= iterations)
        throw DataError("MCMC settings need iterations > burnin >= 0 and thin >= 1");
    if (retained() == 0) throw DataError("MCMC settings retain no draws");
}

ResponseVector ResponseVector::centered(const Eigen::VectorXd& raw, std::string pathway) {
    if (raw.size() == 0) throw DataError("empty response");
    if (!raw.allFinite()) throw DataError("response for " + pathway + " has non-finite values");
    ResponseVector r;
    r.intercept = raw.mean();
    r.y = raw.array() - r.intercept;
    r.pathway = std::move(pathway);
    return r;
}

// ---- conditionals -------------------------------------------------------

namespace {

constexpr double nu_inv2_floor = 1e-100;
constexpr double nu_inv2_ceiling = 1e100;
constexpr double w_margin = 1e-12;

double log_gamma_pdf(double x, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_beta_pdf(double x, double a, double b) {
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
}

bool is_slab(double zeta) { return zeta == 1.0; }

}  // namespace

namespace {

// log(P(zeta = v0) / P(zeta = 1)); the common exp(-quad) factor cancels
// except for 1/v0.
double zeta_log_odds(std::span<const double> beta_g, std::span<const double> nu_inv2_g, double sigma_inv2, double w,
                     double v0) {
    double quad = 0.0;
    for (std::size_t k = 0; k < beta_g.size(); ++k) quad += beta_g[k] * beta_g[k] * nu_inv2_g[k];
    quad *= 0.5 * sigma_inv2;
    const double lg = static_cast<double>(beta_g.size());
    return std::log1p(-w) - std::log(w) - 0.5 * lg * std::log(v0) - quad / v0 + quad;
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double zeta_one_probability(std::span<const double> beta_g, std::span<const double> nu_inv2_g, double sigma_inv2,
                            double w, double v0) {
    return 1.0 / (1.0 + std::exp(zeta_log_odds(beta_g, nu_inv2_g, sigma_inv2, w, v0)));
}

double sigma_conditional_shape(std::size_t n, std::size_t total_columns, double b1) {
    return b1 + 0.5 * static_cast<double>(n + total_columns);
}

GibbsModel::GibbsModel(const GroupedDesignMatrix& design, Eigen::VectorXd y, Hyperparameters hp)
    : X_(design.X), y_(std::move(y)), hp_(hp) {
    design.validate();
    hp_.validate();
    if (static_cast<std::size_t>(y_.size()) != design.rows()) throw DataError("response length differs from design rows");
    group_sizes_ = design.group_sizes();
    for (int g : design.group_of_column) group_index_.push_back(g - 1);
    XtX_ = X_.transpose() * X_;
    Xty_ = X_.transpose() * y_;
}

GibbsState GibbsModel::initial_state() const {
    GibbsState s;
    const auto L = static_cast<Eigen::Index>(columns());
    Eigen::MatrixXd ridge = XtX_;
    ridge.diagonal().array() += 1.0;
    s.beta = ridge.llt().solve(Xty_);
    s.zeta = Eigen::VectorXd::Ones(groups());
    s.nu_inv2 = Eigen::VectorXd::Ones(L);
    s.w = 0.5;
    const double var = y_.size() > 1 ? y_.squaredNorm() / static_cast<double>(y_.size() - 1) : 0.0;
    s.sigma_inv2 = var > 0.0 ? 1.0 / var : 1.0;
    return s;
}

Eigen::VectorXd GibbsModel::prior_precision(const GibbsState& s) const {
    Eigen::VectorXd p(s.nu_inv2.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = s.nu_inv2(j) / s.zeta(group_index_[static_cast<std::size_t>(j)]);
    return p;
}

double GibbsModel::residual_sum_of_squares(const Eigen::VectorXd& beta) const {
    return (y_ - X_ * beta).squaredNorm();
}

Eigen::VectorXd GibbsModel::beta_conditional_mean(const GibbsState& s) const {
    Eigen::MatrixXd A = XtX_;
    A.diagonal() += prior_precision(s);
    return A.llt().solve(Xty_);
}

Eigen::MatrixXd GibbsModel::beta_conditional_sigma(const GibbsState& s) const {
    Eigen::MatrixXd A = XtX_;
    A.diagonal() += prior_precision(s);
    return A.llt().solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
}

double GibbsModel::log_joint(const GibbsState& s) const {
    const double n = static_cast<double>(this->n());
    const double phi = s.sigma_inv2;
    double lp = 0.5 * n * std::log(phi) - 0.5 * phi * residual_sum_of_squares(s.beta);
    for (Eigen::Index j = 0; j < s.beta.size(); ++j) {
        const double zeta = s.zeta(group_index_[static_cast<std::size_t>(j)]);
        const double tau = s.nu_inv2(j);
        // (sigma^2 zeta nu^2)^(-1/2) exp(-beta^2 / (2 sigma^2 zeta nu^2))
        lp += 0.5 * (std::log(phi) + std::log(tau) - std::log(zeta)) - 0.5 * s.beta(j) * s.beta(j) * phi * tau / zeta;
        lp += (hp_.a1 - 1.0) * std::log(tau) - hp_.a2 * tau;
    }
    for (Eigen::Index g = 0; g < s.zeta.size(); ++g) lp += is_slab(s.zeta(g)) ? std::log(s.w) : std::log1p(-s.w);
    lp += (hp_.b1 - 1.0) * std::log(phi) - hp_.b2 * phi;
    return lp;
}

double GibbsModel::log_conditional_beta(const GibbsState& s) const {
    Eigen::MatrixXd A = XtX_;
    A.diagonal() += prior_precision(s);
    const Eigen::LLT<Eigen::MatrixXd> llt(A);
    const Eigen::VectorXd mean = llt.solve(Xty_);
    const Eigen::VectorXd diff = s.beta - mean;
    const double L = static_cast<double>(s.beta.size());
    // precision of the conditional is sigma^-2 A
    const double log_det_precision = L * std::log(s.sigma_inv2) + 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * L * std::log(2.0 * std::numbers::pi) + 0.5 * log_det_precision -
           0.5 * s.sigma_inv2 * diff.dot(A * diff);
}

double GibbsModel::log_conditional_zeta(const GibbsState& s, int g) const {
    std::vector<double> beta_g;
    std::vector<double> nu_g;
    for (std::size_t j = 0; j < group_index_.size(); ++j) {
        if (group_index_[j] != g) continue;
        beta_g.push_back(s.beta(static_cast<Eigen::Index>(j)));
        nu_g.push_back(s.nu_inv2(static_cast<Eigen::Index>(j)));
    }
    const double r = zeta_log_odds(beta_g, nu_g, s.sigma_inv2, s.w, hp_.v0);
    return is_slab(s.zeta(g)) ? -softplus(r) : -softplus(-r);
}

double GibbsModel::log_conditional_nu(const GibbsState& s, Eigen::Index column) const {
    const double zeta = s.zeta(group_index_[static_cast<std::size_t>(column)]);
    const double b = s.beta(column);
    return log_gamma_pdf(s.nu_inv2(column), hp_.a1 + 0.5, hp_.a2 + b * b * s.sigma_inv2 / (2.0 * zeta));
}

double GibbsModel::log_conditional_w(const GibbsState& s) const {
    double slab = 0.0;
    for (Eigen::Index g = 0; g < s.zeta.size(); ++g) slab += is_slab(s.zeta(g)) ? 1.0 : 0.0;
    return log_beta_pdf(s.w, 1.0 + slab, 1.0 + static_cast<double>(s.zeta.size()) - slab);
}

double GibbsModel::log_conditional_sigma(const GibbsState& s) const {
    const Eigen::VectorXd prec = prior_precision(s);
    const double penalty = (s.beta.array().square() * prec.array()).sum();
    const double rate = hp_.b2 + 0.5 * (residual_sum_of_squares(s.beta) + penalty);
    return log_gamma_pdf(s.sigma_inv2, sigma_conditional_shape(n(), columns(), hp_.b1), rate);
}

// ---- sampler ------------------------------------------------------------

GibbsSampler::GibbsSampler(const GibbsModel& model, GibbsState initial, std::uint64_t seed)
    : model_(model), state_(std::move(initial)), rng_(make_rng(seed)) {}

void GibbsSampler::sweep() {
    draw_beta();
    draw_zeta();
    draw_nu();
    draw_w();
    draw_sigma();
}

void GibbsSampler::draw_beta() {
    Eigen::MatrixXd A = model_.gram();
    A.diagonal() += model_.prior_precision(state_);
    const Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("beta precision matrix is not positive definite");
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(A.rows());
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = normal(rng_);
    // beta = A^-1 X'y + sigma L^-T z has covariance sigma^2 A^-1.
    Eigen::VectorXd beta = llt.solve(model_.Xty());
    beta += llt.matrixU().solve(z) / std::sqrt(state_.sigma_inv2);
    if (!beta.allFinite()) throw NumericalError("non-finite coefficient draw");
    state_.beta = std::move(beta);
}

void GibbsSampler::draw_zeta() {
    const auto& index = model_.group_index();
    const double v0 = model_.hyperparameters().v0;
    std::uniform_real_distribution<double> uniform;
    std::vector<double> beta_g;
    std::vector<double> nu_g;
    for (int g = 0; g < model_.groups(); ++g) {
        beta_g.clear();
        nu_g.clear();
        for (std::size_t j = 0; j < index.size(); ++j) {
            if (index[j] != g) continue;
            beta_g.push_back(state_.beta(static_cast<Eigen::Index>(j)));
            nu_g.push_back(state_.nu_inv2(static_cast<Eigen::Index>(j)));
        }
        const double p1 = zeta_one_probability(beta_g, nu_g, state_.sigma_inv2, state_.w, v0);
        state_.zeta(g) = uniform(rng_) < p1 ? 1.0 : v0;
    }
}

void GibbsSampler::draw_nu() {
    const auto& hp = model_.hyperparameters();
    const auto& index = model_.group_index();
    for (Eigen::Index j = 0; j < state_.nu_inv2.size(); ++j) {
        const double zeta = state_.zeta(index[static_cast<std::size_t>(j)]);
        const double b = state_.beta(j);
        const double rate = hp.a2 + b * b * state_.sigma_inv2 / (2.0 * zeta);
        std::gamma_distribution<double> gamma(hp.a1 + 0.5, 1.0 / rate);
        state_.nu_inv2(j) = std::clamp(gamma(rng_), nu_inv2_floor, nu_inv2_ceiling);
    }
}

void GibbsSampler::draw_w() {
    double slab = 0.0;
    for (Eigen::Index g = 0; g < state_.zeta.size(); ++g) slab += is_slab(state_.zeta(g)) ? 1.0 : 0.0;
    std::gamma_distribution<double> ga(1.0 + slab, 1.0);
    std::gamma_distribution<double> gb(1.0 + static_cast<double>(state_.zeta.size()) - slab, 1.0);
    const double x = ga(rng_);
    const double y = gb(rng_);
    state_.w = std::clamp(x / (x + y), w_margin, 1.0 - w_margin);
}

void GibbsSampler::draw_sigma() {
    const auto& hp = model_.hyperparameters();
    const Eigen::VectorXd prec = model_.prior_precision(state_);
    const double penalty = (state_.beta.array().square() * prec.array()).sum();
    const double rate = hp.b2 + 0.5 * (model_.residual_sum_of_squares(state_.beta) + penalty);
    std::gamma_distribution<double> gamma(sigma_conditional_shape(model_.n(), model_.columns(), hp.b1), 1.0 / rate);
    const double draw = gamma(rng_);
    if (!(draw > 0.0) || !std::isfinite(draw)) throw NumericalError("invalid sigma^-2 draw");
    state_.sigma_inv2 = draw;
}

PosteriorDraws gibbs_fit(const ResponseVector& response, const GroupedDesignMatrix& design, const Hyperparameters& hp,
                         const McmcSettings& settings, std::uint64_t seed) {
    settings.validate();
    const GibbsModel model(design, response.y, hp);
    GibbsSampler sampler(model, model.initial_state(), seed);

    const auto S = static_cast<Eigen::Index>(settings.retained());
    PosteriorDraws draws;
    draws.settings = settings;
    draws.seed = seed;
    draws.column_names = design.column_names;
    draws.group_of_column = design.group_of_column;
    draws.beta.resize(S, static_cast<Eigen::Index>(model.columns()));
    draws.sigma_inv2.resize(S);
    draws.w.resize(S);
    draws.zeta.resize(S, model.groups());
    draws.iterations.reserve(static_cast<std::size_t>(S));

    Eigen::Index kept = 0;
    for (long t = 1; t <= settings.iterations; ++t) {
        try {
            sampler.sweep();
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at iteration " + std::to_string(t) +
                                 (response.pathway.empty() ? "" : " (" + response.pathway + ")"));
        }
        if (t <= settings.burnin || (t - settings.burnin) % settings.thin != 0 || kept >= S) continue;
        const auto& s = sampler.state();
        draws.beta.row(kept) = s.beta.transpose();
        draws.sigma_inv2(kept) = s.sigma_inv2;
        draws.w(kept) = s.w;
        draws.zeta.row(kept) = s.zeta.transpose();
        draws.iterations.push_back(t);
        ++kept;
    }
    return draws;
}

PosteriorDraws pool_draws(std::span<const PosteriorDraws> chains) {
    if (chains.empty()) throw DataError("no chains to pool");
    PosteriorDraws out = chains.front();
    Eigen::Index total = 0;
    for (const auto& c : chains) {
        if (c.beta.cols() != out.beta.cols()) throw DataError("chains have different coefficient counts");
        total += c.beta.rows();
    }
    out.beta.resize(total, out.beta.cols());
    out.sigma_inv2.resize(total);
    out.w.resize(total);
    out.zeta.resize(total, chains.front().zeta.cols());
    out.iterations.clear();
    Eigen::Index at = 0;
    for (const auto& c : chains) {
        const Eigen::Index s = c.beta.rows();
        out.beta.middleRows(at, s) = c.beta;
        out.sigma_inv2.segment(at, s) = c.sigma_inv2;
        out.w.segment(at, s) = c.w;
        out.zeta.middleRows(at, s) = c.zeta;
        out.iterations.insert(out.iterations.end(), c.iterations.begin(), c.iterations.end());
        at += s;
    }
    return out;
}

// ---- summaries ----------------------------------------------------------

double kde_mode(std::span<const double> draws) {
    if (draws.empty()) throw DataError("mode of an empty sample");
    std::vector<double> x(draws.begin(), draws.end());
    std::sort(x.begin(), x.end());
    const double lo = x.front();
    const double hi = x.back();
    if (!(hi > lo)) return lo;

    const double n = static_cast<double>(x.size());
    const double sigma = stats::sd(x);
    const double iqr = stats::quantile_sorted(x, 0.75) - stats::quantile_sorted(x, 0.25);
    const double spread = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
    const double h = 1.06 * spread * std::pow(n, -0.2);
    if (!(h > 0.0)) return x[x.size() / 2];

    const double reach = 8.0 * h;
    auto density = [&](double at) {
        auto first = std::lower_bound(x.begin(), x.end(), at - reach);
        const auto last = std::upper_bound(first, x.end(), at + reach);
        double acc = 0.0;
        for (; first != last; ++first) {
            const double z = (at - *first) / h;
            acc += std::exp(-0.5 * z * z);
        }
        return acc;
    };

    // Coarse pass over a 512-point grid spanning the draws plus the draws
    // themselves (a narrow spike can fall between grid points), then a local
    // refinement around the winner.
    constexpr int grid = 512;
    const double step = (hi - lo) / (grid - 1);
    double best = lo;
    double best_density = -1.0;
    auto consider = [&](double at) {
        const double d = density(at);
        if (d > best_density) {
            best_density = d;
            best = at;
        }
    };
    for (int k = 0; k < grid; ++k) consider(lo + step * k);
    for (double v : x) consider(v);

    const double half_width = std::min(step, h);
    const double center = best;
    for (int k = -100; k <= 100; ++k) consider(center + half_width * k / 100.0);
    return best;
}

Eigen::VectorXd map_estimate(const PosteriorDraws& draws) {
    if (draws.size() < 100) throw DataError("MAP estimate needs at least 100 draws");
    Eigen::VectorXd out(draws.beta.cols());
    std::vector<double> column(draws.size());
    for (Eigen::Index j = 0; j < draws.beta.cols(); ++j) {
        for (std::size_t s = 0; s < draws.size(); ++s) column[s] = draws.beta(static_cast<Eigen::Index>(s), j);
        out(j) = kde_mode(column);
    }
    return out;
}

Eigen::VectorXd psrf(std::span<const PosteriorDraws> chains) {
    if (chains.size() < 2) throw DataError("PSRF needs at least two chains");
    const Eigen::Index S = chains.front().beta.rows();
    const Eigen::Index L = chains.front().beta.cols();
    if (S < 2) throw DataError("PSRF needs at least two draws per chain");
    for (const auto& c : chains)
        if (c.beta.rows() != S || c.beta.cols() != L) throw DataError("PSRF chains must have equal shapes");

    const double m = static_cast<double>(chains.size());
    const double s = static_cast<double>(S);
    Eigen::VectorXd out(L);
    for (Eigen::Index j = 0; j < L; ++j) {
        std::vector<double> means;
        double within = 0.0;
        for (const auto& c : chains) {
            const double mu = c.beta.col(j).mean();
            means.push_back(mu);
            within += (c.beta.col(j).array() - mu).square().sum() / (s - 1.0);
        }
        within /= m;
        const double between_over_s = stats::sd(means) * stats::sd(means);  // B / S
        if (within <= 0.0) {
            out(j) = between_over_s > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
            continue;
        }
        const double pooled = (s - 1.0) / s * within + (1.0 + 1.0 / m) * between_over_s;
        out(j) = std::sqrt(pooled / within);
    }
    return out;
}

void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws, int groups,
                     const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "iter";
    for (Eigen::Index j = 0; j < draws.beta.cols(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        out << ",beta_" << (ju < draws.column_names.size() ? draws.column_names[ju] : std::to_string(j + 1));
    }
    out << ",sigma2,w";
    for (int g = 1; g <= groups; ++g) out << ",zeta_" << g;
    out << '\n';
    for (std::size_t s = 0; s < draws.size(); ++s) {
        const auto si = static_cast<Eigen::Index>(s);
        out << (s < draws.iterations.size() ? draws.iterations[s] : static_cast<long>(s + 1));
        for (Eigen::Index j = 0; j < draws.beta.cols(); ++j) out << ',' << csv::format(draws.beta(si, j));
        out << ',' << csv::format(1.0 / draws.sigma_inv2(si)) << ',' << csv::format(draws.w(si));
        for (int g = 0; g < groups; ++g) out << ',' << csv::format(draws.zeta(si, g));
        out << '\n';
    }
}

PosteriorDraws read_draws_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const auto c_sigma = table.column("sigma2");
    const auto c_w = table.column("w");
    std::vector<std::size_t> beta_cols;
    std::vector<std::size_t> zeta_cols;
    PosteriorDraws d;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const auto& h = table.header[c];
        if (h.rfind("beta_", 0) == 0) {
            beta_cols.push_back(c);
            d.column_names.push_back(h.substr(5));
        } else if (h.rfind("zeta_", 0) == 0) {
            zeta_cols.push_back(c);
        }
    }
    const auto S = static_cast<Eigen::Index>(table.rows.size());
    d.beta.resize(S, static_cast<Eigen::Index>(beta_cols.size()));
    d.zeta.resize(S, static_cast<Eigen::Index>(zeta_cols.size()));
    d.sigma_inv2.resize(S);
    d.w.resize(S);
    const std::string where = path.string();
    for (Eigen::Index s = 0; s < S; ++s) {
        const auto& row = table.rows[static_cast<std::size_t>(s)];
        d.iterations.push_back(static_cast<long>(csv::to_double(row[0], where)));
        for (std::size_t j = 0; j < beta_cols.size(); ++j)
            d.beta(s, static_cast<Eigen::Index>(j)) = csv::to_double(row[beta_cols[j]], where);
        for (std::size_t g = 0; g < zeta_cols.size(); ++g)
            d.zeta(s, static_cast<Eigen::Index>(g)) = csv::to_double(row[zeta_cols[g]], where);
        d.sigma_inv2(s) = 1.0 / csv::to_double(row[c_sigma], where);
        d.w(s) = csv::to_double(row[c_w], where);
    }
    return d;
}

}  // namespace srdreg
