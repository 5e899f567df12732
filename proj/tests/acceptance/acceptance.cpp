// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "fixtures.hpp"
#include "reference_posterior.hpp"
#include "shape_fixture.hpp"
#include "srdreg/gsva.hpp"
#include "srdreg/pipeline.hpp"
#include "srdreg/selection.hpp"
#include "srdreg/sensitivity.hpp"
#include "srdreg/simulation.hpp"
#include "srdreg/sphere_geometry.hpp"
#include "toy_model.hpp"

using namespace srdreg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- 1 ------------------------------------------------------------------

Outcome geometry_suite() {
    Outcome out;
    const auto start = Clock::now();
    auto rng = make_rng(101);
    double worst_roundtrip = 0.0, worst_tangency = 0.0, worst_triangle = -INFINITY;
    bool symmetric = true;
    std::vector<SquareRootDensity> points;
    for (int i = 0; i < 1000; ++i) {
        const auto a = fixtures::random_srd(rng);
        const auto b = fixtures::random_srd(rng);
        const auto v = inv_exp_map(a, b);
        worst_roundtrip = std::max(worst_roundtrip, fixtures::l2_error(exp_map(a, v).values(), b.values()));
        worst_tangency = std::max(worst_tangency, std::abs(trapezoid_inner(v.values, a.values())));
        symmetric = symmetric && geodesic_distance(a, b) == geodesic_distance(b, a);
        if (!points.empty()) {
            const auto& c = points.back();
            worst_triangle = std::max(worst_triangle,
                                      geodesic_distance(a, c) - geodesic_distance(a, b) - geodesic_distance(b, c));
        }
        points.push_back(b);
    }
    const double elapsed = seconds_since(start);
    out.check(worst_roundtrip < 1e-8, "roundtrip");
    out.check(symmetric, "symmetry");
    out.check(worst_triangle <= 1e-9, "triangle");
    out.check(worst_tangency < 1e-6, "tangency");
    out.check(elapsed < 30.0, "runtime");
    out.detail << "roundtrip " << worst_roundtrip << ", tangency " << worst_tangency << ", triangle excess "
               << worst_triangle << ", symmetric " << (symmetric ? "yes" : "no") << ", " << elapsed << " s";
    return out;
}

// ---- 2 ------------------------------------------------------------------

Outcome karcher_suite() {
    Outcome out;
    const auto start = Clock::now();
    auto rng = make_rng(202);

    double worst_midpoint = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const std::vector<SquareRootDensity> pair{fixtures::random_srd(rng), fixtures::random_srd(rng)};
        const auto v = inv_exp_map(pair[0], pair[1]);
        auto along = [&](double t) { return exp_map(pair[0], {v.base, t * v.values}); };
        auto cost = [&](double t) { return variance_functional(along(t), pair); };
        double lo = 0.0, hi = 1.0;
        const double g = (std::sqrt(5.0) - 1) / 2;
        for (int it = 0; it < 200; ++it) {
            const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            if (cost(x1) < cost(x2))
                hi = x2;
            else
                lo = x1;
        }
        const auto mean = karcher_mean(pair, {1e-10, 0.5, 200}).mean;
        worst_midpoint = std::max(worst_midpoint, fixtures::l2_error(mean.values(), along(0.5 * (lo + hi)).values()));
    }

    double worst_gradient = 0.0;
    bool local_minimum = true;
    for (int cohort = 0; cohort < 5; ++cohort) {
        std::vector<SquareRootDensity> sample;
        for (int i = 0; i < 61; ++i) sample.push_back(fixtures::random_srd(rng));
        const auto result = karcher_mean(sample);
        Eigen::VectorXd mean_tangent = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fixtures::m));
        for (const auto& h : sample) mean_tangent += inv_exp_map(result.mean, h).values;
        mean_tangent /= 61.0;
        worst_gradient = std::max(worst_gradient, std::sqrt(trapezoid_inner(mean_tangent, mean_tangent)));

        const double at_mean = variance_functional(result.mean, sample);
        std::normal_distribution<double> normal;
        for (int probe = 0; probe < 20; ++probe) {
            Eigen::VectorXd dir(static_cast<Eigen::Index>(fixtures::m));
            for (Eigen::Index i = 0; i < dir.size(); ++i)
                dir(i) = std::cos((probe % 5 + 1) * std::numbers::pi * grid_point(static_cast<std::size_t>(i), fixtures::m)) +
                         0.1 * normal(rng);
            dir -= trapezoid_inner(dir, result.mean.values()) * result.mean.values();
            dir *= 0.01 / std::sqrt(trapezoid_inner(dir, dir));
            local_minimum = local_minimum && at_mean <= variance_functional(exp_map(result.mean, {result.mean.values(), dir}), sample);
        }
    }
    const double elapsed = seconds_since(start);
    out.check(worst_midpoint < 1e-6, "midpoint");
    out.check(worst_gradient < 1e-6, "first-order condition");
    out.check(local_minimum, "local minimum");
    out.check(elapsed < 60.0, "runtime");
    out.detail << "midpoint error " << worst_midpoint << ", mean tangent " << worst_gradient << ", local minimum "
               << (local_minimum ? "yes" : "no") << ", " << elapsed << " s";
    return out;
}

// ---- 3 ------------------------------------------------------------------

Outcome analytic_distance() {
    Outcome out;
    const auto h1 = to_srd(fixtures::from_function([](double) { return 1.0; }));
    const auto h2 = to_srd(fixtures::from_function([](double x) { return 2 * x; }));
    const double theta = geodesic_distance(h1, h2);
    out.check(std::abs(theta - 0.33984) <= 1e-4, "theta");
    out.detail << "theta " << theta << " (closed form " << std::acos(2 * std::sqrt(2.0) / 3) << ")";
    return out;
}

// ---- 4 ------------------------------------------------------------------

Outcome gibbs_correctness() {
    Outcome out;
    const auto start = Clock::now();
    const Hyperparameters hp;
    const auto data = toy::make(16, 0.5);
    const auto oracle = toy::quadrature(data, hp, 0.001);
    const auto draws =
        gibbs_fit(ResponseVector::centered(data.y, "toy"), toy::design(data), hp, {220000, 20000, 1}, 17);
    const Eigen::VectorXd beta = draws.beta.col(0);
    const double se = toy::batch_se(beta);
    const double z = (beta.mean() - oracle.mean_beta) / se;
    out.check(std::abs(z) < 3.0, "posterior mean");

    // Single-coordinate moves on a three-group model.
    auto rng = make_rng(404);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    GroupedDesignMatrix d;
    d.X.resize(15, 6);
    for (Eigen::Index k = 0; k < d.X.size(); ++k) d.X(k) = normal(rng);
    d.group_of_column = {1, 1, 2, 2, 2, 3};
    d.group_names = {"a", "b", "c"};
    d.column_names = {"a1", "a2", "b1", "b2", "b3", "c1"};
    Eigen::VectorXd y = d.X.col(0) - d.X.col(5);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 0.5 * normal(rng);
    y.array() -= y.mean();
    const Hyperparameters hp2{0.3, 0.7, 0.2, 0.4, 0.05};
    const GibbsModel model(d, y, hp2);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        GibbsState s;
        s.beta = Eigen::VectorXd(6);
        s.nu_inv2 = Eigen::VectorXd(6);
        for (int j = 0; j < 6; ++j) {
            s.beta(j) = normal(rng);
            s.nu_inv2(j) = std::exp(normal(rng));
        }
        s.zeta = Eigen::VectorXd(3);
        for (int g = 0; g < 3; ++g) s.zeta(g) = unit(rng) < 0.5 ? hp2.v0 : 1.0;
        s.w = unit(rng);
        s.sigma_inv2 = std::exp(normal(rng));
        auto compare = [&](const GibbsState& m, double conditional_ratio) {
            const double joint = reference::log_joint(d, y, hp2, m) - reference::log_joint(d, y, hp2, s);
            worst = std::max(worst, std::abs(conditional_ratio - joint));
        };
        for (Eigen::Index j = 0; j < 6; ++j) {
            GibbsState m = s;
            m.beta(j) += normal(rng);
            compare(m, model.log_conditional_beta(m) - model.log_conditional_beta(s));
            m = s;
            m.nu_inv2(j) *= std::exp(normal(rng));
            compare(m, model.log_conditional_nu(m, j) - model.log_conditional_nu(s, j));
        }
        for (int g = 0; g < 3; ++g) {
            GibbsState m = s;
            m.zeta(g) = s.zeta(g) == 1.0 ? hp2.v0 : 1.0;
            compare(m, model.log_conditional_zeta(m, g) - model.log_conditional_zeta(s, g));
        }
        GibbsState m = s;
        m.w = unit(rng);
        compare(m, model.log_conditional_w(m) - model.log_conditional_w(s));
        m = s;
        m.sigma_inv2 *= std::exp(normal(rng));
        compare(m, model.log_conditional_sigma(m) - model.log_conditional_sigma(s));
    }
    const double elapsed = seconds_since(start);
    out.check(worst <= 1e-8, "conditional coherence");
    out.check(elapsed < 300.0, "runtime");
    out.detail << "posterior mean " << beta.mean() << " vs quadrature " << oracle.mean_beta << " (" << z
               << " s.e.), worst log-ratio gap " << worst << ", " << elapsed << " s";
    return out;
}

// ---- 5 ------------------------------------------------------------------

Outcome simulation_reproduction() {
    Outcome out;
    const auto start = Clock::now();

    // Reduced chains are checked against the quadrature oracle alongside the
    // full-length chains on the toy model.
    const Hyperparameters hp;
    const McmcSettings full{100000, 20000, 125}, reduced{20000, 4000, 25};
    for (double effect : {0.5, 0.0}) {
        const auto data = toy::make(effect == 0.0 ? 18 : 16, effect);
        const auto oracle = toy::quadrature(data, hp, 0.001);
        for (const auto& settings : {full, reduced}) {
            const auto draws = gibbs_fit(ResponseVector::centered(data.y, "toy"), toy::design(data), hp, settings, 505);
            const Eigen::VectorXd beta = draws.beta.col(0);
            const Eigen::VectorXd small = (beta.array().abs() <= 0.001).cast<double>();
            const bool mean_ok = std::abs(beta.mean() - oracle.mean_beta) < 3 * toy::batch_se(beta, 20);
            const bool small_ok = std::abs(small.mean() - oracle.p_small) < 3 * toy::batch_se(small, 20) + 0.01;
            out.check(mean_ok && small_ok, "toy equivalence at " + std::to_string(settings.iterations));
        }
    }

    SimScenario scenario;
    scenario.mcmc = reduced;
    const auto rows = recovery_study(scenario);
    const std::vector<double> target{1.00, 1.00, 1.00, 1.00, 0.88, 0.58, 0.50};
    out.detail << "SNR:proportion(target)";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.detail << ' ' << rows[k].snr << ':' << rows[k].proportion() << '(' << target[k] << ')';
        out.check(std::abs(rows[k].proportion() - target[k]) <= 0.15,
                  "SNR " + std::to_string(rows[k].snr).substr(0, 4));
    }
    const double elapsed = seconds_since(start);
    out.check(elapsed < 1800.0, "runtime");
    out.detail << ", " << elapsed << " s";
    return out;
}

// ---- 6 ------------------------------------------------------------------

Outcome fdr_example() {
    Outcome out;
    const auto t = fdr_threshold(std::vector<double>{0.01, 0.02, 0.10, 0.50}, 0.05);
    out.check(t.u == 3 && t.phi == 0.10, "u and phi");
    out.check(t.selected == std::vector<char>{1, 1, 0, 0}, "selected set");
    out.detail << "u " << t.u << ", phi " << t.phi << ", selected " << t.selected_count();
    return out;
}

// ---- 7 ------------------------------------------------------------------

double brute_force_score(const std::vector<double>& statistic, const std::vector<char>& member) {
    const std::size_t p = statistic.size();
    std::vector<int> rank(p);
    for (std::size_t i = 0; i < p; ++i) {
        int above = 0;
        for (std::size_t j = 0; j < p; ++j) above += statistic[j] > statistic[i];
        rank[i] = above + 1;
    }
    double total = 0.0;
    std::size_t size = 0;
    std::vector<double> t(p);
    for (std::size_t i = 0; i < p; ++i) {
        t[i] = std::abs(p / 2.0 - rank[i]);
        if (member[i]) {
            total += t[i];
            ++size;
        }
    }
    if (total == 0.0) {
        std::fill(t.begin(), t.end(), 1.0);
        total = static_cast<double>(size);
    }
    double hi = 0.0, lo = 0.0;
    for (std::size_t l = 1; l <= p; ++l) {
        double in = 0.0, miss = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            if (static_cast<std::size_t>(rank[i]) > l) continue;
            if (member[i]) in += t[i]; else miss += 1.0;
        }
        const double eta = in / total - miss / static_cast<double>(p - size);
        hi = std::max(hi, eta);
        lo = std::min(lo, eta);
    }
    return hi - lo;
}

Outcome gsva_checks() {
    Outcome out;
    const auto walk = enrichment_walk(std::vector<double>{1.5, 0.5, 0.5}, std::vector<char>{1, 0, 0}, 1.0);
    const double hand = enrichment_from_walk(walk, EnrichmentRule::difference_of_extremes);
    out.check(hand == 1.0, "hand walk");

    std::size_t instances = 0, endpoint_failures = 0;
    double worst = 0.0;
    for (std::size_t p = 2; p <= 6; ++p) {
        std::vector<double> statistic(p);
        std::iota(statistic.begin(), statistic.end(), 1.0);
        do {
            const Eigen::MatrixXd column = Eigen::Map<const Eigen::VectorXd>(statistic.data(), static_cast<Eigen::Index>(p));
            const auto ranked = rank_normalize(column);
            for (unsigned mask = 1; mask < (1u << p) - 1; ++mask) {
                if (std::popcount(mask) > 3) continue;
                std::vector<char> member(p);
                for (std::size_t i = 0; i < p; ++i) member[i] = (mask >> i) & 1u;
                std::vector<double> weights(p);
                std::vector<char> in_set(p);
                for (std::size_t r = 0; r < p; ++r) {
                    weights[r] = ranked.weight(static_cast<Eigen::Index>(r), 0);
                    in_set[r] = member[static_cast<std::size_t>(ranked.order(static_cast<Eigen::Index>(r), 0))];
                }
                const auto w = enrichment_walk(weights, in_set, 1.0);
                if (w.back() != 0.0) ++endpoint_failures;
                const double score = enrichment_score(ranked, member, 1.0, EnrichmentRule::difference_of_extremes)(0);
                worst = std::max(worst, std::abs(score - brute_force_score(statistic, member)));
                ++instances;
            }
        } while (std::next_permutation(statistic.begin(), statistic.end()));
    }
    out.check(endpoint_failures == 0, "walk endpoint");
    out.check(worst <= 1e-12, "brute force");
    out.detail << "hand walk S " << hand << ", " << instances << " instances, nonzero endpoints " << endpoint_failures
               << ", worst gap " << worst;
    return out;
}

// ---- 8 ------------------------------------------------------------------

Outcome psrf_check() {
    Outcome out;
    const auto data = toy::make(28, 0.5);
    const auto y = ResponseVector::centered(data.y, "toy");
    std::vector<PosteriorDraws> chains;
    for (int c = 0; c < 7; ++c) chains.push_back(gibbs_fit(y, toy::design(data), {}, {100000, 20000, 125}, chain_seed(808, "toy", c)));
    const auto r = psrf(chains);
    out.check(r.maxCoeff() < 1.2, "psrf");
    out.detail << "PSRF " << r.maxCoeff() << " over 7 chains of " << chains.front().size() << " draws";
    return out;
}

// ---- 9 ------------------------------------------------------------------

Outcome desk_substitutes() {
    Outcome out;
    const auto start = Clock::now();

    // Phantom pipeline reruns.
    const auto dir = fixtures::temp_dir("acceptance_phantom");
    write_phantom_inputs(dir, make_phantom_cohort({.incomplete = 2}),
                         "iterations = 20000\nburnin = 4000\nthin = 25\n");
    auto config = load_config(dir / "pipeline.cfg");
    config.out_dir = dir / "run1";
    run_pipeline(config);
    config.out_dir = dir / "run2";
    config.workers = 1;
    run_pipeline(config);
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(dir / "run1")) {
        ++files;
        const auto other = dir / "run2" / entry.path().filename();
        if (!fs::exists(other) || fixtures::read_file(entry.path()) != fixtures::read_file(other)) ++differing;
    }
    out.check(files > 0 && differing == 0, "pipeline determinism");
    out.detail << "phantom rerun " << files - differing << "/" << files << " files identical";

    // Mean-only predictors against PC predictors on a shape-driven response.
    const auto shape_outcome = shape::run(40, 400, 0.1, 42, {20000, 4000, 25});
    out.check(shape_outcome.mean_selected == 0 && shape_outcome.pc_selected >= 1, "shape fixture");
    out.detail << "; shape fixture: mean-only selects " << shape_outcome.mean_selected << ", PC scores select "
               << shape_outcome.pc_selected << " of " << shape_outcome.pc_columns;

    // v0 sensitivity.
    const SimScenario scenario;
    const auto data = simulate_group_data(scenario, 10.0, 1);
    PathwayScores scores;
    scores.sets = {"strong"};
    for (int i = 0; i < 61; ++i) scores.samples.push_back("S" + std::to_string(i));
    scores.values = data.y.transpose();
    auto design = data.design;
    design.subject_ids = scores.samples;
    PipelineConfig v0_config;
    v0_config.mcmc = {20000, 4000, 25};
    const auto v0_rows = sensitivity_v0(design, scores, v0_config, default_v0_grid());
    Eigen::MatrixXd two(1, 2);
    two << 0.3, 0.5;
    const double two_point = estimate_spread(two, 1).max_sd;
    const double flat = estimate_spread(Eigen::MatrixXd::Constant(3, 4, 0.7), 2).max_sd;
    out.check(v0_rows.front().spread.mean_sd < 0.01, "v0 MeanSD");
    out.check(std::abs(two_point - 0.1 * std::sqrt(2.0)) < 1e-15 && flat == 0.0, "spread examples");
    out.detail << "; v0 MeanSD " << v0_rows.front().spread.mean_sd << ", MaxSD " << v0_rows.front().spread.max_sd;

    // Bandwidth sensitivity on a large-sample unimodal cohort.
    auto rng = make_rng(909);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> center(0.35, 0.65), width(0.08, 0.15);
    std::vector<IntensitySample> samples;
    for (int i = 0; i < 40; ++i) {
        IntensitySample s{"S" + std::to_string(i), "T1", "ET", {}};
        const double mu = center(rng), sd = width(rng);
        for (int v = 0; v < 3000; ++v) s.values.push_back(mu + sd * normal(rng));
        samples.push_back(std::move(s));
    }
    rescale_sequence(samples);
    const std::vector<BandwidthRule> rules{BandwidthRule::parse("scott"), BandwidthRule::parse("silverman*0.75"),
                                           BandwidthRule::parse("silverman*1.25")};
    const auto distances = bandwidth_distances(samples, {}, rules, 512);
    double largest = 0.0;
    for (const auto& d : distances) largest = std::max(largest, d.distance);
    double worst_mean = 0.0;
    for (const auto& s : summarize_bandwidth_distances(distances)) worst_mean = std::max(worst_mean, s.mean);
    const std::vector<BandwidthRule> same{BandwidthRule{}};
    double same_max = 0.0;
    for (const auto& d : bandwidth_distances(samples, {}, same, 512)) same_max = std::max(same_max, d.distance);
    out.check(worst_mean < 0.15 && largest < std::numbers::pi / 2 && same_max == 0.0, "bandwidth distances");
    out.detail << "; bandwidth mean distance " << worst_mean << " (max " << largest << ", identical rules " << same_max
               << "), " << seconds_since(start) << " s";
    return out;
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"1 geometry properties", geometry_suite},
        {"2 karcher mean", karcher_suite},
        {"3 analytic distance", analytic_distance},
        {"4 gibbs correctness", gibbs_correctness},
        {"5 simulation recovery", simulation_reproduction},
        {"6 fdr worked example", fdr_example},
        {"7 gsva walk", gsva_checks},
        {"8 psrf", psrf_check},
        {"9 desk-scale substitutes", desk_substitutes},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
