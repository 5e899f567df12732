#include "srdreg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/grid.hpp"
#include "srdreg/parallel.hpp"
#include "srdreg/random.hpp"
#include "srdreg/sphere_geometry.hpp"
#include "srdreg/tangent_pca.hpp"

namespace srdreg {

void SimScenario::validate() const {
    if (group_sizes.size() < 2 || std::any_of(group_sizes.begin(), group_sizes.end(), [](int s) { return s < 1; }))
        throw DataError("simulation needs at least two non-empty groups");
    if (n < 3) throw DataError("simulation needs n >= 3");
    if (snr.empty() || std::any_of(snr.begin(), snr.end(), [](double s) { return !(s > 0.0); }))
        throw DataError("SNR values must be positive");
    if (replications < 1) throw DataError("replications must be at least 1");
    if (!(theta > 0.0)) throw DataError("theta must be positive");
    hp.validate();
    mcmc.validate();
}

namespace {

Eigen::VectorXd normal_mixture_on_grid(std::span<const double> weights, std::span<const double> means,
                                       std::span<const double> sds, std::size_t m) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const double x = grid_point(i, m);
        double acc = 0.0;
        for (std::size_t c = 0; c < weights.size(); ++c) {
            const double z = (x - means[c]) / sds[c];
            acc += weights[c] * std::exp(-0.5 * z * z) / sds[c];
        }
        f(static_cast<Eigen::Index>(i)) = acc;
    }
    return f / trapezoid(f);
}

GroupedDesignMatrix gaussian_design(const SimScenario& s, Rng& rng) {
    GroupedDesignMatrix d;
    const int L = std::accumulate(s.group_sizes.begin(), s.group_sizes.end(), 0);
    d.X.resize(static_cast<Eigen::Index>(s.n), L);
    std::normal_distribution<double> normal;
    for (Eigen::Index j = 0; j < d.X.cols(); ++j)
        for (Eigen::Index i = 0; i < d.X.rows(); ++i) d.X(i, j) = normal(rng);
    return d;
}

GroupedDesignMatrix density_design(const SimScenario& s, std::uint64_t seed) {
    GroupedDesignMatrix d;
    const int L = std::accumulate(s.group_sizes.begin(), s.group_sizes.end(), 0);
    d.X.resize(static_cast<Eigen::Index>(s.n), L);
    Eigen::Index at = 0;
    for (std::size_t g = 0; g < s.group_sizes.size(); ++g) {
        const auto densities = mixture_density_cohort(s.n, default_grid_size, derive_seed(seed, g));
        std::vector<SquareRootDensity> srds;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < densities.size(); ++i) {
            srds.push_back(to_srd(densities[i]));
            ids.push_back("s" + std::to_string(i + 1));
        }
        PcaOptions options;
        options.variance_cutoff = 1.0;
        const auto fit = fit_pca(srds, ids, {}, options);
        const int need = s.group_sizes[g];
        if (fit.scores.values.cols() < need)
            throw DataError("synthetic density cohort yields fewer PCs than the group size");
        d.X.middleCols(at, need) = fit.scores.values.leftCols(need);
        at += need;
    }
    return d;
}

}  // namespace

GroupedDesignMatrix simulation_design(const SimScenario& s) {
    s.validate();
    const std::uint64_t seed = derive_seed(s.seed, fnv1a("design"));
    GroupedDesignMatrix d;
    if (s.design == DesignSource::gaussian) {
        auto rng = make_rng(seed);
        d = gaussian_design(s, rng);
    } else {
        d = density_design(s, seed);
    }
    for (std::size_t g = 0; g < s.group_sizes.size(); ++g) {
        d.group_names.push_back("G" + std::to_string(g + 1));
        for (int k = 1; k <= s.group_sizes[g]; ++k) {
            d.group_of_column.push_back(static_cast<int>(g + 1));
            d.column_names.push_back(d.group_names.back() + "." + std::to_string(k));
        }
    }
    for (std::size_t i = 0; i < s.n; ++i) d.subject_ids.push_back("s" + std::to_string(i + 1));
    d.validate();
    return d.standardized();
}

SimulatedData simulate_group_data(const SimScenario& s, const GroupedDesignMatrix& design, double snr,
                                  std::uint64_t rep_seed) {
    if (!(snr > 0.0)) throw DataError("SNR must be positive");
    auto rng = make_rng(rep_seed);
    SimulatedData out;
    out.design = design;
    out.sigma = s.theta / snr;
    out.beta_true = Eigen::VectorXd::Zero(design.X.cols());
    // Laplace(theta) as the difference of two exponentials with mean theta.
    std::exponential_distribution<double> exponential(1.0 / s.theta);
    const int first = s.group_sizes[0];
    for (int k = 0; k < first; ++k) out.beta_true(k) = exponential(rng) - exponential(rng);
    out.beta_true(first) = 1.0;
    std::normal_distribution<double> normal;
    Eigen::VectorXd noise(design.X.rows());
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = normal(rng);
    out.y = design.X * out.beta_true + out.sigma * noise;
    return out;
}

SimulatedData simulate_group_data(const SimScenario& s, double snr, std::uint64_t rep_seed) {
    return simulate_group_data(s, simulation_design(s), snr, rep_seed);
}

bool recovery_success(const SelectionReport& report, const GroupedDesignMatrix& design) {
    bool group_one = false;
    std::size_t first_of_two = design.columns();
    for (std::size_t j = 0; j < design.columns(); ++j) {
        if (design.group_of_column[j] == 1 && report.selected[j]) group_one = true;
        if (design.group_of_column[j] == 2 && first_of_two == design.columns()) first_of_two = j;
    }
    return group_one && first_of_two < design.columns() && report.selected[first_of_two];
}

std::vector<RecoveryRow> recovery_study(const SimScenario& s) {
    const auto design = simulation_design(s);
    const std::size_t R = static_cast<std::size_t>(s.replications);
    const std::size_t tasks = s.snr.size() * R;
    std::vector<char> success(tasks, 0);
    parallel_for(tasks, s.workers, [&](std::size_t t) {
        const std::size_t level = t / R;
        const auto r = static_cast<std::uint64_t>(t % R);
        const std::uint64_t rep_seed = s.seed ^ r;
        const auto data = simulate_group_data(s, design, s.snr[level], rep_seed);
        const auto response = ResponseVector::centered(data.y, "snr=" + csv::format(s.snr[level]));
        const auto draws = gibbs_fit(response, design, s.hp, s.mcmc, derive_seed(rep_seed, fnv1a(response.pathway)));
        success[t] = recovery_success(select(draws, s.alpha, s.c), design) ? 1 : 0;
    });
    std::vector<RecoveryRow> rows;
    for (std::size_t level = 0; level < s.snr.size(); ++level) {
        RecoveryRow row{s.snr[level], 0, s.replications};
        for (std::size_t r = 0; r < R; ++r) row.successes += success[level * R + r];
        rows.push_back(row);
    }
    return rows;
}

void write_recovery_csv(const std::filesystem::path& path, std::span<const RecoveryRow> rows,
                        const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "snr,successes,replications,proportion\n";
    for (const auto& r : rows)
        out << csv::format(r.snr) << ',' << r.successes << ',' << r.replications << ',' << csv::format(r.proportion())
            << '\n';
}

std::vector<DensityGrid> unimodal_density_cohort(std::size_t n, std::size_t m, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> center(0.35, 0.65);
    std::uniform_real_distribution<double> width(0.08, 0.15);
    std::vector<DensityGrid> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double w[] = {1.0};
        const double mu[] = {center(rng)};
        const double sd[] = {width(rng)};
        out.push_back({normal_mixture_on_grid(w, mu, sd, m), sd[0]});
    }
    return out;
}

std::vector<DensityGrid> mixture_density_cohort(std::size_t n, std::size_t m, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> center(0.15, 0.85);
    std::uniform_real_distribution<double> width(0.04, 0.15);
    std::uniform_real_distribution<double> weight(0.2, 1.0);
    std::vector<DensityGrid> out;
    for (std::size_t i = 0; i < n; ++i) {
        double w[3], mu[3], sd[3];
        for (int c = 0; c < 3; ++c) {
            w[c] = weight(rng);
            mu[c] = center(rng);
            sd[c] = width(rng);
        }
        out.push_back({normal_mixture_on_grid(w, mu, sd, m), sd[0]});
    }
    return out;
}

PhantomCohort make_phantom_cohort(const PhantomSpec& spec) {
    if (spec.subjects < 3) throw DataError("phantom cohort needs at least 3 subjects");
    if (spec.sequences.empty() || spec.regions.empty()) throw DataError("phantom cohort needs sequences and regions");
    if (spec.pathways * spec.genes_per_pathway > spec.genes || spec.genes_per_pathway < 1)
        throw DataError("phantom gene sets do not fit in the gene count");

    auto rng = make_rng(spec.seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    PhantomCohort cohort;
    cohort.latent.resize(static_cast<Eigen::Index>(spec.subjects));

    for (std::size_t i = 0; i < spec.subjects; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "P%03zu", i + 1);
        cohort.subject_ids.emplace_back(id);
        cohort.latent(static_cast<Eigen::Index>(i)) = normal(rng);
    }

    for (std::size_t i = 0; i < spec.subjects; ++i) {
        const double z = cohort.latent(static_cast<Eigen::Index>(i));
        const bool incomplete = i >= spec.subjects - spec.incomplete;
        for (std::size_t s = 0; s < spec.sequences.size(); ++s) {
            for (std::size_t r = 0; r < spec.regions.size(); ++r) {
                if (incomplete && r + 1 == spec.regions.size()) continue;
                IntensitySample sample{cohort.subject_ids[i], spec.sequences[s], spec.regions[r], {}};
                const double base = 200.0 + 150.0 * static_cast<double>(r) + 40.0 * static_cast<double>(s);
                const double shift = 15.0 * normal(rng);
                const double spread = 25.0 + 5.0 * uniform(rng);
                // The latent moves mass into a bright second mode in the
                // first sequence's last region.
                const bool driven = s == 0 && r + 1 == spec.regions.size();
                const double second = driven ? 1.0 / (1.0 + std::exp(-1.5 * z)) * 0.6 : 0.1 * uniform(rng);
                for (std::size_t v = 0; v < spec.voxels; ++v) {
                    const bool bright = uniform(rng) < second;
                    const double x = base + shift + (bright ? 90.0 : 0.0) + spread * normal(rng);
                    sample.values.push_back(std::max(0.0, x));
                }
                cohort.samples.push_back(std::move(sample));
            }
        }
    }

    auto& e = cohort.expression;
    for (std::size_t g = 0; g < spec.genes; ++g) e.genes.push_back("GENE" + std::to_string(g + 1));
    e.samples = cohort.subject_ids;
    e.values.resize(static_cast<Eigen::Index>(spec.genes), static_cast<Eigen::Index>(spec.subjects));
    for (std::size_t g = 0; g < spec.genes; ++g) {
        const double level = 6.0 + 4.0 * uniform(rng);
        const bool driven = g < spec.genes_per_pathway;
        for (std::size_t i = 0; i < spec.subjects; ++i) {
            const double z = cohort.latent(static_cast<Eigen::Index>(i));
            e.values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(i)) =
                level + (driven ? spec.signal * z : 0.0) + 0.5 * normal(rng);
        }
    }
    for (std::size_t k = 0; k < spec.pathways; ++k) {
        GeneSet set{"PATHWAY_" + std::to_string(k + 1), "synthetic", {}};
        for (std::size_t j = 0; j < spec.genes_per_pathway; ++j)
            set.genes.push_back(e.genes[k * spec.genes_per_pathway + j]);
        cohort.gene_sets.push_back(std::move(set));
    }
    return cohort;
}

void write_phantom_inputs(const std::filesystem::path& dir, const PhantomCohort& cohort,
                          const std::string& extra_config) {
    std::filesystem::create_directories(dir);
    write_voxels_csv(dir / "voxels.csv", cohort.samples);
    write_expression_csv(dir / "expression.csv", cohort.expression);
    write_gmt(dir / "genesets.gmt", cohort.gene_sets);
    auto out = csv::open_output(dir / "pipeline.cfg");
    out << "voxels = voxels.csv\n"
        << "expression = expression.csv\n"
        << "genesets = genesets.gmt\n"
        << "out_dir = out\n"
        << extra_config;
}

ShapeSignalFixture shape_signal_fixture(std::size_t n, std::size_t voxels, double noise, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    ShapeSignalFixture f;
    f.separation.resize(static_cast<Eigen::Index>(n));
    f.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "S%03zu", i + 1);
        f.subject_ids.emplace_back(id);
        const double d = 0.05 + 0.2 * uniform(rng);
        f.separation(static_cast<Eigen::Index>(i)) = d;
        IntensitySample sample{id, "T1", "ET", {}};
        for (std::size_t v = 0; v < voxels; ++v) {
            const double center = uniform(rng) < 0.5 ? 0.5 - d : 0.5 + d;
            sample.values.push_back(std::clamp(center + 0.05 * normal(rng), 0.0, 1.0));
        }
        f.samples.push_back(std::move(sample));
    }
    const double mean_d = f.separation.mean();
    for (Eigen::Index i = 0; i < f.y.size(); ++i) f.y(i) = 10.0 * (f.separation(i) - mean_d) + noise * normal(rng);
    return f;
}

}  // namespace srdreg
