// Command-line front end: one subcommand per pipeline stage plus the
// simulation, diagnostic and baseline drivers.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <iostream>
#include <optional>

#include "srdreg/baselines.hpp"
#include "srdreg/config.hpp"
#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/pipeline.hpp"
#include "srdreg/selection.hpp"
#include "srdreg/sensitivity.hpp"
#include "srdreg/simulation.hpp"

namespace {

using namespace srdreg;

enum ExitCode { ok = 0, usage = 1, data_error = 2, numerical_error = 3 };

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<double> alpha;
    std::optional<double> v0;
    std::optional<int> chains;
    std::string cohort;
    std::optional<std::size_t> workers;
    std::optional<long> iterations;
    std::optional<long> burnin;
    std::optional<long> thin;
    bool quiet = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config, "Configuration file (key = value lines)");
    app->add_option("--seed", o.seed, "Master random seed");
    app->add_option("--out-dir", o.out_dir, "Output directory");
    app->add_option("--alpha", o.alpha, "FDR level");
    app->add_option("--v0", o.v0, "Spike hypervariance");
    app->add_option("--chains", o.chains, "Chains per pathway");
    app->add_option("--cohort", o.cohort, "File listing subject ids to keep");
    app->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    app->add_option("--iterations", o.iterations, "MCMC iterations");
    app->add_option("--burnin", o.burnin, "MCMC burn-in");
    app->add_option("--thin", o.thin, "MCMC thinning interval");
    app->add_flag("-q,--quiet", o.quiet, "Only log warnings and errors");
}

PipelineConfig resolve_config(const CommonOptions& o) {
    PipelineConfig c = o.config.empty() ? PipelineConfig{} : load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    if (o.alpha) c.alpha = *o.alpha;
    if (o.v0) c.hp.v0 = *o.v0;
    if (o.chains) c.chains = *o.chains;
    if (!o.cohort.empty()) c.cohort = o.cohort;
    if (o.workers) c.workers = *o.workers;
    if (o.iterations) c.mcmc.iterations = *o.iterations;
    if (o.burnin) c.mcmc.burnin = *o.burnin;
    if (o.thin) c.mcmc.thin = *o.thin;
    if (o.quiet) spdlog::set_level(spdlog::level::warn);
    c.validate();
    return c;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& field : csv::split(text, ',')) out.push_back(csv::to_double(field, "list"));
    return out;
}

std::vector<PcScores> scores_of(const std::vector<TangentPcaFit>& fits) {
    std::vector<PcScores> out;
    for (const auto& f : fits) out.push_back(f.scores);
    return out;
}

std::vector<TangentPcaFit> pcas_for(const PipelineConfig& c, const ImagingStage& imaging) {
    PcaOptions options;
    options.variance_cutoff = c.variance_cutoff;
    return fit_group_pcas(imaging.records, imaging.groups, imaging.cohort.subjects, options, c.workers);
}

void print_fits(const std::vector<PathwayFit>& fits) {
    for (const auto& f : fits) {
        std::printf("%-40s selected=%zu phi=%.4g spearman=%.3f%s", f.pathway.c_str(), f.report.selected_count(),
                    f.report.phi, f.spearman.rho, f.spearman.undefined ? " (undefined)" : "");
        if (f.psrf.size() > 0) std::printf(" max_psrf=%.3f", f.psrf.maxCoeff());
        std::printf("\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density-feature grouped spike-and-slab regression"};
    app.require_subcommand(1);

    CommonOptions common;

    auto* densities = app.add_subcommand("densities", "Estimate per-region densities from voxel intensities");
    add_common(densities, common);

    auto* pca = app.add_subcommand("pca", "Tangent PCA per (sequence, region) group");
    add_common(pca, common);

    auto* gsva_cmd = app.add_subcommand("gsva", "Pathway enrichment scores");
    add_common(gsva_cmd, common);

    std::string scores_path, groups_path, pathway_scores_path, pathway_name;
    auto* fit = app.add_subcommand("fit", "Gibbs fit of pathway scores on PC scores");
    add_common(fit, common);
    fit->add_option("--scores", scores_path, "pcscores.csv")->required();
    fit->add_option("--groups", groups_path, "pcgroups.csv")->required();
    fit->add_option("--pathway-scores", pathway_scores_path, "pathway_scores.csv")->required();
    fit->add_option("--pathway", pathway_name, "Fit only this pathway");

    std::string draws_path, select_groups;
    std::optional<double> c_threshold;
    auto* select_cmd = app.add_subcommand("select", "Bayesian FDR selection from retained draws");
    add_common(select_cmd, common);
    select_cmd->add_option("--draws", draws_path, "draws_<pathway>.csv")->required();
    select_cmd->add_option("--groups", select_groups, "pcgroups.csv for group labels");
    select_cmd->add_option("--c", c_threshold, "Local fdr threshold");

    auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
    add_common(pipeline, common);

    std::string sim_kind = "recovery", snr_list, design_source = "gaussian";
    int replications = 50;
    bool reduced = false;
    std::size_t phantom_subjects = 20, phantom_incomplete = 0;
    auto* simulate = app.add_subcommand("simulate", "Simulation studies and synthetic cohorts");
    add_common(simulate, common);
    simulate->add_option("kind", sim_kind, "recovery | cohort")->check(CLI::IsMember({"recovery", "cohort"}));
    simulate->add_option("--replications", replications, "Replications per SNR");
    simulate->add_option("--snr", snr_list, "Comma-separated SNR values");
    simulate->add_option("--design", design_source, "gaussian | density")
        ->check(CLI::IsMember({"gaussian", "density"}));
    simulate->add_flag("--reduced", reduced, "Use 20000/4000/25 chains");
    simulate->add_option("--subjects", phantom_subjects, "Synthetic cohort size");
    simulate->add_option("--incomplete", phantom_incomplete, "Synthetic subjects missing a region");

    std::string diag_kind, v0_list, rules_text = "scott,silverman*0.75,silverman*1.25";
    std::size_t k_max = 5;
    auto* diagnose = app.add_subcommand("diagnose", "Convergence and sensitivity diagnostics");
    add_common(diagnose, common);
    diagnose->add_option("kind", diag_kind, "psrf | v0 | bandwidth | loo")
        ->required()
        ->check(CLI::IsMember({"psrf", "v0", "bandwidth", "loo"}));
    diagnose->add_option("--grid", v0_list, "Comma-separated v0 values");
    diagnose->add_option("--rules", rules_text, "Bandwidth rules compared with the configured one");
    diagnose->add_option("--k-max", k_max, "Components checked by the leave-one-out diagnostic");

    std::string cases_text = "a,b,c,d,e,f,g";
    auto* baselines = app.add_subcommand("baselines", "Summary-statistic predictors versus PC scores");
    add_common(baselines, common);
    baselines->add_option("--cases", cases_text, "Comma-separated summary cases a..g");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (densities->parsed()) {
            const auto c = resolve_config(common);
            const auto imaging = prepare_imaging(c, std::nullopt);
            write_densities_csv(c.out_dir / "densities.csv", imaging.records, c.hash());
            std::printf("%zu densities for %zu subjects written to %s\n", imaging.records.size(),
                        imaging.cohort.subjects.size(), (c.out_dir / "densities.csv").string().c_str());
        } else if (pca->parsed()) {
            const auto c = resolve_config(common);
            const auto imaging = prepare_imaging(c, std::nullopt);
            const auto pcas = pcas_for(c, imaging);
            write_pc_scores(c.out_dir / "pcscores.csv", c.out_dir / "pcgroups.csv", scores_of(pcas), c.hash());
            for (const auto& p : pcas)
                std::printf("%-10s L=%zu\n", p.basis.group.name().c_str(), p.basis.size());
        } else if (gsva_cmd->parsed()) {
            const auto c = resolve_config(common);
            const auto scores = compute_pathway_scores(c);
            write_pathway_scores_csv(c.out_dir / "pathway_scores.csv", scores, c.hash());
            std::printf("%zu pathways x %zu samples\n", scores.sets.size(), scores.samples.size());
        } else if (fit->parsed()) {
            const auto c = resolve_config(common);
            auto design = read_design(scores_path, groups_path);
            if (c.standardize) design = design.standardized();
            auto scores = read_pathway_scores_csv(pathway_scores_path);
            if (!pathway_name.empty()) {
                const auto row = scores.row_for(pathway_name, scores.samples);
                scores.sets = {pathway_name};
                scores.values = row.transpose();
            }
            const auto fits = fit_pathways(design, scores, c);
            for (const auto& f : fits) write_pathway_outputs(c.out_dir, f, design, c.hash());
            write_associations_csv(c.out_dir / "associations.csv", fits, design, c.hash());
            print_fits(fits);
        } else if (select_cmd->parsed()) {
            auto c = resolve_config(common);
            if (c_threshold) c.c = *c_threshold;
            auto draws = read_draws_csv(draws_path);
            if (!select_groups.empty()) {
                const auto groups = csv::read(select_groups);
                std::map<std::string, int> group_of;
                for (const auto& row : groups.rows)
                    group_of[row[groups.column("column")]] =
                        static_cast<int>(csv::to_double(row[groups.column("group")], select_groups));
                for (const auto& name : draws.column_names) draws.group_of_column.push_back(group_of[name]);
            }
            const std::string stem = std::filesystem::path(draws_path).stem().string();
            const std::string name = stem.rfind("draws_", 0) == 0 ? stem.substr(6) : stem;
            const auto report = select(draws, c.alpha, c.c, name);
            write_selection_csv(c.out_dir / ("selection_" + name + ".csv"), report, c.hash());
            std::printf("%s: %zu selected, phi = %.4g\n", name.c_str(), report.selected_count(), report.phi);
        } else if (pipeline->parsed()) {
            const auto c = resolve_config(common);
            const auto result = run_pipeline(c);
            std::printf("cohort: %zu subjects (%zu incomplete dropped), %zu groups, %zu covariates\n",
                        result.cohort.subjects.size(), result.cohort.incomplete, result.groups.size(),
                        result.design.columns());
            print_fits(result.fits);
        } else if (simulate->parsed()) {
            const auto c = resolve_config(common);
            if (sim_kind == "cohort") {
                PhantomSpec spec;
                spec.subjects = phantom_subjects;
                spec.incomplete = phantom_incomplete;
                spec.seed = c.seed;
                write_phantom_inputs(c.out_dir, make_phantom_cohort(spec));
                std::printf("synthetic inputs written to %s\n", c.out_dir.string().c_str());
            } else {
                SimScenario s;
                s.seed = c.seed;
                s.replications = replications;
                s.hp = c.hp;
                s.mcmc = reduced ? McmcSettings{20000, 4000, 25} : c.mcmc;
                s.alpha = c.alpha;
                s.c = c.c;
                s.workers = c.workers;
                s.design = design_source == "density" ? DesignSource::density : DesignSource::gaussian;
                if (!snr_list.empty()) s.snr = parse_list(snr_list);
                const auto rows = recovery_study(s);
                write_recovery_csv(c.out_dir / "recovery.csv", rows, c.hash());
                for (const auto& r : rows) std::printf("snr=%-6g proportion=%.2f\n", r.snr, r.proportion());
            }
        } else if (diagnose->parsed()) {
            auto c = resolve_config(common);
            const std::string hash = c.hash();
            if (diag_kind == "psrf") {
                if (c.chains < 2) c.chains = 7;
                const auto result = run_pipeline(c);
                print_fits(result.fits);
            } else if (diag_kind == "v0") {
                const auto scores = compute_pathway_scores(c);
                const auto imaging = prepare_imaging(c, scores.samples);
                auto design = assemble_design(scores_of(pcas_for(c, imaging)));
                if (c.standardize) design = design.standardized();
                const auto grid = v0_list.empty() ? default_v0_grid() : parse_list(v0_list);
                const auto rows = sensitivity_v0(design, scores, c, grid);
                write_v0_sensitivity_csv(c.out_dir / "sensitivity_v0.csv", rows, hash);
                for (const auto& r : rows)
                    std::printf("%-40s mean_sd=%.4g max_sd=%.4g\n", r.pathway.c_str(), r.spread.mean_sd,
                                r.spread.max_sd);
            } else if (diag_kind == "bandwidth") {
                PipelineConfig imaging_config = c;
                imaging_config.densities.clear();
                const auto imaging = prepare_imaging(imaging_config, std::nullopt);
                std::vector<BandwidthRule> rules;
                for (const auto& r : csv::split(rules_text, ',')) rules.push_back(BandwidthRule::parse(r));
                const auto distances =
                    bandwidth_distances(imaging.samples, c.bandwidth, rules, c.grid_size, c.workers);
                const auto summary = summarize_bandwidth_distances(distances);
                write_bandwidth_csv(c.out_dir / "sensitivity_bandwidth.csv", summary, hash);
                for (const auto& r : summary)
                    std::printf("%-6s %-4s %-18s mean=%.4f sd=%.4f\n", r.sequence.c_str(), r.region.c_str(),
                                r.rule.c_str(), r.mean, r.sd);
            } else {
                const auto imaging = prepare_imaging(c, std::nullopt);
                PcaOptions options;
                options.variance_cutoff = c.variance_cutoff;
                std::map<std::string, std::vector<SquareRootDensity>> by_group;
                for (const auto& g : imaging.groups) by_group[g.name()];
                for (const auto& subject : imaging.cohort.subjects)
                    for (const auto& r : imaging.records)
                        if (r.subject_id == subject) by_group[r.sequence + "_" + r.region].push_back(to_srd(r.density));
                for (const auto& g : imaging.groups) {
                    const auto d = loo_basis_stability(by_group[g.name()], k_max, options);
                    write_loo_csv(c.out_dir / ("loo_" + g.name() + ".csv"), g.name(), d, imaging.cohort.subjects,
                                  hash);
                    std::printf("%-10s components=%ld max_distance=%.4f\n", g.name().c_str(),
                                static_cast<long>(d.rows()), d.size() ? d.maxCoeff() : 0.0);
                }
            }
        } else if (baselines->parsed()) {
            const auto c = resolve_config(common);
            std::vector<SummaryCase> cases;
            for (const auto& field : csv::split(cases_text, ',')) cases.push_back(parse_summary_case(field));
            const auto results = baselines_run(c, cases);
            for (const auto& r : results) {
                std::size_t with_selection = 0;
                for (const auto& f : r.fits) with_selection += f.report.selected_count() > 0 ? 1 : 0;
                std::printf("%-8s covariates=%zu pathways_with_selection=%zu\n", r.label.c_str(), r.design.columns(),
                            with_selection);
            }
        }
    } catch (const DataError& e) {
        spdlog::error("{}", e.what());
        return data_error;
    } catch (const NumericalError& e) {
        spdlog::error("{}", e.what());
        return numerical_error;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return data_error;
    }
    return ok;
}
