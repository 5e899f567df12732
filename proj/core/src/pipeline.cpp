#include "srdreg/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/parallel.hpp"
#include "srdreg/random.hpp"

namespace srdreg {

namespace {

template <class F>
auto run_stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string("stage ") + name + ": " + e.what(), e.last_gradient_norm());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("stage ") + name + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(std::string("stage ") + name + ": " + e.what());
    }
}

std::string group_key(const std::string& sequence, const std::string& region) { return sequence + "_" + region; }

std::vector<GroupLabel> order_groups(const std::set<std::string>& sequences, const std::set<std::string>& regions,
                                     const std::set<std::pair<std::string, std::string>>& seen) {
    std::vector<GroupLabel> out;
    for (const auto& s : canonical_order({sequences.begin(), sequences.end()}, known_sequences()))
        for (const auto& r : canonical_order({regions.begin(), regions.end()}, known_regions()))
            if (seen.contains({s, r})) out.push_back({s, r});
    return out;
}

}  // namespace

std::vector<IntensitySample> load_intensity_samples(const PipelineConfig& config) {
    if (!config.voxels.empty()) return read_voxels_csv(config.voxels);
    if (config.volumes.empty()) throw DataError("config names neither voxels nor volumes");

    const auto manifest = csv::read(config.volumes);
    const auto base = config.volumes.parent_path();
    const auto c_subject = manifest.column("subject_id");
    const auto c_sequence = manifest.column("sequence");
    const auto c_volume = manifest.column("volume");
    const auto c_mask = manifest.column("mask");
    const auto labels = LabelMap::parse(config.label_map);
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };

    std::vector<IntensitySample> out;
    for (const auto& row : manifest.rows) {
        const auto volume = read_raw_volume(resolve(row[c_volume]));
        const auto mask = read_raw_mask(resolve(row[c_mask]));
        auto regions = extract_region_intensities(volume, mask, labels);
        for (const auto& absent : regions.absent)
            spdlog::info("subject {} {}: region {} absent", row[c_subject], row[c_sequence], absent);
        for (auto& [region, values] : regions.present)
            out.push_back({row[c_subject], row[c_sequence], region, std::move(values)});
    }
    return out;
}

std::vector<GroupLabel> observed_groups(std::span<const IntensitySample> samples) {
    std::set<std::string> sequences, regions;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& s : samples) {
        sequences.insert(s.sequence);
        regions.insert(s.region);
        seen.insert({s.sequence, s.region});
    }
    return order_groups(sequences, regions, seen);
}

std::vector<GroupLabel> observed_groups(std::span<const DensityRecord> records) {
    std::set<std::string> sequences, regions;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : records) {
        sequences.insert(r.sequence);
        regions.insert(r.region);
        seen.insert({r.sequence, r.region});
    }
    return order_groups(sequences, regions, seen);
}

CohortSelection select_cohort(const std::set<std::string>& subjects,
                              const std::set<std::pair<std::string, std::string>>& available,
                              std::span<const GroupLabel> groups,
                              const std::optional<std::vector<std::string>>& expression_samples,
                              const std::optional<std::vector<std::string>>& filter) {
    CohortSelection out;
    const std::set<std::string> expressed = expression_samples
                                                ? std::set<std::string>(expression_samples->begin(),
                                                                        expression_samples->end())
                                                : std::set<std::string>{};
    const std::set<std::string> allowed = filter ? std::set<std::string>(filter->begin(), filter->end())
                                                 : std::set<std::string>{};
    for (const auto& subject : subjects) {
        const bool complete = std::all_of(groups.begin(), groups.end(), [&](const GroupLabel& g) {
            return available.contains({subject, g.name()});
        });
        if (!complete) {
            ++out.incomplete;
            continue;
        }
        if (expression_samples && !expressed.contains(subject)) {
            ++out.without_expression;
            continue;
        }
        if (filter && !allowed.contains(subject)) {
            ++out.filtered_out;
            continue;
        }
        out.subjects.push_back(subject);
    }
    return out;
}

std::vector<DensityRecord> estimate_densities(std::vector<IntensitySample> samples,
                                              std::span<const std::string> subjects, std::size_t m,
                                              const BandwidthRule& rule, std::size_t workers) {
    const std::set<std::string> keep(subjects.begin(), subjects.end());
    std::erase_if(samples, [&](const IntensitySample& s) { return !keep.contains(s.subject_id); });

    std::map<std::string, std::vector<IntensitySample>> by_sequence;
    for (auto& s : samples) by_sequence[s.sequence].push_back(std::move(s));

    std::vector<IntensitySample> rescaled;
    for (auto& [sequence, group] : by_sequence) {
        try {
            rescale_sequence(group);
        } catch (const DataError& e) {
            throw DataError("sequence " + sequence + ": " + e.what());
        }
        for (auto& s : group) rescaled.push_back(std::move(s));
    }
    std::sort(rescaled.begin(), rescaled.end(), [](const IntensitySample& a, const IntensitySample& b) {
        return std::tie(a.subject_id, a.sequence, a.region) < std::tie(b.subject_id, b.sequence, b.region);
    });

    std::vector<DensityRecord> out(rescaled.size());
    parallel_for(rescaled.size(), workers, [&](std::size_t i) {
        const auto& s = rescaled[i];
        out[i] = {s.subject_id, s.sequence, s.region, kde(s.values, m, rule)};
    });
    return out;
}

std::vector<TangentPcaFit> fit_group_pcas(std::span<const DensityRecord> records, std::span<const GroupLabel> groups,
                                          std::span<const std::string> subjects, const PcaOptions& options,
                                          std::size_t workers) {
    std::map<std::pair<std::string, std::string>, const DensityRecord*> index;
    for (const auto& r : records) index[{r.subject_id, group_key(r.sequence, r.region)}] = &r;

    std::vector<TangentPcaFit> out(groups.size());
    parallel_for(groups.size(), workers, [&](std::size_t g) {
        std::vector<SquareRootDensity> srds;
        srds.reserve(subjects.size());
        for (const auto& subject : subjects) {
            const auto it = index.find({subject, groups[g].name()});
            if (it == index.end()) throw DataError("no density for " + subject + " in " + groups[g].name());
            srds.push_back(to_srd(it->second->density));
        }
        out[g] = fit_pca(srds, {subjects.begin(), subjects.end()}, groups[g], options);
    });
    return out;
}

PathwayScores compute_pathway_scores(const PipelineConfig& config) {
    if (config.expression.empty() || config.genesets.empty())
        throw DataError("config needs expression and genesets for pathway scores");
    auto expression = read_expression_csv(config.expression);
    if (!config.cohort.empty()) {
        const auto filter = read_subject_list(config.cohort);
        const std::set<std::string> allowed(filter.begin(), filter.end());
        std::vector<std::string> keep;
        for (const auto& s : expression.samples)
            if (allowed.count(s)) keep.push_back(s);
        if (keep.empty()) throw DataError("cohort filter keeps no expression samples");
        expression = expression.select_samples(keep);
    }
    const auto sets = read_gmt(config.genesets);
    return gsva(expression, sets, {config.tau, config.enrichment});
}

std::uint64_t chain_seed(std::uint64_t master, const std::string& pathway, int chain) {
    return derive_seed(derive_seed(master, fnv1a(pathway)), static_cast<std::uint64_t>(chain));
}

std::vector<PathwayFit> fit_pathways(const GroupedDesignMatrix& design, const PathwayScores& scores,
                                     const PipelineConfig& config) {
    const std::size_t P = scores.sets.size();
    const auto chains = static_cast<std::size_t>(config.chains);
    std::vector<PathwayFit> fits(P);
    std::vector<ResponseVector> responses;
    for (std::size_t k = 0; k < P; ++k) {
        fits[k].pathway = scores.sets[k];
        fits[k].chains.resize(chains);
        responses.push_back(ResponseVector::centered(scores.row_for(scores.sets[k], design.subject_ids), scores.sets[k]));
    }

    parallel_for(P * chains, config.workers, [&](std::size_t task) {
        const std::size_t k = task / chains;
        const int chain = static_cast<int>(task % chains);
        fits[k].chains[static_cast<std::size_t>(chain)] =
            gibbs_fit(responses[k], design, config.hp, config.mcmc, chain_seed(config.seed, fits[k].pathway, chain));
    });

    for (std::size_t k = 0; k < P; ++k) {
        auto& fit = fits[k];
        fit.pooled = pool_draws(fit.chains);
        if (chains > 1) fit.psrf = psrf(fit.chains);
        fit.report = select(fit.pooled, config.alpha, config.c, fit.pathway);
        fit.intercept = responses[k].intercept;
        fit.observed = responses[k].y.array() + fit.intercept;
        fit.fitted = (design.X * fit.report.beta_post).array() + fit.intercept;
        fit.spearman = spearman_fit(fit.observed, design.X, fit.report.beta_post);
        spdlog::info("pathway {}: {} selected (phi = {:.4g}), spearman {:.3f}", fit.pathway,
                     fit.report.selected_count(), fit.report.phi, fit.spearman.rho);
    }
    return fits;
}

void write_pathway_outputs(const std::filesystem::path& dir, const PathwayFit& fit, const GroupedDesignMatrix& design,
                           const std::string& config_hash) {
    const std::string name = sanitize_name(fit.pathway);
    write_draws_csv(dir / ("draws_" + name + ".csv"), fit.pooled, design.group_count(), config_hash);
    write_selection_csv(dir / ("selection_" + name + ".csv"), fit.report, config_hash);
    write_fitplot_csv(dir / ("fitplot_" + name + ".csv"), design.subject_ids, fit.observed, fit.fitted, config_hash);
    if (fit.psrf.size() > 0) {
        auto out = csv::open_output(dir / ("psrf_" + name + ".csv"));
        csv::write_hash_comment(out, config_hash);
        out << "column,psrf\n";
        for (Eigen::Index j = 0; j < fit.psrf.size(); ++j)
            out << design.column_names[static_cast<std::size_t>(j)] << ',' << csv::format(fit.psrf(j)) << '\n';
    }
}

void write_associations_csv(const std::filesystem::path& path, std::span<const PathwayFit> fits,
                            const GroupedDesignMatrix& design, const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << "pathway";
    for (const auto& name : design.column_names) out << ',' << name;
    out << '\n';
    for (const auto& fit : fits) {
        if (fit.report.selected_count() == 0) continue;
        out << fit.pathway;
        for (Eigen::Index j = 0; j < fit.report.beta_post.size(); ++j) out << ',' << csv::format(fit.report.beta_post(j));
        out << '\n';
    }
}

void write_spearman_csv(const std::filesystem::path& path, std::span<const PathwayFit> fits,
                        const std::string& config_hash, const std::string& label) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    out << (label.empty() ? "" : "predictors,") << "pathway,rho,undefined,selected\n";
    for (const auto& fit : fits) {
        if (!label.empty()) out << label << ',';
        out << fit.pathway << ',' << csv::format(fit.spearman.rho) << ',' << (fit.spearman.undefined ? 1 : 0) << ','
            << fit.report.selected_count() << '\n';
    }
}

ImagingStage prepare_imaging(const PipelineConfig& config,
                             const std::optional<std::vector<std::string>>& expression_samples) {
    ImagingStage stage;
    std::optional<std::vector<std::string>> filter;
    if (!config.cohort.empty()) filter = read_subject_list(config.cohort);

    std::set<std::string> subjects;
    std::set<std::pair<std::string, std::string>> available;
    if (!config.densities.empty()) {
        auto records = read_densities_csv(config.densities);
        stage.groups = observed_groups(records);
        for (const auto& r : records) {
            subjects.insert(r.subject_id);
            available.insert({r.subject_id, group_key(r.sequence, r.region)});
        }
        stage.cohort = select_cohort(subjects, available, stage.groups, expression_samples, filter);
        const std::set<std::string> keep(stage.cohort.subjects.begin(), stage.cohort.subjects.end());
        std::erase_if(records, [&](const DensityRecord& r) { return !keep.contains(r.subject_id); });
        stage.records = std::move(records);
    } else {
        auto samples = load_intensity_samples(config);
        std::erase_if(samples, [](const IntensitySample& s) { return s.values.size() < 2; });
        stage.groups = observed_groups(samples);
        for (const auto& s : samples) {
            subjects.insert(s.subject_id);
            available.insert({s.subject_id, group_key(s.sequence, s.region)});
        }
        stage.cohort = select_cohort(subjects, available, stage.groups, expression_samples, filter);
        stage.records = estimate_densities(samples, stage.cohort.subjects, config.grid_size, config.bandwidth,
                                           config.workers);

        // Keep the rescaled intensities for summary-statistic predictors.
        const std::set<std::string> keep(stage.cohort.subjects.begin(), stage.cohort.subjects.end());
        std::erase_if(samples, [&](const IntensitySample& s) { return !keep.contains(s.subject_id); });
        std::map<std::string, std::vector<IntensitySample*>> by_sequence;
        for (auto& s : samples) by_sequence[s.sequence].push_back(&s);
        for (auto& [sequence, group] : by_sequence) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto* s : group)
                for (double v : s->values) lo = std::min(lo, v), hi = std::max(hi, v);
            for (auto* s : group)
                for (double& v : s->values) v = (v - lo) / (hi - lo);
        }
        stage.samples = std::move(samples);
    }
    if (stage.cohort.incomplete > 0)
        spdlog::warn("dropped {} subject(s) lacking a (sequence, region) sample", stage.cohort.incomplete);
    if (stage.cohort.without_expression > 0)
        spdlog::warn("dropped {} subject(s) without expression data", stage.cohort.without_expression);
    if (stage.cohort.filtered_out > 0)
        spdlog::info("cohort filter excluded {} subject(s)", stage.cohort.filtered_out);
    return stage;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    config.validate();
    const std::string hash = config.hash();
    const auto& dir = config.out_dir;
    std::filesystem::create_directories(dir);
    PipelineResult result;

    result.pathway_scores = run_stage("gsva", [&] {
        auto scores = compute_pathway_scores(config);
        write_pathway_scores_csv(dir / "pathway_scores.csv", scores, hash);
        return scores;
    });

    auto imaging = run_stage("densities", [&] {
        auto stage = prepare_imaging(config, result.pathway_scores.samples);
        write_densities_csv(dir / "densities.csv", stage.records, hash);
        return stage;
    });
    result.cohort = imaging.cohort;
    result.groups = imaging.groups;

    result.pcas = run_stage("pca", [&] {
        PcaOptions options;
        options.variance_cutoff = config.variance_cutoff;
        auto pcas = fit_group_pcas(imaging.records, imaging.groups, imaging.cohort.subjects, options, config.workers);
        std::vector<PcScores> scores;
        for (const auto& p : pcas) scores.push_back(p.scores);
        write_pc_scores(dir / "pcscores.csv", dir / "pcgroups.csv", scores, hash);
        return pcas;
    });

    result.design = run_stage("design", [&] {
        std::vector<PcScores> scores;
        for (const auto& p : result.pcas) scores.push_back(p.scores);
        auto design = assemble_design(scores);
        return config.standardize ? design.standardized() : design;
    });

    result.fits = run_stage("fit", [&] { return fit_pathways(result.design, result.pathway_scores, config); });

    run_stage("select", [&] {
        for (const auto& fit : result.fits) write_pathway_outputs(dir, fit, result.design, hash);
        write_associations_csv(dir / "associations.csv", result.fits, result.design, hash);
        write_spearman_csv(dir / "spearman.csv", result.fits, hash);
        return 0;
    });
    return result;
}

}  // namespace srdreg
