#include "srdreg/baselines.hpp"

#include <map>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"

namespace srdreg {

GroupedDesignMatrix summary_design(std::span<const IntensitySample> samples, std::span<const GroupLabel> groups,
                                   std::span<const std::string> subjects, SummaryCase which) {
    std::map<std::pair<std::string, std::string>, const IntensitySample*> index;
    for (const auto& s : samples) index[{s.subject_id, s.sequence + "_" + s.region}] = &s;

    const auto features = summary_feature_names(which);
    const auto width = static_cast<Eigen::Index>(features.size());
    GroupedDesignMatrix d;
    d.subject_ids.assign(subjects.begin(), subjects.end());
    d.X.resize(static_cast<Eigen::Index>(subjects.size()), width * static_cast<Eigen::Index>(groups.size()));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto name = groups[g].name();
        d.group_names.push_back(name);
        for (const auto& f : features) {
            d.column_names.push_back(name + "." + f);
            d.group_of_column.push_back(static_cast<int>(g + 1));
        }
        for (std::size_t i = 0; i < subjects.size(); ++i) {
            const auto it = index.find({subjects[i], name});
            if (it == index.end()) throw DataError("no intensities for " + subjects[i] + " in " + name);
            const auto values = summary_features(it->second->values, which);
            for (Eigen::Index k = 0; k < width; ++k)
                d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g) * width + k) =
                    values[static_cast<std::size_t>(k)];
        }
    }
    d.validate();
    return d;
}

std::vector<BaselineResult> baselines_run(const PipelineConfig& config, std::span<const SummaryCase> cases) {
    config.validate();
    if (!config.densities.empty() && config.voxels.empty() && config.volumes.empty())
        throw DataError("baselines need voxel intensities (voxels or volumes), not densities alone");
    const std::string hash = config.hash();
    std::filesystem::create_directories(config.out_dir);

    const auto scores = compute_pathway_scores(config);
    PipelineConfig imaging_config = config;
    imaging_config.densities.clear();
    const auto imaging = prepare_imaging(imaging_config, scores.samples);

    std::vector<BaselineResult> out;
    {
        PcaOptions options;
        options.variance_cutoff = config.variance_cutoff;
        const auto pcas =
            fit_group_pcas(imaging.records, imaging.groups, imaging.cohort.subjects, options, config.workers);
        std::vector<PcScores> pc;
        for (const auto& p : pcas) pc.push_back(p.scores);
        auto design = assemble_design(pc);
        out.push_back({"pc", config.standardize ? design.standardized() : design, {}});
    }
    for (SummaryCase c : cases) {
        auto design = summary_design(imaging.samples, imaging.groups, imaging.cohort.subjects, c);
        out.push_back({std::string("case_") + to_char(c), config.standardize ? design.standardized() : design, {}});
    }

    auto spearman_out = csv::open_output(config.out_dir / "spearman_baselines.csv");
    csv::write_hash_comment(spearman_out, hash);
    spearman_out << "predictors,pathway,rho,undefined,selected\n";
    for (auto& result : out) {
        result.fits = fit_pathways(result.design, scores, config);
        write_associations_csv(config.out_dir / ("associations_" + result.label + ".csv"), result.fits, result.design,
                               hash);
        for (const auto& fit : result.fits)
            spearman_out << result.label << ',' << fit.pathway << ',' << csv::format(fit.spearman.rho) << ','
                         << (fit.spearman.undefined ? 1 : 0) << ',' << fit.report.selected_count() << '\n';
    }
    return out;
}

}  // namespace srdreg
