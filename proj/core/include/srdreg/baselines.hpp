#pragma once

#include <span>
#include <string>
#include <vector>

#include "srdreg/config.hpp"
#include "srdreg/density_ingest.hpp"
#include "srdreg/gss_regression.hpp"
#include "srdreg/pipeline.hpp"
#include "srdreg/tangent_pca.hpp"

namespace srdreg {

/// Summary-statistic predictors grouped by (sequence, region), columns named
/// `<SEQ>_<REGION>.<feature>`.
GroupedDesignMatrix summary_design(std::span<const IntensitySample> samples, std::span<const GroupLabel> groups,
                                   std::span<const std::string> subjects, SummaryCase which);

struct BaselineResult {
    std::string label;  // "pc" or "case_<x>"
    GroupedDesignMatrix design;
    std::vector<PathwayFit> fits;
};

/// Fits every pathway with PC-score predictors and with each summary case,
/// writing associations_<label>.csv and spearman_baselines.csv.
std::vector<BaselineResult> baselines_run(const PipelineConfig& config, std::span<const SummaryCase> cases);

}  // namespace srdreg
