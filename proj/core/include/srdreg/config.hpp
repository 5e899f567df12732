#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srdreg/density_ingest.hpp"
#include "srdreg/gss_regression.hpp"
#include "srdreg/gsva.hpp"

namespace srdreg {

/// Flat key=value configuration shared by every subcommand. Relative paths
/// are resolved against the directory of the config file.
struct PipelineConfig {
    std::filesystem::path voxels;     // long-form voxels.csv
    std::filesystem::path volumes;    // manifest: subject_id,sequence,volume,mask
    std::filesystem::path densities;  // precomputed densities.csv (skips KDE)
    std::filesystem::path expression;
    std::filesystem::path genesets;
    std::filesystem::path cohort;     // subject-id list, one per line
    std::filesystem::path out_dir = "out";

    std::size_t grid_size = default_grid_size;
    BandwidthRule bandwidth{};
    std::string label_map = "1:NC,2:ED,4:ET";
    double variance_cutoff = 0.9999;
    bool standardize = false;

    double tau = 1.0;
    EnrichmentRule enrichment = EnrichmentRule::difference_of_extremes;

    Hyperparameters hp{};
    McmcSettings mcmc{};
    std::uint64_t seed = 20190401;
    int chains = 1;
    double alpha = 0.05;
    double c = 0.001;
    std::size_t workers = 0;  // 0 = hardware concurrency

    /// Applies one key; throws DataError on an unknown key or bad value.
    void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});

    /// Canonical `key=value` lines for every setting that affects results.
    std::string canonical() const;

    /// 16-hex-digit FNV-1a of canonical(); excludes out_dir and workers.
    std::string hash() const;

    void validate() const;
};

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// One subject id per line; blank lines and '#' comments skipped.
std::vector<std::string> read_subject_list(const std::filesystem::path& path);

/// File-name safe form of a pathway name.
std::string sanitize_name(const std::string& name);

}  // namespace srdreg
