#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace srdreg {

/// Canonical sequence and region orderings. Names outside these lists are
/// accepted and ordered after the known ones, alphabetically.
inline const std::vector<std::string>& known_sequences() {
    static const std::vector<std::string> names{"T1", "T1Gd", "T2", "FLAIR"};
    return names;
}
inline const std::vector<std::string>& known_regions() {
    static const std::vector<std::string> names{"NC", "ED", "ET"};
    return names;
}
std::vector<std::string> canonical_order(std::vector<std::string> names,
                                         const std::vector<std::string>& known);

struct IntensitySample {
    std::string subject_id;
    std::string sequence;
    std::string region;
    std::vector<double> values;
};

/// Integer mask label -> region name.
struct LabelMap {
    std::map<std::int64_t, std::string> labels;

    /// {1: NC, 2: ED, 4: ET}
    static LabelMap standard();
    /// Parses "1:NC,2:ED,4:ET".
    static LabelMap parse(const std::string& spec);
};

/// Dense 3-D array in row-major (x slowest, z fastest) order.
template <class T>
struct Volume {
    std::array<std::size_t, 3> dims{0, 0, 0};
    std::vector<T> values;

    std::size_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }
};

struct RegionIntensities {
    std::map<std::string, std::vector<double>> present;
    std::vector<std::string> absent;  // regions of the label map without voxels
};

/// Collects, for every region of the label map, the volume values at voxels
/// carrying that label (row-major order). Throws DataError on dimension mismatch.
RegionIntensities extract_region_intensities(const Volume<float>& volume,
                                             const Volume<std::int32_t>& mask,
                                             const LabelMap& label_map);

struct IntensityRange {
    double min = 0.0;
    double max = 1.0;
};

/// Rescales every sample of one sequence by the cohort-wide min/max so the
/// pooled values span [0, 1]. Throws DataError("constant sequence") when
/// max == min.
IntensityRange rescale_sequence(std::span<IntensitySample> samples);

enum class BandwidthKind { silverman, scott, fixed };

/// Bandwidth rule: a base rule times a multiplier, or a fixed value.
/// Text form: "silverman", "scott", "silverman*1.25", "fixed:0.05".
struct BandwidthRule {
    BandwidthKind kind = BandwidthKind::silverman;
    double multiplier = 1.0;
    double fixed_value = 0.0;

    static BandwidthRule parse(const std::string& text);
    std::string to_string() const;
};

/// Bandwidth for a sample. Silverman: 1.06 * min(sd, IQR/1.34) * n^(-1/5)
/// (sd alone when the IQR is zero); Scott: 1.06 * sd * n^(-1/5). The result
/// is floored at 1/m.
double select_bandwidth(std::span<const double> sample, const BandwidthRule& rule, std::size_t m);

struct DensityGrid {
    Eigen::VectorXd values;  // on the uniform grid of size values.size()
    double bandwidth = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

inline constexpr std::size_t default_grid_size = 512;

/// Gaussian-kernel density on m uniform points of [0, 1], renormalized to
/// unit trapezoidal integral.
DensityGrid kde(std::span<const double> sample, std::size_t m = default_grid_size,
                const BandwidthRule& rule = {});

enum class SummaryCase { a, b, c, d, e, f, g };

SummaryCase parse_summary_case(const std::string& text);
char to_char(SummaryCase c);

/// Histogram summaries used as baseline predictors:
/// (a) mean; (b) mean, Q1, Q3; (c) five-number summary; (d) mean, sd,
/// skewness, kurtosis; (e) deciles; (f) 15 and (g) 20 equally spaced
/// percentiles (interior points k/(K+1)).
std::vector<double> summary_features(std::span<const double> sample, SummaryCase which);
std::vector<std::string> summary_feature_names(SummaryCase which);

// ---- file formats -------------------------------------------------------

/// Long-form `subject_id,sequence,region,intensity`.
std::vector<IntensitySample> read_voxels_csv(const std::filesystem::path& path);
void write_voxels_csv(const std::filesystem::path& path, std::span<const IntensitySample> samples);

/// Raw little-endian volume described by a sidecar text header:
///   dims: <nx> <ny> <nz>
///   dtype: float32 | int32 | int16 | uint16 | uint8
///   data: <path relative to the header>
Volume<float> read_raw_volume(const std::filesystem::path& header);
Volume<std::int32_t> read_raw_mask(const std::filesystem::path& header);
void write_raw_volume(const std::filesystem::path& header, const Volume<float>& volume);
void write_raw_mask(const std::filesystem::path& header, const Volume<std::int32_t>& mask);

struct DensityRecord {
    std::string subject_id;
    std::string sequence;
    std::string region;
    DensityGrid density;
};

/// `subject_id,sequence,region,bandwidth,v1..vm`.
void write_densities_csv(const std::filesystem::path& path, std::span<const DensityRecord> records,
                         const std::string& config_hash = {});
std::vector<DensityRecord> read_densities_csv(const std::filesystem::path& path);

}  // namespace srdreg
