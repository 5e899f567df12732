#include "srdreg/density_ingest.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/grid.hpp"
#include "srdreg/stats.hpp"

namespace srdreg {

std::vector<std::string> canonical_order(std::vector<std::string> names,
                                         const std::vector<std::string>& known) {
    auto key = [&](const std::string& name) {
        const auto it = std::find(known.begin(), known.end(), name);
        return std::make_tuple(static_cast<std::size_t>(it - known.begin()), name);
    };
    std::sort(names.begin(), names.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

LabelMap LabelMap::standard() { return LabelMap{{{1, "NC"}, {2, "ED"}, {4, "ET"}}}; }

LabelMap LabelMap::parse(const std::string& spec) {
    LabelMap map;
    for (const auto& item : csv::split(spec, ',')) {
        const auto parts = csv::split(item, ':');
        if (parts.size() != 2 || parts[1].empty())
            throw DataError("label map entry must be <int>:<region>, got '" + item + "'");
        const auto label = static_cast<std::int64_t>(csv::to_double(parts[0], "label map"));
        map.labels[label] = parts[1];
    }
    if (map.labels.empty()) throw DataError("empty label map");
    return map;
}

RegionIntensities extract_region_intensities(const Volume<float>& volume,
                                             const Volume<std::int32_t>& mask,
                                             const LabelMap& label_map) {
    if (volume.dims != mask.dims)
        throw DataError("volume and mask dimensions differ");
    if (volume.values.size() != volume.voxel_count() || mask.values.size() != mask.voxel_count())
        throw DataError("volume buffer does not match its dimensions");

    RegionIntensities out;
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        const auto it = label_map.labels.find(mask.values[i]);
        if (it == label_map.labels.end()) continue;
        out.present[it->second].push_back(static_cast<double>(volume.values[i]));
    }
    for (const auto& [label, region] : label_map.labels)
        if (!out.present.contains(region)) out.absent.push_back(region);
    return out;
}

IntensityRange rescale_sequence(std::span<IntensitySample> samples) {
    IntensityRange range{std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
    for (const auto& s : samples) {
        for (double v : s.values) {
            if (!std::isfinite(v)) throw DataError("non-finite intensity for subject " + s.subject_id);
            range.min = std::min(range.min, v);
            range.max = std::max(range.max, v);
        }
    }
    if (!(range.max > range.min)) {
        const std::string name = samples.empty() ? std::string{} : samples.front().sequence;
        throw DataError("constant sequence " + name);
    }
    const double width = range.max - range.min;
    for (auto& s : samples)
        for (double& v : s.values) v = std::clamp((v - range.min) / width, 0.0, 1.0);
    return range;
}

BandwidthRule BandwidthRule::parse(const std::string& text) {
    BandwidthRule rule;
    if (text.rfind("fixed:", 0) == 0) {
        rule.kind = BandwidthKind::fixed;
        rule.fixed_value = csv::to_double(text.substr(6), "fixed bandwidth");
        if (!(rule.fixed_value > 0.0)) throw DataError("fixed bandwidth must be positive");
        return rule;
    }
    const auto star = text.find('*');
    const std::string base = text.substr(0, star);
    if (base == "silverman") {
        rule.kind = BandwidthKind::silverman;
    } else if (base == "scott") {
        rule.kind = BandwidthKind::scott;
    } else {
        throw DataError("unknown bandwidth rule '" + text + "'");
    }
    if (star != std::string::npos) {
        rule.multiplier = csv::to_double(text.substr(star + 1), "bandwidth multiplier");
        if (!(rule.multiplier > 0.0)) throw DataError("bandwidth multiplier must be positive");
    }
    return rule;
}

std::string BandwidthRule::to_string() const {
    if (kind == BandwidthKind::fixed) return "fixed:" + csv::format(fixed_value);
    std::string base = kind == BandwidthKind::silverman ? "silverman" : "scott";
    if (multiplier != 1.0) base += "*" + csv::format(multiplier);
    return base;
}

double select_bandwidth(std::span<const double> sample, const BandwidthRule& rule, std::size_t m) {
    const double floor = 1.0 / static_cast<double>(m);
    if (rule.kind == BandwidthKind::fixed) return std::max(rule.fixed_value, floor);
    if (sample.size() < 2) throw DataError("bandwidth needs at least two values");

    const double n = static_cast<double>(sample.size());
    const double sigma = stats::sd(sample);
    double spread = sigma;
    if (rule.kind == BandwidthKind::silverman) {
        std::vector<double> sorted(sample.begin(), sample.end());
        std::sort(sorted.begin(), sorted.end());
        const double iqr = stats::quantile_sorted(sorted, 0.75) - stats::quantile_sorted(sorted, 0.25);
        if (iqr > 0.0) spread = std::min(sigma, iqr / 1.34);
    }
    const double h = rule.multiplier * 1.06 * spread * std::pow(n, -0.2);
    if (sigma == 0.0) spdlog::warn("zero-variance sample; bandwidth floored at 1/m = {}", floor);
    return std::max(h, floor);
}

DensityGrid kde(std::span<const double> sample, std::size_t m, const BandwidthRule& rule) {
    if (m < 2) throw DataError("grid size must be at least 2");
    if (sample.size() < 2) throw DataError("kde needs at least two values");
    for (double v : sample)
        if (!(v >= 0.0 && v <= 1.0)) throw DataError("kde input must lie in [0, 1]");

    DensityGrid out;
    out.bandwidth = select_bandwidth(sample, rule, m);
    out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));

    // Sorted sample lets each grid point sum only kernels within 9 bandwidths.
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = out.bandwidth;
    const double reach = 9.0 * h;
    for (std::size_t j = 0; j < m; ++j) {
        const double x = grid_point(j, m);
        auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
        const auto hi = std::upper_bound(lo, sorted.end(), x + reach);
        double acc = 0.0;
        for (; lo != hi; ++lo) {
            const double z = (x - *lo) / h;
            acc += std::exp(-0.5 * z * z);
        }
        out.values(static_cast<Eigen::Index>(j)) = acc;
    }
    const double mass = trapezoid(out.values);
    if (!(mass > 0.0)) throw NumericalError("kde has zero mass on the grid");
    out.values /= mass;
    return out;
}

SummaryCase parse_summary_case(const std::string& text) {
    if (text.size() == 1 && text[0] >= 'a' && text[0] <= 'g')
        return static_cast<SummaryCase>(text[0] - 'a');
    throw DataError("summary case must be one of a..g, got '" + text + "'");
}

char to_char(SummaryCase c) { return static_cast<char>('a' + static_cast<int>(c)); }

namespace {

std::vector<double> interior_probabilities(int count) {
    std::vector<double> p;
    for (int k = 1; k <= count; ++k) p.push_back(static_cast<double>(k) / (count + 1));
    return p;
}

std::vector<double> probabilities_for(SummaryCase which) {
    switch (which) {
        case SummaryCase::b: return {0.25, 0.75};
        case SummaryCase::c: return {0.0, 0.25, 0.5, 0.75, 1.0};
        case SummaryCase::e: return interior_probabilities(9);
        case SummaryCase::f: return interior_probabilities(15);
        case SummaryCase::g: return interior_probabilities(20);
        default: return {};
    }
}

}  // namespace

std::vector<double> summary_features(std::span<const double> sample, SummaryCase which) {
    if (sample.size() < 4) throw DataError("summary features need at least four values");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> out;
    if (which == SummaryCase::a || which == SummaryCase::b || which == SummaryCase::d)
        out.push_back(stats::mean(sample));
    if (which == SummaryCase::d) {
        out.push_back(stats::sd(sample));
        out.push_back(stats::skewness(sample));
        out.push_back(stats::kurtosis(sample));
        return out;
    }
    for (double p : probabilities_for(which)) out.push_back(stats::quantile_sorted(sorted, p));
    return out;
}

std::vector<std::string> summary_feature_names(SummaryCase which) {
    switch (which) {
        case SummaryCase::a: return {"mean"};
        case SummaryCase::b: return {"mean", "q1", "q3"};
        case SummaryCase::c: return {"min", "q1", "median", "q3", "max"};
        case SummaryCase::d: return {"mean", "sd", "skewness", "kurtosis"};
        default: break;
    }
    std::vector<std::string> names;
    for (double p : probabilities_for(which)) {
        std::ostringstream s;
        s << 'p' << std::round(p * 10000.0) / 100.0;
        names.push_back(s.str());
    }
    return names;
}

// ---- file formats -------------------------------------------------------

std::vector<IntensitySample> read_voxels_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const auto c_subject = table.column("subject_id");
    const auto c_sequence = table.column("sequence");
    const auto c_region = table.column("region");
    const auto c_value = table.column("intensity");

    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
    std::vector<IntensitySample> samples;
    for (const auto& row : table.rows) {
        auto key = std::make_tuple(row[c_subject], row[c_sequence], row[c_region]);
        auto [it, inserted] = index.try_emplace(key, samples.size());
        if (inserted) samples.push_back({row[c_subject], row[c_sequence], row[c_region], {}});
        const double v = csv::to_double(row[c_value], path.string());
        if (!std::isfinite(v)) throw DataError(path.string() + ": non-finite intensity");
        samples[it->second].values.push_back(v);
    }
    return samples;
}

void write_voxels_csv(const std::filesystem::path& path, std::span<const IntensitySample> samples) {
    auto out = csv::open_output(path);
    out << "subject_id,sequence,region,intensity\n";
    for (const auto& s : samples)
        for (double v : s.values)
            out << s.subject_id << ',' << s.sequence << ',' << s.region << ',' << csv::format(v) << '\n';
}

namespace {

struct RawHeader {
    std::array<std::size_t, 3> dims{0, 0, 0};
    std::string dtype;
    std::filesystem::path data;
};

RawHeader read_raw_header(const std::filesystem::path& header) {
    std::ifstream in(header);
    if (!in) throw DataError("cannot open " + header.string());
    RawHeader h;
    std::string line;
    bool have_dims = false;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (line.empty() || line[0] == '#' || colon == std::string::npos) continue;
        const std::string key = line.substr(0, colon);
        std::istringstream value(line.substr(colon + 1));
        if (key == "dims") {
            value >> h.dims[0] >> h.dims[1] >> h.dims[2];
            have_dims = static_cast<bool>(value);
        } else if (key == "dtype") {
            value >> h.dtype;
        } else if (key == "data") {
            std::string rel;
            value >> rel;
            h.data = header.parent_path() / rel;
        }
    }
    if (!have_dims || h.dtype.empty() || h.data.empty())
        throw DataError(header.string() + ": header needs dims, dtype and data");
    return h;
}

template <class Stored, class Out>
std::vector<Out> read_le(std::ifstream& in, std::size_t count, const std::string& name) {
    std::vector<Stored> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(Stored)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(Stored))
        throw DataError(name + ": truncated raw data");
    static_assert(std::endian::native == std::endian::little, "big-endian hosts need byte swapping");
    return std::vector<Out>(raw.begin(), raw.end());
}

template <class Out>
Volume<Out> read_raw(const std::filesystem::path& header) {
    const RawHeader h = read_raw_header(header);
    std::ifstream in(h.data, std::ios::binary);
    if (!in) throw DataError("cannot open " + h.data.string());
    Volume<Out> v;
    v.dims = h.dims;
    const std::size_t n = v.voxel_count();
    const std::string name = h.data.string();
    if (h.dtype == "float32") {
        v.values = read_le<float, Out>(in, n, name);
    } else if (h.dtype == "int32") {
        v.values = read_le<std::int32_t, Out>(in, n, name);
    } else if (h.dtype == "int16") {
        v.values = read_le<std::int16_t, Out>(in, n, name);
    } else if (h.dtype == "uint16") {
        v.values = read_le<std::uint16_t, Out>(in, n, name);
    } else if (h.dtype == "uint8") {
        v.values = read_le<std::uint8_t, Out>(in, n, name);
    } else {
        throw DataError(header.string() + ": unsupported dtype " + h.dtype);
    }
    return v;
}

template <class T>
void write_raw(const std::filesystem::path& header, const Volume<T>& v, const char* dtype) {
    const auto data_name = header.stem().string() + ".raw";
    {
        auto out = csv::open_output(header);
        out << "dims: " << v.dims[0] << ' ' << v.dims[1] << ' ' << v.dims[2] << '\n'
            << "dtype: " << dtype << '\n'
            << "data: " << data_name << '\n';
    }
    std::ofstream data(header.parent_path() / data_name, std::ios::binary);
    if (!data) throw DataError("cannot write raw data next to " + header.string());
    data.write(reinterpret_cast<const char*>(v.values.data()),
               static_cast<std::streamsize>(v.values.size() * sizeof(T)));
}

}  // namespace

Volume<float> read_raw_volume(const std::filesystem::path& header) { return read_raw<float>(header); }

Volume<std::int32_t> read_raw_mask(const std::filesystem::path& header) {
    return read_raw<std::int32_t>(header);
}

void write_raw_volume(const std::filesystem::path& header, const Volume<float>& volume) {
    write_raw(header, volume, "float32");
}

void write_raw_mask(const std::filesystem::path& header, const Volume<std::int32_t>& mask) {
    write_raw(header, mask, "int32");
}

void write_densities_csv(const std::filesystem::path& path, std::span<const DensityRecord> records,
                         const std::string& config_hash) {
    auto out = csv::open_output(path);
    csv::write_hash_comment(out, config_hash);
    const std::size_t m = records.empty() ? 0 : records.front().density.size();
    out << "subject_id,sequence,region,bandwidth";
    for (std::size_t j = 1; j <= m; ++j) out << ",v" << j;
    out << '\n';
    for (const auto& r : records) {
        if (r.density.size() != m) throw DataError("densities on different grids");
        out << r.subject_id << ',' << r.sequence << ',' << r.region << ','
            << csv::format(r.density.bandwidth);
        for (double v : r.density.values) out << ',' << csv::format(v);
        out << '\n';
    }
}

std::vector<DensityRecord> read_densities_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const auto c_subject = table.column("subject_id");
    const auto c_sequence = table.column("sequence");
    const auto c_region = table.column("region");
    const auto c_bandwidth = table.column("bandwidth");
    const std::size_t first = table.column("v1");
    const std::size_t m = table.header.size() - first;
    if (m < 2) throw DataError(path.string() + ": need at least two grid values");

    std::vector<DensityRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        DensityRecord r{row[c_subject], row[c_sequence], row[c_region], {}};
        r.density.bandwidth = csv::to_double(row[c_bandwidth], path.string());
        r.density.values.resize(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j)
            r.density.values(static_cast<Eigen::Index>(j)) = csv::to_double(row[first + j], path.string());
        if ((r.density.values.array() < 0.0).any())
            throw DataError(path.string() + ": negative density value for " + r.subject_id);
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace srdreg
