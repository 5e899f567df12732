#include "srdreg/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "srdreg/csv.hpp"
#include "srdreg/error.hpp"
#include "srdreg/random.hpp"

namespace srdreg {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw DataError("config key " + key + ": expected an integer, got '" + value + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    return csv::to_double(value, "config key " + key);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw DataError("config key " + key + ": expected a boolean, got '" + value + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    if (value.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value, const std::filesystem::path& base) {
    static const std::map<std::string, std::function<void(PipelineConfig&, const std::string&,
                                                          const std::filesystem::path&)>>
        setters{
            {"voxels", [](auto& c, auto& v, auto& b) { c.voxels = resolve(b, v); }},
            {"volumes", [](auto& c, auto& v, auto& b) { c.volumes = resolve(b, v); }},
            {"densities", [](auto& c, auto& v, auto& b) { c.densities = resolve(b, v); }},
            {"expression", [](auto& c, auto& v, auto& b) { c.expression = resolve(b, v); }},
            {"genesets", [](auto& c, auto& v, auto& b) { c.genesets = resolve(b, v); }},
            {"cohort", [](auto& c, auto& v, auto& b) { c.cohort = resolve(b, v); }},
            {"out_dir", [](auto& c, auto& v, auto& b) { c.out_dir = resolve(b, v); }},
            {"grid_size", [](auto& c, auto& v, auto&) { c.grid_size = parse_integer<std::size_t>("grid_size", v); }},
            {"bandwidth", [](auto& c, auto& v, auto&) { c.bandwidth = BandwidthRule::parse(v); }},
            {"label_map", [](auto& c, auto& v, auto&) { c.label_map = v; }},
            {"variance_cutoff", [](auto& c, auto& v, auto&) { c.variance_cutoff = parse_real("variance_cutoff", v); }},
            {"standardize", [](auto& c, auto& v, auto&) { c.standardize = parse_bool("standardize", v); }},
            {"tau", [](auto& c, auto& v, auto&) { c.tau = parse_real("tau", v); }},
            {"enrichment", [](auto& c, auto& v, auto&) { c.enrichment = parse_enrichment_rule(v); }},
            {"a1", [](auto& c, auto& v, auto&) { c.hp.a1 = parse_real("a1", v); }},
            {"a2", [](auto& c, auto& v, auto&) { c.hp.a2 = parse_real("a2", v); }},
            {"b1", [](auto& c, auto& v, auto&) { c.hp.b1 = parse_real("b1", v); }},
            {"b2", [](auto& c, auto& v, auto&) { c.hp.b2 = parse_real("b2", v); }},
            {"v0", [](auto& c, auto& v, auto&) { c.hp.v0 = parse_real("v0", v); }},
            {"iterations", [](auto& c, auto& v, auto&) { c.mcmc.iterations = parse_integer<long>("iterations", v); }},
            {"burnin", [](auto& c, auto& v, auto&) { c.mcmc.burnin = parse_integer<long>("burnin", v); }},
            {"thin", [](auto& c, auto& v, auto&) { c.mcmc.thin = parse_integer<long>("thin", v); }},
            {"seed", [](auto& c, auto& v, auto&) { c.seed = parse_integer<std::uint64_t>("seed", v); }},
            {"chains", [](auto& c, auto& v, auto&) { c.chains = parse_integer<int>("chains", v); }},
            {"alpha", [](auto& c, auto& v, auto&) { c.alpha = parse_real("alpha", v); }},
            {"c", [](auto& c, auto& v, auto&) { c.c = parse_real("c", v); }},
            {"workers", [](auto& c, auto& v, auto&) { c.workers = parse_integer<std::size_t>("workers", v); }},
        };
    const auto it = setters.find(key);
    if (it == setters.end()) throw DataError("unknown config key '" + key + "'");
    it->second(*this, value, base);
}

std::string PipelineConfig::canonical() const {
    std::ostringstream out;
    auto line = [&](const char* key, const std::string& value) { out << key << '=' << value << '\n'; };
    auto real = [](double v) { return csv::format(v); };
    line("a1", real(hp.a1));
    line("a2", real(hp.a2));
    line("alpha", real(alpha));
    line("b1", real(hp.b1));
    line("b2", real(hp.b2));
    line("bandwidth", bandwidth.to_string());
    line("burnin", std::to_string(mcmc.burnin));
    line("c", real(c));
    line("chains", std::to_string(chains));
    line("cohort", cohort.string());
    line("densities", densities.string());
    line("enrichment", enrichment == EnrichmentRule::max_deviation ? "max_deviation" : "diff");
    line("expression", expression.string());
    line("genesets", genesets.string());
    line("grid_size", std::to_string(grid_size));
    line("iterations", std::to_string(mcmc.iterations));
    line("label_map", label_map);
    line("seed", std::to_string(seed));
    line("standardize", standardize ? "true" : "false");
    line("tau", real(tau));
    line("thin", std::to_string(mcmc.thin));
    line("v0", real(hp.v0));
    line("variance_cutoff", real(variance_cutoff));
    line("volumes", volumes.string());
    line("voxels", voxels.string());
    return out.str();
}

std::string PipelineConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

void PipelineConfig::validate() const {
    hp.validate();
    mcmc.validate();
    if (grid_size < 2) throw DataError("grid_size must be at least 2");
    if (!(variance_cutoff > 0.0 && variance_cutoff <= 1.0)) throw DataError("variance_cutoff must lie in (0, 1]");
    if (!(tau > 0.0)) throw DataError("tau must be positive");
    if (chains < 1) throw DataError("chains must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must lie in (0, 1)");
    if (!(c > 0.0)) throw DataError("c must be positive");
    for (const auto* p : {&voxels, &volumes, &densities, &expression, &genesets, &cohort})
        if (!p->empty() && !std::filesystem::exists(*p)) throw DataError("missing input file " + p->string());
}

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base) {
    PipelineConfig config;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(line_no) + ": expected key = value");
        config.set(trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), base);
    }
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

std::vector<std::string> read_subject_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open subject list " + path.string());
    std::vector<std::string> out;
    std::string raw;
    while (std::getline(in, raw)) {
        const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char ch : name) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '-' ||
                        ch == '_' || ch == '.';
        out.push_back(ok ? ch : '_');
    }
    return out.empty() ? std::string("unnamed") : out;
}

}  // namespace srdreg
