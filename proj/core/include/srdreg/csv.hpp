#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace srdreg::csv {

/// A comma-separated table. Lines starting with '#' are comments and are
/// skipped on read; the first non-comment line is the header.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws DataError
    bool has_column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);
Table parse(std::istream& in, const std::string& source_name = "<stream>");

std::vector<std::string> split(std::string_view line, char delimiter);
double to_double(std::string_view field, std::string_view context);

/// Shortest round-trippable text for a double (stable across runs).
std::string format(double value);

/// Writes `# config_hash=<hex>` when hash is non-empty.
void write_hash_comment(std::ostream& out, std::string_view config_hash);

/// Opens a file for writing, creating parent directories; throws DataError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace srdreg::csv
