#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace optostirling {

std::string code_version();

// 17 significant digits, enough to read back the identical double.
std::string format_double(double v);
double parse_double(const std::string& s);

inline constexpr const char* kMissing = "NA";
std::string format_optional(const std::optional<double>& v);
std::optional<double> parse_optional(const std::string& s);

// Ordered key/value header embedded in every output file.
struct Provenance {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
    void add(const std::string& key, double value) { entries.emplace_back(key, format_double(value)); }

    // "# key: value" lines.
    [[nodiscard]] std::string csv_header() const;
};

// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::string& path, const std::string& content);

std::vector<std::string> split_csv_line(const std::string& line);

std::string join_path(const std::string& dir, const std::string& file);

}  // namespace optostirling
