#include "optostirling/io.hpp"

#include "optostirling/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef OPTOSTIRLING_VERSION
#define OPTOSTIRLING_VERSION "unknown"
#endif

namespace optostirling {

std::string code_version() { return OPTOSTIRLING_VERSION; }

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : kMissing; }

std::optional<double> parse_optional(const std::string& s) {
    if (s == kMissing) return std::nullopt;
    return parse_double(s);
}

std::string Provenance::csv_header() const {
    std::string out;
    for (const auto& [k, v] : entries) out += "# " + k + ": " + v + "\n";
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string join_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

}  // namespace optostirling
