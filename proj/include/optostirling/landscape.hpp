#pragma once

#include "optostirling/io.hpp"
#include "optostirling/params.hpp"
#include "optostirling/plane.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace optostirling {

struct GridSpec {
    std::string x_name = "x";
    std::string y_name = "y";
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    int nx = 2, ny = 2;

    // Throws ConfigError when nx, ny < 2 or the bounds are not ordered.
    void check() const;
    [[nodiscard]] double x(int i) const;
    [[nodiscard]] double y(int j) const;
    [[nodiscard]] double dx() const { return (x_max - x_min) / (nx - 1); }
    [[nodiscard]] double dy() const { return (y_max - y_min) / (ny - 1); }

    bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(const ControlPlane& plane, const Window& w, int nx, int ny);

struct CellRecord {
    double x = 0.0;
    double y = 0.0;
    RegimeClass regime = RegimeClass::Degenerate;
    std::optional<double> T, Delta_m, Gamma_m, n_m, kappa_eff;

    bool operator==(const CellRecord&) const = default;
};

struct LandscapeMap {
    GridSpec spec;
    std::vector<CellRecord> cells;  // row-major: index j * nx + i
    // The plane the map was sampled from; empty after a CSV import.
    std::shared_ptr<const ControlPlane> plane;

    [[nodiscard]] const CellRecord& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * spec.nx + i]; }
    [[nodiscard]] std::optional<double> value(Field f, int i, int j) const {
        const auto& c = at(i, j);
        return f == Field::Temperature ? c.T : c.Delta_m;
    }
    [[nodiscard]] std::size_t count(RegimeClass r) const;
};

LandscapeMap map_plane(std::shared_ptr<const ControlPlane> plane, const GridSpec& spec,
                       unsigned threads = 0);
LandscapeMap map_feedback_plane(const PhysicalParams& p, const GridSpec& spec, double margin = 0.0,
                                const Constants& c = {}, unsigned threads = 0);
LandscapeMap map_nofeedback_plane(const PhysicalParams& p, const GridSpec& spec, double margin = 0.0,
                                  const Constants& c = {}, unsigned threads = 0);

std::string landscape_to_csv(const LandscapeMap& m, const Provenance& prov = {});
LandscapeMap landscape_from_csv(const std::string& text);
std::string landscape_to_json(const LandscapeMap& m, const Provenance& prov = {});
// Restores the plane when the JSON carries physical parameters.
LandscapeMap landscape_from_json(const std::string& text);

}  // namespace optostirling
