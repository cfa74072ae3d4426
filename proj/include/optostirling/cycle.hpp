#pragma once

#include "optostirling/io.hpp"
#include "optostirling/landscape.hpp"
#include "optostirling/params.hpp"
#include "optostirling/plane.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace optostirling {

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

struct Isoline {
    Field field = Field::Temperature;
    double level = 0.0;
    std::vector<Point> points;
    bool closed = false;
};

inline constexpr double kDefaultRefineTol = 1e-6;

// Marching squares over the map's grid. A grid edge contributes a crossing
// when the level is bracketed between a Valid end and either the other Valid
// end or the validity boundary found along the edge. Every crossing is
// refined by bisection on the continuous field and re-classified; crossings
// are chained into polylines. Throws EmptyLevel when nothing brackets.
std::vector<Isoline> trace_isoline(const LandscapeMap& map, Field field, double level,
                                   double refine_tol = kDefaultRefineTol);

// Solves T = T_level, Delta_m = Dm_level near `seed`: damped Newton with a
// finite-difference Jacobian, then nested bisection. Both stay within two grid
// cells of the seed. Throws NoConvergence.
Point refine_corner(const LandscapeMap& map, Point seed, double T_level, double Dm_level,
                    double tol = kDefaultRefineTol);

enum class StrokeKind { IsothermalHot, IsochoricLow, IsothermalCold, IsochoricHigh };

std::string to_string(StrokeKind k);
StrokeKind stroke_kind_from_string(const std::string& s);

struct Stroke {
    StrokeKind kind = StrokeKind::IsothermalHot;
    Field field = Field::Temperature;
    double level = 0.0;
    std::vector<Point> path;  // starts and ends on refined corners
};

struct StirlingCycle {
    std::array<Point, 4> corners{};  // 1, 2, 3, 4
    std::array<Stroke, 4> strokes{};  // 1->2, 2->3, 3->4, 4->1
    CycleLevels levels;
    GridSpec spec;  // window used for tracing and for arc-length normalization
    std::shared_ptr<const ControlPlane> plane;
    int branch = 0;
    int branch_count = 0;
    double max_residual = 0.0;  // worst relative level residual over all vertices
};

struct CycleOptions {
    double refine_tol = kDefaultRefineTol;
    int branch = 0;  // rank among candidate loops, nearest the window centre first
};

// Throws NoClosedLoop when no four corners can be joined by Valid arcs
// (including when a level is empty) and ConfigError for unordered levels.
StirlingCycle build_cycle(const LandscapeMap& map, const CycleLevels& levels, const CycleOptions& opt = {});

// Whether any stroke vertex lies in a grid cell touching a NonAdiabatic node.
bool touches_nonadiabatic(const StirlingCycle& cycle, const LandscapeMap& map);

struct ScheduleSample {
    double t = 0.0;
    double s = 0.0;     // cumulative normalized path length along the cycle
    double frac = 0.0;  // arc-length fraction within the stroke
    int stroke = 0;
    double x = 0.0;
    double y = 0.0;
    double T = 0.0;
    double Delta_m = 0.0;
    double Gamma_m = 0.0;
    double n_m = 0.0;
    RegimeClass regime = RegimeClass::Valid;

    bool operator==(const ScheduleSample&) const = default;
};

struct Schedule {
    double t_tot = 0.0;
    double r_T = 0.5;
    double gamma = 0.0;
    CycleLevels levels;
    std::string x_name = "x";
    std::string y_name = "y";
    std::vector<ScheduleSample> samples;
    std::array<std::size_t, 4> stroke_begin{};  // first sample index of each stroke
    std::array<std::size_t, 4> stroke_end{};    // last sample index of each stroke

    [[nodiscard]] double stroke_duration(int k) const {
        return k % 2 == 0 ? r_T * t_tot / 2.0 : (1.0 - r_T) * t_tot / 2.0;
    }
};

inline constexpr int kDefaultSamplesPerStroke = 200;

// Places n_samples points per stroke (corners included) at equal arc length,
// projects them onto the stroke's level set and evaluates the plane there.
// The result has t = 0 everywhere; make_schedule assigns times.
Schedule sample_cycle(const StirlingCycle& cycle, int n_samples = kDefaultSamplesPerStroke,
                      double refine_tol = kDefaultRefineTol);

// Assigns times to a sampled cycle: stroke k lasts stroke_duration(k) and
// time is linear in arc length within each stroke.
Schedule make_schedule(const Schedule& sampled, double t_tot, double r_T);
Schedule make_schedule(const StirlingCycle& cycle, double t_tot, double r_T,
                       int n_samples = kDefaultSamplesPerStroke, double refine_tol = kDefaultRefineTol);

std::string cycle_to_json(const StirlingCycle& c, const Provenance& prov = {});
// The plane is not restored.
StirlingCycle cycle_from_json(const std::string& text);

std::string schedule_to_csv(const Schedule& s, const Provenance& prov = {});
std::string schedule_to_json(const Schedule& s, const Provenance& prov = {});
Schedule schedule_from_json(const std::string& text);

}  // namespace optostirling
