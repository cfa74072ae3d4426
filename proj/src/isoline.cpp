#include "optostirling/cycle.hpp"
#include "optostirling/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_map>

namespace optostirling {

namespace {

const ControlPlane& require_plane(const LandscapeMap& map) {
    if (!map.plane) throw ConfigError("landscape has no plane attached; continuous fields unavailable");
    return *map.plane;
}

double level_scale(double level) { return level != 0.0 ? std::abs(level) : 1.0; }

Point lerp(Point a, Point b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

// Root of field - level on the segment a->b, given residuals of opposite sign
// at the ends. Starts from the linear-interpolation seed, then bisects.
std::optional<Point> bisect_segment(const ControlPlane& plane, Field f, double level, double tol, Point a, Point b,
                                    double ra, double rb) {
    const double target = 0.1 * tol * level_scale(level);
    const double accept = tol * level_scale(level);
    double ta = 0.0, tb = 1.0;
    double t = ra / (ra - rb);
    if (!(t > 0.0 && t < 1.0)) t = 0.5;
    double best_t = std::abs(ra) < std::abs(rb) ? 0.0 : 1.0;
    double best_r = std::min(std::abs(ra), std::abs(rb));
    for (int it = 0; it < 200; ++it) {
        auto v = plane.value(f, a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
        if (!v) return std::nullopt;
        double r = *v - level;
        if (std::abs(r) < best_r) {
            best_r = std::abs(r);
            best_t = t;
        }
        if (std::abs(r) <= target) break;
        if ((r < 0) == (ra < 0)) {
            ta = t;
            ra = r;
        } else {
            tb = t;
            rb = r;
        }
        double next = 0.5 * (ta + tb);
        if (next == ta || next == tb) break;
        t = next;
    }
    if (best_r > accept) return std::nullopt;
    return lerp(a, b, best_t);
}

// Last Valid point on a->b when a is Valid and b is not.
Point validity_boundary(const ControlPlane& plane, Point a, Point b) {
    double ta = 0.0, tb = 1.0;
    for (int it = 0; it < 32; ++it) {
        double t = 0.5 * (ta + tb);
        Point p = lerp(a, b, t);
        if (plane.valid(p.x, p.y))
            ta = t;
        else
            tb = t;
    }
    return lerp(a, b, ta);
}

struct Crossing {
    bool present = false;
    Point p;
};

}  // namespace

std::vector<Isoline> trace_isoline(const LandscapeMap& map, Field field, double level, double refine_tol) {
    const ControlPlane& plane = require_plane(map);
    const GridSpec& g = map.spec;
    const int nx = g.nx, ny = g.ny;
    auto node_ok = [&](int i, int j) { return map.at(i, j).regime == RegimeClass::Valid && map.value(field, i, j); };
    auto node_pt = [&](int i, int j) { return Point{map.at(i, j).x, map.at(i, j).y}; };
    auto above = [&](double v) { return v >= level; };

    const std::size_t n_h = static_cast<std::size_t>(nx - 1) * ny;
    const std::size_t n_edges = n_h + static_cast<std::size_t>(nx) * (ny - 1);
    std::vector<Crossing> cross(n_edges);
    auto h_id = [&](int i, int j) { return static_cast<std::size_t>(j) * (nx - 1) + i; };
    auto v_id = [&](int i, int j) { return n_h + static_cast<std::size_t>(j) * nx + i; };

    auto edge = [&](int ia, int ja, int ib, int jb) -> Crossing {
        bool oka = node_ok(ia, ja), okb = node_ok(ib, jb);
        if (!oka && !okb) return {};
        Point a = node_pt(ia, ja), b = node_pt(ib, jb);
        double fa, fb;
        if (oka && okb) {
            fa = *map.value(field, ia, ja);
            fb = *map.value(field, ib, jb);
        } else {
            if (!oka) {
                std::swap(a, b);
                fa = *map.value(field, ib, jb);
            } else {
                fa = *map.value(field, ia, ja);
            }
            b = validity_boundary(plane, a, b);
            auto vb = plane.value(field, b.x, b.y);
            if (!vb) return {};
            fb = *vb;
        }
        if (above(fa) == above(fb)) return {};
        auto root = bisect_segment(plane, field, level, refine_tol, a, b, fa - level, fb - level);
        if (!root || !plane.valid(root->x, root->y)) return {};
        return {true, *root};
    };

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) cross[h_id(i, j)] = edge(i, j, i + 1, j);
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i) cross[v_id(i, j)] = edge(i, j, i, j + 1);

    // Links between crossings, at most two per crossing.
    std::vector<std::array<std::size_t, 2>> links(n_edges, {SIZE_MAX, SIZE_MAX});
    auto connect = [&](std::size_t a, std::size_t b) {
        for (auto [u, w] : {std::pair{a, b}, std::pair{b, a}}) {
            auto& l = links[u];
            if (l[0] == SIZE_MAX)
                l[0] = w;
            else
                l[1] = w;
        }
    };
    auto dist = [&](std::size_t a, std::size_t b) {
        double dx = (cross[a].p.x - cross[b].p.x) / (g.x_max - g.x_min);
        double dy = (cross[a].p.y - cross[b].p.y) / (g.y_max - g.y_min);
        return std::hypot(dx, dy);
    };

    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            // bottom, right, top, left
            std::array<std::size_t, 4> e = {h_id(i, j), v_id(i + 1, j), h_id(i, j + 1), v_id(i, j)};
            std::vector<int> present;
            for (int k = 0; k < 4; ++k)
                if (cross[e[k]].present) present.push_back(k);
            if (present.size() == 2) {
                connect(e[present[0]], e[present[1]]);
            } else if (present.size() == 4) {
                bool corners_ok = node_ok(i, j) && node_ok(i + 1, j) && node_ok(i + 1, j + 1) && node_ok(i, j + 1);
                bool cut_01 = false;  // pairs (bottom,right) and (top,left)
                if (corners_ok) {
                    double c0 = *map.value(field, i, j);
                    auto centre = plane.value(field, 0.5 * (g.x(i) + g.x(i + 1)), 0.5 * (g.y(j) + g.y(j + 1)));
                    double cv = centre ? *centre
                                       : 0.25 * (c0 + *map.value(field, i + 1, j) + *map.value(field, i + 1, j + 1) +
                                                 *map.value(field, i, j + 1));
                    cut_01 = above(cv) == above(c0);
                } else {
                    cut_01 = dist(e[0], e[1]) + dist(e[2], e[3]) <= dist(e[1], e[2]) + dist(e[3], e[0]);
                }
                if (cut_01) {
                    connect(e[0], e[1]);
                    connect(e[2], e[3]);
                } else {
                    connect(e[1], e[2]);
                    connect(e[3], e[0]);
                }
            } else if (present.size() == 3) {
                // The level runs into an excluded corner; join the closest pair.
                std::array<std::pair<int, int>, 3> pairs = {std::pair{present[0], present[1]},
                                                            std::pair{present[1], present[2]},
                                                            std::pair{present[0], present[2]}};
                auto best = *std::min_element(pairs.begin(), pairs.end(), [&](auto p, auto q) {
                    return dist(e[p.first], e[p.second]) < dist(e[q.first], e[q.second]);
                });
                connect(e[best.first], e[best.second]);
            }
        }
    }

    auto degree = [&](std::size_t u) { return (links[u][0] != SIZE_MAX) + (links[u][1] != SIZE_MAX); };
    std::vector<char> seen(n_edges, 0);
    std::vector<Isoline> out;
    auto walk = [&](std::size_t start, bool closed) {
        Isoline iso;
        iso.field = field;
        iso.level = level;
        iso.closed = closed;
        std::size_t prev = SIZE_MAX, cur = start;
        while (cur != SIZE_MAX && !seen[cur]) {
            seen[cur] = 1;
            iso.points.push_back(cross[cur].p);
            std::size_t next = links[cur][0] != prev ? links[cur][0] : links[cur][1];
            if (next == prev) next = SIZE_MAX;
            prev = cur;
            cur = next;
        }
        if (iso.points.size() >= 2) out.push_back(std::move(iso));
    };
    for (std::size_t u = 0; u < n_edges; ++u)
        if (cross[u].present && !seen[u] && degree(u) == 1) walk(u, false);
    for (std::size_t u = 0; u < n_edges; ++u)
        if (cross[u].present && !seen[u] && degree(u) == 2) walk(u, true);

    if (out.empty())
        throw EmptyLevel("no Valid cell brackets " + to_string(field) + " = " + format_double(level));
    return out;
}

namespace {

struct CornerProblem {
    const ControlPlane& plane;
    const GridSpec& g;
    double T_level, Dm_level;

    [[nodiscard]] Point to_xy(double u, double v) const {
        return {g.x_min + u * (g.x_max - g.x_min), g.y_min + v * (g.y_max - g.y_min)};
    }
    [[nodiscard]] std::optional<Eigen::Vector2d> residual(double u, double v) const {
        Point p = to_xy(u, v);
        auto f = plane.fields(p.x, p.y);
        if (!f) return std::nullopt;
        return Eigen::Vector2d((f->T - T_level) / level_scale(T_level),
                               (f->Delta_m - Dm_level) / level_scale(Dm_level));
    }
};

bool converged(const Eigen::Vector2d& r, double tol) { return std::abs(r[0]) <= tol && std::abs(r[1]) <= tol; }

std::optional<Point> newton_corner(const CornerProblem& pb, double u0, double v0, double tol) {
    const double hu = 1.0 / (pb.g.nx - 1), hv = 1.0 / (pb.g.ny - 1);
    const double box_u = 2.0 * hu, box_v = 2.0 * hv;
    auto inside = [&](double u, double v) { return std::abs(u - u0) <= box_u && std::abs(v - v0) <= box_v; };
    double u = u0, v = v0;
    auto r = pb.residual(u, v);
    if (!r) return std::nullopt;
    for (int it = 0; it < 60; ++it) {
        if (converged(*r, 0.1 * tol)) break;
        const double eu = 1e-5 * hu, ev = 1e-5 * hv;
        auto rup = pb.residual(u + eu, v), rum = pb.residual(u - eu, v);
        auto rvp = pb.residual(u, v + ev), rvm = pb.residual(u, v - ev);
        Eigen::Matrix2d J;
        if (rup && rum)
            J.col(0) = (*rup - *rum) / (2 * eu);
        else if (rup)
            J.col(0) = (*rup - *r) / eu;
        else if (rum)
            J.col(0) = (*r - *rum) / eu;
        else
            return std::nullopt;
        if (rvp && rvm)
            J.col(1) = (*rvp - *rvm) / (2 * ev);
        else if (rvp)
            J.col(1) = (*rvp - *r) / ev;
        else if (rvm)
            J.col(1) = (*r - *rvm) / ev;
        else
            return std::nullopt;
        if (std::abs(J.determinant()) < 1e-300) return std::nullopt;
        Eigen::Vector2d step = -J.partialPivLu().solve(*r);
        double lam = 1.0;
        bool moved = false;
        for (int k = 0; k < 30; ++k, lam *= 0.5) {
            double un = u + lam * step[0], vn = v + lam * step[1];
            if (!inside(un, vn)) continue;
            auto rn = pb.residual(un, vn);
            if (rn && rn->norm() < r->norm()) {
                u = un;
                v = vn;
                r = rn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (!converged(*r, tol)) return std::nullopt;
    return pb.to_xy(u, v);
}

// Root of one residual component along a coordinate line, within [lo, hi]:
// scans for a sign change nearest `near`, then bisects.
template <class F>
std::optional<double> scan_bisect(F&& fn, double lo, double hi, double near, double tol) {
    constexpr int kScan = 16;
    std::optional<std::pair<double, double>> best;
    double best_d = INFINITY;
    std::optional<double> prev_v;
    double prev_t = lo;
    for (int k = 0; k <= kScan; ++k) {
        double t = lo + (hi - lo) * k / kScan;
        auto val = fn(t);
        if (val && std::abs(*val) <= tol) {
            if (std::abs(t - near) < best_d) {
                best_d = std::abs(t - near);
                best = std::pair{t, t};
            }
        } else if (val && prev_v && ((*val < 0) != (*prev_v < 0))) {
            double d = std::abs(0.5 * (t + prev_t) - near);
            if (d < best_d) {
                best_d = d;
                best = std::pair{prev_t, t};
            }
        }
        prev_v = val;
        prev_t = t;
    }
    if (!best) return std::nullopt;
    double a = best->first, b = best->second;
    if (a == b) return a;
    auto fa = fn(a);
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        auto fm = fn(m);
        if (!fm) return std::nullopt;
        if (std::abs(*fm) <= 0.1 * tol) return m;
        if ((*fm < 0) == (*fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    double m = 0.5 * (a + b);
    auto fm = fn(m);
    if (fm && std::abs(*fm) <= tol) return m;
    return std::nullopt;
}

std::optional<Point> nested_bisection_corner(const CornerProblem& pb, double u0, double v0, double tol) {
    const double hu = 1.0 / (pb.g.nx - 1), hv = 1.0 / (pb.g.ny - 1);
    const double inner_tol = 0.01 * tol;
    // inner_axis 0: inner solve along v, outer along u; 1: the reverse.
    for (int inner_comp : {1, 0}) {
        for (int inner_axis : {0, 1}) {
            int outer_comp = 1 - inner_comp;
            double o_lo = inner_axis == 0 ? u0 - 1.5 * hu : v0 - 1.5 * hv;
            double o_hi = inner_axis == 0 ? u0 + 1.5 * hu : v0 + 1.5 * hv;
            double i_lo = inner_axis == 0 ? v0 - 1.5 * hv : u0 - 1.5 * hu;
            double i_hi = inner_axis == 0 ? v0 + 1.5 * hv : u0 + 1.5 * hu;
            double o_near = inner_axis == 0 ? u0 : v0;
            double i_near = inner_axis == 0 ? v0 : u0;
            auto at = [&](double o, double i) { return inner_axis == 0 ? pb.residual(o, i) : pb.residual(i, o); };
            auto inner = [&](double o) -> std::optional<double> {
                return scan_bisect(
                    [&](double i) -> std::optional<double> {
                        auto r = at(o, i);
                        if (!r) return std::nullopt;
                        return (*r)[inner_comp];
                    },
                    i_lo, i_hi, i_near, inner_tol);
            };
            auto outer = scan_bisect(
                [&](double o) -> std::optional<double> {
                    auto i = inner(o);
                    if (!i) return std::nullopt;
                    auto r = at(o, *i);
                    if (!r) return std::nullopt;
                    return (*r)[outer_comp];
                },
                o_lo, o_hi, o_near, tol);
            if (!outer) continue;
            auto i = inner(*outer);
            if (!i) continue;
            auto r = at(*outer, *i);
            if (!r || !converged(*r, tol)) continue;
            return inner_axis == 0 ? pb.to_xy(*outer, *i) : pb.to_xy(*i, *outer);
        }
    }
    return std::nullopt;
}

}  // namespace

Point refine_corner(const LandscapeMap& map, Point seed, double T_level, double Dm_level, double tol) {
    const ControlPlane& plane = require_plane(map);
    CornerProblem pb{plane, map.spec, T_level, Dm_level};
    double u0 = (seed.x - map.spec.x_min) / (map.spec.x_max - map.spec.x_min);
    double v0 = (seed.y - map.spec.y_min) / (map.spec.y_max - map.spec.y_min);
    if (auto p = newton_corner(pb, u0, v0, tol)) return *p;
    if (auto p = nested_bisection_corner(pb, u0, v0, tol)) return *p;
    throw NoConvergence("corner refinement failed near (" + format_double(seed.x) + ", " + format_double(seed.y) +
                        ") for T = " + format_double(T_level) + ", Delta_m = " + format_double(Dm_level));
}

}  // namespace optostirling
