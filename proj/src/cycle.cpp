#include "optostirling/cycle.hpp"
#include "optostirling/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace optostirling {

using nlohmann::json;

std::string to_string(StrokeKind k) {
    switch (k) {
        case StrokeKind::IsothermalHot: return "IsothermalHot";
        case StrokeKind::IsochoricLow: return "IsochoricLow";
        case StrokeKind::IsothermalCold: return "IsothermalCold";
        case StrokeKind::IsochoricHigh: return "IsochoricHigh";
    }
    return "IsothermalHot";
}

StrokeKind stroke_kind_from_string(const std::string& s) {
    for (auto k : {StrokeKind::IsothermalHot, StrokeKind::IsochoricLow, StrokeKind::IsothermalCold,
                   StrokeKind::IsochoricHigh})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown stroke kind '" + s + "'");
}

namespace {

struct Normalizer {
    const GridSpec& g;
    [[nodiscard]] double u(double x) const { return (x - g.x_min) / (g.x_max - g.x_min); }
    [[nodiscard]] double v(double y) const { return (y - g.y_min) / (g.y_max - g.y_min); }
    [[nodiscard]] double dist(Point a, Point b) const { return std::hypot(u(a.x) - u(b.x), v(a.y) - v(b.y)); }
};

// Position along a polyline: segment index plus fraction.
struct Loc {
    std::size_t seg = 0;
    double t = 0.0;
    [[nodiscard]] double param() const { return static_cast<double>(seg) + t; }
};

struct Hit {
    std::size_t line_a = 0, line_b = 0;  // isotherm index, isochore index
    Loc loc_a, loc_b;
    Point raw;
    Point corner;
};

std::size_t segment_count(const Isoline& l) { return l.closed ? l.points.size() : l.points.size() - 1; }

Point seg_end(const Isoline& l, std::size_t s) { return l.points[(s + 1) % l.points.size()]; }

// Intersections between an isotherm and an isochore, in normalized coordinates.
std::vector<Hit> intersect(const Isoline& a, const Isoline& b, std::size_t ia, std::size_t ib, const Normalizer& nz) {
    std::vector<Hit> hits;
    const std::size_t na = segment_count(a), nb = segment_count(b);
    for (std::size_t s = 0; s < na; ++s) {
        Point p0 = a.points[s], p1 = seg_end(a, s);
        double ax0 = nz.u(p0.x), ay0 = nz.v(p0.y), ax1 = nz.u(p1.x), ay1 = nz.v(p1.y);
        double aminx = std::min(ax0, ax1), amaxx = std::max(ax0, ax1);
        double aminy = std::min(ay0, ay1), amaxy = std::max(ay0, ay1);
        for (std::size_t r = 0; r < nb; ++r) {
            Point q0 = b.points[r], q1 = seg_end(b, r);
            double bx0 = nz.u(q0.x), by0 = nz.v(q0.y), bx1 = nz.u(q1.x), by1 = nz.v(q1.y);
            if (std::max(bx0, bx1) < aminx || std::min(bx0, bx1) > amaxx || std::max(by0, by1) < aminy ||
                std::min(by0, by1) > amaxy)
                continue;
            double dax = ax1 - ax0, day = ay1 - ay0, dbx = bx1 - bx0, dby = by1 - by0;
            double den = dax * dby - day * dbx;
            if (den == 0.0) continue;
            double ex = bx0 - ax0, ey = by0 - ay0;
            double t = (ex * dby - ey * dbx) / den;
            double w = (ex * day - ey * dax) / den;
            // Half-open on the far end so a crossing through a shared vertex counts once.
            if (t < 0.0 || t >= 1.0 || w < 0.0 || w >= 1.0) continue;
            Hit h;
            h.line_a = ia;
            h.line_b = ib;
            h.loc_a = {s, t};
            h.loc_b = {r, w};
            h.raw = {p0.x + (p1.x - p0.x) * t, p0.y + (p1.y - p0.y) * t};
            hits.push_back(h);
        }
    }

    // An open line stops where its grid edge leaves the Valid region, which can
    // fall a fraction of a cell short of a corner sitting on that boundary.
    // Treat an endpoint that comes within a cell of the other line as a crossing
    // seed; refinement then decides whether the corner exists.
    const double reach = std::hypot(1.0 / (nz.g.nx - 1), 1.0 / (nz.g.ny - 1));
    auto nearest = [&](const Isoline& l, Point p, Loc& loc) {
        double best = INFINITY;
        for (std::size_t s = 0; s < segment_count(l); ++s) {
            Point p0 = l.points[s], p1 = seg_end(l, s);
            double x0 = nz.u(p0.x), y0 = nz.v(p0.y), ex = nz.u(p1.x) - x0, ey = nz.v(p1.y) - y0;
            double len2 = ex * ex + ey * ey;
            double t = len2 > 0.0 ? ((nz.u(p.x) - x0) * ex + (nz.v(p.y) - y0) * ey) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            double d = std::hypot(nz.u(p.x) - x0 - t * ex, nz.v(p.y) - y0 - t * ey);
            if (d < best) {
                best = d;
                loc = {s, t};
            }
        }
        return best;
    };
    auto end_loc = [](const Isoline& l, bool last) {
        return last ? Loc{l.points.size() - 2, 1.0} : Loc{0, 0.0};
    };
    auto near_existing = [&](Point p) {
        for (const Hit& h : hits)
            if (nz.dist(h.raw, p) < 2.0 * reach) return true;
        return false;
    };
    for (int side = 0; side < 2; ++side) {
        const Isoline& own = side == 0 ? a : b;
        const Isoline& other = side == 0 ? b : a;
        if (own.closed || own.points.size() < 2 || other.points.size() < 2) continue;
        for (bool last : {false, true}) {
            Point p = last ? own.points.back() : own.points.front();
            Loc on_other;
            if (nearest(other, p, on_other) > reach) continue;
            if (near_existing(p)) continue;
            Hit h;
            h.line_a = ia;
            h.line_b = ib;
            h.loc_a = side == 0 ? end_loc(own, last) : on_other;
            h.loc_b = side == 0 ? on_other : end_loc(own, last);
            h.raw = p;
            hits.push_back(h);
        }
    }
    return hits;
}

// Vertices strictly between two locations, walking forward (increasing
// parameter, wrapping on closed lines) or backward.
std::vector<Point> arc_between(const Isoline& l, Loc from, Loc to, bool forward) {
    std::vector<Point> out;
    const std::size_t n = l.points.size();
    double pf = from.param(), pt = to.param();
    if (!l.closed) {
        if (forward) {
            for (std::size_t k = from.seg + 1; k < n && static_cast<double>(k) < pt; ++k) out.push_back(l.points[k]);
        } else {
            for (std::size_t k = from.seg + (from.t > 0.0 ? 1 : 0); k-- > 0;) {
                if (static_cast<double>(k) <= pt) break;
                if (static_cast<double>(k) < pf) out.push_back(l.points[k]);
            }
        }
        return out;
    }
    const double period = static_cast<double>(n);
    if (forward) {
        double span = std::fmod(pt - pf + period, period);
        for (std::size_t k = 1; k <= n; ++k) {
            double q = std::floor(pf) + static_cast<double>(k);
            if (q - pf >= span) break;
            if (q - pf > 0.0) out.push_back(l.points[static_cast<std::size_t>(q) % n]);
        }
    } else {
        double span = std::fmod(pf - pt + period, period);
        for (std::size_t k = 0; k <= n; ++k) {
            double q = std::ceil(pf) - static_cast<double>(k);
            if (pf - q >= span) break;
            if (pf - q > 0.0) out.push_back(l.points[static_cast<std::size_t>(std::fmod(q + 2 * period, period))]);
        }
    }
    return out;
}

// Whether parameter p lies strictly inside the walk from -> to.
bool strictly_between(const Isoline& l, double from, double to, double p, bool forward) {
    if (!l.closed) return forward ? (p > from && p < to) : (p < from && p > to);
    double period = static_cast<double>(l.points.size());
    double span = forward ? std::fmod(to - from + period, period) : std::fmod(from - to + period, period);
    double d = forward ? std::fmod(p - from + period, period) : std::fmod(from - p + period, period);
    return d > 0.0 && d < span;
}

struct ArcChoice {
    bool ok = false;
    std::vector<Point> inner;
    double length = 0.0;
};

// Arc along line `l` from `a` to `b` that passes no other crossing in `blockers`.
ArcChoice choose_arc(const Isoline& l, Loc a, Loc b, const std::vector<double>& blockers, Point ca, Point cb,
                     const Normalizer& nz) {
    ArcChoice best;
    std::vector<bool> directions;
    if (l.closed)
        directions = {true, false};
    else
        directions = {a.param() <= b.param()};
    for (bool fwd : directions) {
        bool clear = true;
        for (double p : blockers)
            if (strictly_between(l, a.param(), b.param(), p, fwd)) clear = false;
        if (!clear) continue;
        ArcChoice c;
        c.ok = true;
        c.inner = arc_between(l, a, b, fwd);
        Point prev = ca;
        for (const Point& q : c.inner) {
            c.length += nz.dist(prev, q);
            prev = q;
        }
        c.length += nz.dist(prev, cb);
        if (!best.ok || c.length < best.length) best = std::move(c);
    }
    return best;
}

struct Candidate {
    std::array<Point, 4> corners;
    std::array<std::vector<Point>, 4> paths;
    double score = 0.0;
};

bool path_valid(const ControlPlane& plane, const std::vector<Point>& path) {
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (!plane.valid(path[k].x, path[k].y)) return false;
        if (k + 1 < path.size()) {
            Point m{0.5 * (path[k].x + path[k + 1].x), 0.5 * (path[k].y + path[k + 1].y)};
            if (!plane.valid(m.x, m.y)) return false;
        }
    }
    return true;
}

}  // namespace

StirlingCycle build_cycle(const LandscapeMap& map, const CycleLevels& lv, const CycleOptions& opt) {
    if (!(lv.T_hot > lv.T_cold)) throw ConfigError("levels need T_hot > T_cold");
    if (!(lv.Dm_h > lv.Dm_l)) throw ConfigError("levels need Delta_m_h > Delta_m_l");
    if (!map.plane) throw ConfigError("landscape has no plane attached");
    const ControlPlane& plane = *map.plane;
    const Normalizer nz{map.spec};

    std::vector<Isoline> th, tc, dh, dl;
    try {
        th = trace_isoline(map, Field::Temperature, lv.T_hot, opt.refine_tol);
        tc = trace_isoline(map, Field::Temperature, lv.T_cold, opt.refine_tol);
        dh = trace_isoline(map, Field::OpticalSpring, lv.Dm_h, opt.refine_tol);
        dl = trace_isoline(map, Field::OpticalSpring, lv.Dm_l, opt.refine_tol);
    } catch (const EmptyLevel& e) {
        throw NoClosedLoop(std::string("level not attainable: ") + e.what());
    }

    auto all_hits = [&](const std::vector<Isoline>& T, const std::vector<Isoline>& D, double Tl, double Dl) {
        std::vector<Hit> out;
        for (std::size_t i = 0; i < T.size(); ++i)
            for (std::size_t j = 0; j < D.size(); ++j)
                for (Hit& h : intersect(T[i], D[j], i, j, nz)) {
                    try {
                        h.corner = refine_corner(map, h.raw, Tl, Dl, opt.refine_tol);
                    } catch (const NoConvergence&) {
                        continue;
                    }
                    if (!plane.valid(h.corner.x, h.corner.y)) continue;
                    out.push_back(h);
                }
        return out;
    };
    const auto h1 = all_hits(th, dh, lv.T_hot, lv.Dm_h);
    const auto h2 = all_hits(th, dl, lv.T_hot, lv.Dm_l);
    const auto h3 = all_hits(tc, dl, lv.T_cold, lv.Dm_l);
    const auto h4 = all_hits(tc, dh, lv.T_cold, lv.Dm_h);
    if (h1.empty() || h2.empty() || h3.empty() || h4.empty())
        throw NoClosedLoop("the isotherms and isochores do not intersect at all four corners inside the Valid region");

    // Crossing parameters along each line, used to keep arcs minimal.
    auto params_on_T = [](const std::vector<Hit>& hs, std::size_t line) {
        std::vector<double> ps;
        for (const Hit& h : hs)
            if (h.line_a == line) ps.push_back(h.loc_a.param());
        return ps;
    };
    auto params_on_D = [](const std::vector<Hit>& hs, std::size_t line) {
        std::vector<double> ps;
        for (const Hit& h : hs)
            if (h.line_b == line) ps.push_back(h.loc_b.param());
        return ps;
    };
    auto concat = [](std::vector<double> a, const std::vector<double>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };

    std::vector<Candidate> cands;
    for (const Hit& c1 : h1)
        for (const Hit& c2 : h2) {
            if (c2.line_a != c1.line_a) continue;
            for (const Hit& c3 : h3) {
                if (c3.line_b != c2.line_b) continue;
                for (const Hit& c4 : h4) {
                    if (c4.line_a != c3.line_a || c4.line_b != c1.line_b) continue;
                    const Isoline& L12 = th[c1.line_a];
                    const Isoline& L23 = dl[c2.line_b];
                    const Isoline& L34 = tc[c3.line_a];
                    const Isoline& L41 = dh[c1.line_b];
                    auto a12 = choose_arc(L12, c1.loc_a, c2.loc_a,
                                          concat(params_on_T(h1, c1.line_a), params_on_T(h2, c1.line_a)), c1.corner,
                                          c2.corner, nz);
                    auto a23 = choose_arc(L23, c2.loc_b, c3.loc_b,
                                          concat(params_on_D(h2, c2.line_b), params_on_D(h3, c2.line_b)), c2.corner,
                                          c3.corner, nz);
                    auto a34 = choose_arc(L34, c3.loc_a, c4.loc_a,
                                          concat(params_on_T(h3, c3.line_a), params_on_T(h4, c3.line_a)), c3.corner,
                                          c4.corner, nz);
                    auto a41 = choose_arc(L41, c4.loc_b, c1.loc_b,
                                          concat(params_on_D(h4, c1.line_b), params_on_D(h1, c1.line_b)), c4.corner,
                                          c1.corner, nz);
                    if (!a12.ok || !a23.ok || !a34.ok || !a41.ok) continue;
                    Candidate cand;
                    cand.corners = {c1.corner, c2.corner, c3.corner, c4.corner};
                    std::array<const ArcChoice*, 4> arcs = {&a12, &a23, &a34, &a41};
                    bool ok = true;
                    for (int k = 0; k < 4; ++k) {
                        auto& path = cand.paths[k];
                        path.push_back(cand.corners[k]);
                        path.insert(path.end(), arcs[k]->inner.begin(), arcs[k]->inner.end());
                        path.push_back(cand.corners[(k + 1) % 4]);
                        ok = ok && path_valid(plane, path);
                    }
                    if (!ok) continue;
                    double cu = 0, cv = 0;
                    for (const Point& p : cand.corners) {
                        cu += nz.u(p.x) / 4;
                        cv += nz.v(p.y) / 4;
                    }
                    cand.score = std::hypot(cu - 0.5, cv - 0.5);
                    cands.push_back(std::move(cand));
                }
            }
        }
    if (cands.empty()) throw NoClosedLoop("no set of four corners is joined by arcs lying in the Valid region");
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
    if (opt.branch < 0 || static_cast<std::size_t>(opt.branch) >= cands.size())
        throw NoClosedLoop("branch index " + std::to_string(opt.branch) + " out of range (" +
                           std::to_string(cands.size()) + " candidate loops)");

    Candidate& pick = cands[static_cast<std::size_t>(opt.branch)];
    StirlingCycle cyc;
    cyc.corners = pick.corners;
    cyc.levels = lv;
    cyc.spec = map.spec;
    cyc.plane = map.plane;
    cyc.branch = opt.branch;
    cyc.branch_count = static_cast<int>(cands.size());
    const std::array<StrokeKind, 4> kinds = {StrokeKind::IsothermalHot, StrokeKind::IsochoricLow,
                                             StrokeKind::IsothermalCold, StrokeKind::IsochoricHigh};
    const std::array<double, 4> levels = {lv.T_hot, lv.Dm_l, lv.T_cold, lv.Dm_h};
    for (int k = 0; k < 4; ++k) {
        Stroke& s = cyc.strokes[k];
        s.kind = kinds[k];
        s.field = k % 2 == 0 ? Field::Temperature : Field::OpticalSpring;
        s.level = levels[k];
        s.path = std::move(pick.paths[k]);
        for (const Point& p : s.path) {
            auto v = plane.value(s.field, p.x, p.y);
            double scale = s.level != 0.0 ? std::abs(s.level) : 1.0;
            double res = v ? std::abs(*v - s.level) / scale : INFINITY;
            cyc.max_residual = std::max(cyc.max_residual, res);
        }
    }
    if (cyc.max_residual > opt.refine_tol)
        throw NoClosedLoop("stroke vertices miss their level by " + format_double(cyc.max_residual));
    return cyc;
}

bool touches_nonadiabatic(const StirlingCycle& cycle, const LandscapeMap& map) {
    const GridSpec& g = map.spec;
    for (const Stroke& s : cycle.strokes) {
        for (const Point& p : s.path) {
            int i = static_cast<int>(std::floor((p.x - g.x_min) / g.dx()));
            int j = static_cast<int>(std::floor((p.y - g.y_min) / g.dy()));
            i = std::clamp(i, 0, g.nx - 2);
            j = std::clamp(j, 0, g.ny - 2);
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di)
                    if (map.at(i + di, j + dj).regime == RegimeClass::NonAdiabatic) return true;
        }
    }
    return false;
}

namespace {

json point_json(Point p) { return json::array({p.x, p.y}); }
Point point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json provenance_json(const Provenance& prov) {
    json pj = json::object();
    for (const auto& [k, v] : prov.entries) pj[k] = v;
    return pj;
}

json grid_json(const GridSpec& g) {
    return {{"x_name", g.x_name}, {"y_name", g.y_name}, {"x_min", g.x_min}, {"x_max", g.x_max},
            {"y_min", g.y_min},   {"y_max", g.y_max},   {"nx", g.nx},       {"ny", g.ny}};
}

GridSpec grid_from(const json& g) {
    return GridSpec{g.at("x_name").get<std::string>(), g.at("y_name").get<std::string>(), g.at("x_min").get<double>(),
                    g.at("x_max").get<double>(),       g.at("y_min").get<double>(),       g.at("y_max").get<double>(),
                    g.at("nx").get<int>(),             g.at("ny").get<int>()};
}

json levels_json(const CycleLevels& l) {
    return {{"T_hot", l.T_hot}, {"T_cold", l.T_cold}, {"Delta_m_h", l.Dm_h}, {"Delta_m_l", l.Dm_l}};
}

CycleLevels levels_from(const json& j) {
    return {j.at("T_hot").get<double>(), j.at("T_cold").get<double>(), j.at("Delta_m_h").get<double>(),
            j.at("Delta_m_l").get<double>()};
}

}  // namespace

std::string cycle_to_json(const StirlingCycle& c, const Provenance& prov) {
    json j;
    j["provenance"] = provenance_json(prov);
    j["grid"] = grid_json(c.spec);
    j["levels"] = levels_json(c.levels);
    j["branch"] = c.branch;
    j["branch_count"] = c.branch_count;
    j["max_residual"] = c.max_residual;
    json corners = json::array();
    for (const Point& p : c.corners) corners.push_back(point_json(p));
    j["corners"] = corners;
    json strokes = json::array();
    for (const Stroke& s : c.strokes) {
        json pts = json::array();
        for (const Point& p : s.path) pts.push_back(point_json(p));
        strokes.push_back({{"kind", to_string(s.kind)}, {"field", to_string(s.field)}, {"level", s.level}, {"path", pts}});
    }
    j["strokes"] = strokes;
    return j.dump(1) + "\n";
}

StirlingCycle cycle_from_json(const std::string& text) {
    try {
        json j = json::parse(text);
        StirlingCycle c;
        c.spec = grid_from(j.at("grid"));
        c.levels = levels_from(j.at("levels"));
        c.branch = j.at("branch").get<int>();
        c.branch_count = j.at("branch_count").get<int>();
        c.max_residual = j.at("max_residual").get<double>();
        for (int k = 0; k < 4; ++k) c.corners[k] = point_from(j.at("corners").at(k));
        for (int k = 0; k < 4; ++k) {
            const json& s = j.at("strokes").at(k);
            Stroke& st = c.strokes[k];
            st.kind = stroke_kind_from_string(s.at("kind").get<std::string>());
            st.field = s.at("field").get<std::string>() == "T" ? Field::Temperature : Field::OpticalSpring;
            st.level = s.at("level").get<double>();
            for (const json& p : s.at("path")) st.path.push_back(point_from(p));
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cycle JSON: ") + e.what());
    }
}

}  // namespace optostirling
