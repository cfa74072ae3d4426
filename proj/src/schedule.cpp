#include "optostirling/cycle.hpp"
#include "optostirling/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace optostirling {

using nlohmann::json;

namespace {

struct Frame {
    const GridSpec& g;
    [[nodiscard]] double wx() const { return g.x_max - g.x_min; }
    [[nodiscard]] double wy() const { return g.y_max - g.y_min; }
    [[nodiscard]] double dist(Point a, Point b) const { return std::hypot((a.x - b.x) / wx(), (a.y - b.y) / wy()); }
};

// Moves p onto the level set along the normal of chord a->b (normalized
// coordinates). Returns p unchanged if no Valid root is found nearby.
Point project(const ControlPlane& plane, const Frame& fr, Field f, double level, double tol, Point p, Point a,
              Point b) {
    const double scale = level != 0.0 ? std::abs(level) : 1.0;
    auto resid = [&](double s, double nu, double nv) -> std::optional<double> {
        auto v = plane.value(f, p.x + s * nu * fr.wx(), p.y + s * nv * fr.wy());
        if (!v) return std::nullopt;
        return *v - level;
    };
    double tu = (b.x - a.x) / fr.wx(), tv = (b.y - a.y) / fr.wy();
    double len = std::hypot(tu, tv);
    if (len == 0.0) return p;
    double nu = -tv / len, nv = tu / len;
    auto r0 = resid(0.0, nu, nv);
    if (!r0) return p;
    if (std::abs(*r0) <= 0.01 * tol * scale) return p;
    const double cell = std::min(1.0 / (fr.g.nx - 1), 1.0 / (fr.g.ny - 1));
    for (double reach = cell / 1024.0; reach <= cell; reach *= 2.0) {
        for (double sgn : {1.0, -1.0}) {
            double s1 = sgn * reach;
            auto r1 = resid(s1, nu, nv);
            if (!r1 || ((*r1 < 0) == (*r0 < 0))) continue;
            double lo = 0.0, hi = s1, rlo = *r0;
            double best = 0.0, best_r = std::abs(*r0);
            for (int it = 0; it < 200; ++it) {
                double m = 0.5 * (lo + hi);
                if (m == lo || m == hi) break;
                auto rm = resid(m, nu, nv);
                if (!rm) break;
                if (std::abs(*rm) < best_r) {
                    best_r = std::abs(*rm);
                    best = m;
                }
                if (std::abs(*rm) <= 0.01 * tol * scale) break;
                if ((*rm < 0) == (rlo < 0)) {
                    lo = m;
                    rlo = *rm;
                } else {
                    hi = m;
                }
            }
            Point q{p.x + best * nu * fr.wx(), p.y + best * nv * fr.wy()};
            if (plane.valid(q.x, q.y)) return q;
            return p;
        }
    }
    return p;
}

}  // namespace

Schedule sample_cycle(const StirlingCycle& cycle, int n_samples, double refine_tol) {
    if (n_samples < 4) throw ConfigError("need at least 4 samples per stroke");
    if (!cycle.plane) throw ConfigError("cycle has no plane attached");
    const ControlPlane& plane = *cycle.plane;
    const Frame fr{cycle.spec};

    Schedule sch;
    sch.gamma = plane.gamma();
    sch.levels = cycle.levels;
    sch.x_name = plane.x_name();
    sch.y_name = plane.y_name();

    double s_offset = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Stroke& st = cycle.strokes[k];
        const auto& path = st.path;
        std::vector<double> cum(path.size(), 0.0);
        for (std::size_t i = 1; i < path.size(); ++i) cum[i] = cum[i - 1] + fr.dist(path[i - 1], path[i]);
        const double total = cum.back();
        sch.stroke_begin[k] = sch.samples.size();
        std::size_t seg = 0;
        for (int m = 0; m < n_samples; ++m) {
            double frac = static_cast<double>(m) / (n_samples - 1);
            Point p;
            if (m == 0) {
                p = path.front();
            } else if (m == n_samples - 1) {
                p = path.back();
            } else {
                double target = frac * total;
                while (seg + 2 < path.size() && cum[seg + 1] < target) ++seg;
                double segl = cum[seg + 1] - cum[seg];
                double w = segl > 0 ? (target - cum[seg]) / segl : 0.0;
                Point a = path[seg], b = path[seg + 1];
                p = {a.x + (b.x - a.x) * w, a.y + (b.y - a.y) * w};
                p = project(plane, fr, st.field, st.level, refine_tol, p, a, b);
            }
            ScheduleSample smp;
            smp.frac = frac;
            smp.s = s_offset + frac * total;
            smp.stroke = k;
            smp.x = p.x;
            smp.y = p.y;
            PointSample ps = plane.sample(p.x, p.y);
            smp.regime = ps.regime;
            if (!ps.fields) ps.fields = plane.fields(p.x, p.y);
            if (!ps.fields) throw NoClosedLoop("schedule sample outside the region where the fields exist");
            smp.T = ps.fields->T;
            smp.Delta_m = ps.fields->Delta_m;
            smp.Gamma_m = ps.fields->Gamma_m;
            smp.n_m = ps.fields->n_m;
            sch.samples.push_back(smp);
        }
        sch.stroke_end[k] = sch.samples.size() - 1;
        s_offset += total;
    }
    return sch;
}

Schedule make_schedule(const Schedule& sampled, double t_tot, double r_T) {
    if (!(t_tot > 0.0)) throw ConfigError("t_tot must be > 0");
    if (!(r_T > 0.0 && r_T < 1.0)) throw ConfigError("r_T must lie in (0, 1)");
    Schedule s = sampled;
    s.t_tot = t_tot;
    s.r_T = r_T;
    double t0 = 0.0;
    for (int k = 0; k < 4; ++k) {
        double d = s.stroke_duration(k);
        for (std::size_t i = s.stroke_begin[k]; i <= s.stroke_end[k]; ++i) s.samples[i].t = t0 + s.samples[i].frac * d;
        t0 += d;
        // Pin the stroke end exactly so consecutive strokes share the corner time.
        s.samples[s.stroke_end[k]].t = t0;
    }
    s.samples.back().t = t_tot;
    return s;
}

Schedule make_schedule(const StirlingCycle& cycle, double t_tot, double r_T, int n_samples, double refine_tol) {
    return make_schedule(sample_cycle(cycle, n_samples, refine_tol), t_tot, r_T);
}

std::string schedule_to_csv(const Schedule& s, const Provenance& prov) {
    std::ostringstream out;
    out << prov.csv_header();
    out << "t,s,stroke," << s.x_name << ',' << s.y_name << ",T,Delta_m,Gamma_m,n_m,regime\n";
    for (const auto& m : s.samples) {
        out << format_double(m.t) << ',' << format_double(m.s) << ',' << m.stroke + 1 << ',' << format_double(m.x)
            << ',' << format_double(m.y) << ',' << format_double(m.T) << ',' << format_double(m.Delta_m) << ','
            << format_double(m.Gamma_m) << ',' << format_double(m.n_m) << ',' << to_string(m.regime) << '\n';
    }
    return out.str();
}

std::string schedule_to_json(const Schedule& s, const Provenance& prov) {
    json j;
    json pj = json::object();
    for (const auto& [k, v] : prov.entries) pj[k] = v;
    j["provenance"] = pj;
    j["t_tot"] = s.t_tot;
    j["r_T"] = s.r_T;
    j["gamma"] = s.gamma;
    j["levels"] = {{"T_hot", s.levels.T_hot},
                   {"T_cold", s.levels.T_cold},
                   {"Delta_m_h", s.levels.Dm_h},
                   {"Delta_m_l", s.levels.Dm_l}};
    j["x_name"] = s.x_name;
    j["y_name"] = s.y_name;
    j["stroke_begin"] = s.stroke_begin;
    j["stroke_end"] = s.stroke_end;
    json cols = {{"t", json::array()},     {"s", json::array()},       {"frac", json::array()},
                 {"stroke", json::array()}, {"x", json::array()},       {"y", json::array()},
                 {"T", json::array()},      {"Delta_m", json::array()}, {"Gamma_m", json::array()},
                 {"n_m", json::array()},    {"regime", json::array()}};
    for (const auto& m : s.samples) {
        cols["t"].push_back(m.t);
        cols["s"].push_back(m.s);
        cols["frac"].push_back(m.frac);
        cols["stroke"].push_back(m.stroke);
        cols["x"].push_back(m.x);
        cols["y"].push_back(m.y);
        cols["T"].push_back(m.T);
        cols["Delta_m"].push_back(m.Delta_m);
        cols["Gamma_m"].push_back(m.Gamma_m);
        cols["n_m"].push_back(m.n_m);
        cols["regime"].push_back(to_string(m.regime));
    }
    j["samples"] = cols;
    return j.dump(1) + "\n";
}

Schedule schedule_from_json(const std::string& text) {
    try {
        json j = json::parse(text);
        Schedule s;
        s.t_tot = j.at("t_tot").get<double>();
        s.r_T = j.at("r_T").get<double>();
        s.gamma = j.at("gamma").get<double>();
        const json& l = j.at("levels");
        s.levels = {l.at("T_hot").get<double>(), l.at("T_cold").get<double>(), l.at("Delta_m_h").get<double>(),
                    l.at("Delta_m_l").get<double>()};
        s.x_name = j.at("x_name").get<std::string>();
        s.y_name = j.at("y_name").get<std::string>();
        s.stroke_begin = j.at("stroke_begin").get<std::array<std::size_t, 4>>();
        s.stroke_end = j.at("stroke_end").get<std::array<std::size_t, 4>>();
        const json& c = j.at("samples");
        std::size_t n = c.at("t").size();
        s.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& m = s.samples[i];
            m.t = c["t"][i].get<double>();
            m.s = c["s"][i].get<double>();
            m.frac = c["frac"][i].get<double>();
            m.stroke = c["stroke"][i].get<int>();
            m.x = c["x"][i].get<double>();
            m.y = c["y"][i].get<double>();
            m.T = c["T"][i].get<double>();
            m.Delta_m = c["Delta_m"][i].get<double>();
            m.Gamma_m = c["Gamma_m"][i].get<double>();
            m.n_m = c["n_m"][i].get<double>();
            m.regime = regime_from_string(c["regime"][i].get<std::string>());
        }
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("schedule JSON: ") + e.what());
    }
}

}  // namespace optostirling
