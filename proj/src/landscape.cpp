#include "optostirling/landscape.hpp"

#include "optostirling/errors.hpp"
#include "optostirling/parallel.hpp"

#include <json.hpp>

#include <sstream>

namespace optostirling {

using nlohmann::json;

void GridSpec::check() const {
    if (nx < 2 || ny < 2) throw ConfigError("grid needs nx, ny >= 2");
    if (!(x_min < x_max)) throw ConfigError("grid x bounds must satisfy x_min < x_max");
    if (!(y_min < y_max)) throw ConfigError("grid y bounds must satisfy y_min < y_max");
}

double GridSpec::x(int i) const {
    if (i == nx - 1) return x_max;
    return x_min + (x_max - x_min) * i / (nx - 1);
}

double GridSpec::y(int j) const {
    if (j == ny - 1) return y_max;
    return y_min + (y_max - y_min) * j / (ny - 1);
}

GridSpec make_grid(const ControlPlane& plane, const Window& w, int nx, int ny) {
    GridSpec g{plane.x_name(), plane.y_name(), w.x_min, w.x_max, w.y_min, w.y_max, nx, ny};
    g.check();
    return g;
}

std::size_t LandscapeMap::count(RegimeClass r) const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.regime == r;
    return n;
}

LandscapeMap map_plane(std::shared_ptr<const ControlPlane> plane, const GridSpec& spec, unsigned threads) {
    spec.check();
    LandscapeMap m;
    m.spec = spec;
    m.plane = plane;
    m.cells.resize(static_cast<std::size_t>(spec.nx) * spec.ny);
    parallel_for(
        static_cast<std::size_t>(spec.ny),
        [&](std::size_t j) {
            for (int i = 0; i < spec.nx; ++i) {
                CellRecord& c = m.cells[j * spec.nx + i];
                c.x = spec.x(i);
                c.y = spec.y(static_cast<int>(j));
                PointSample s = plane->sample(c.x, c.y);
                c.regime = s.regime;
                if (s.fields) {
                    c.T = s.fields->T;
                    c.Delta_m = s.fields->Delta_m;
                    c.Gamma_m = s.fields->Gamma_m;
                    c.n_m = s.fields->n_m;
                    c.kappa_eff = s.fields->kappa_eff;
                }
            }
        },
        threads == 0 ? default_threads() : threads);
    return m;
}

LandscapeMap map_feedback_plane(const PhysicalParams& p, const GridSpec& spec, double margin, const Constants& c,
                                unsigned threads) {
    return map_plane(std::make_shared<PhysicalPlane>(PlaneKind::Feedback, p, margin, c), spec, threads);
}

LandscapeMap map_nofeedback_plane(const PhysicalParams& p, const GridSpec& spec, double margin, const Constants& c,
                                  unsigned threads) {
    return map_plane(std::make_shared<PhysicalPlane>(PlaneKind::NoFeedback, p, margin, c), spec, threads);
}

namespace {

std::string axis_line(const std::string& name, double lo, double hi, int n) {
    return name + "," + format_double(lo) + "," + format_double(hi) + "," + std::to_string(n);
}

json params_to_json(const PhysicalParams& p) {
    return json{{"omega_m", p.omega_m}, {"gamma", p.gamma},   {"kappa1", p.kappa1}, {"kappa2", p.kappa2},
                {"kappa", p.kappa},     {"Delta", p.Delta},   {"G", p.G},           {"eta_d", p.eta_d},
                {"T_bath", p.T_bath},   {"n_T", p.n_T}};
}

PhysicalParams params_from_json(const json& j) {
    PhysicalParams p;
    p.omega_m = j.at("omega_m").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.kappa1 = j.at("kappa1").get<double>();
    p.kappa2 = j.at("kappa2").get<double>();
    p.kappa = j.at("kappa").get<double>();
    p.Delta = j.at("Delta").get<double>();
    p.G = j.at("G").get<double>();
    p.eta_d = j.at("eta_d").get<double>();
    p.T_bath = j.at("T_bath").get<double>();
    p.n_T = j.at("n_T").get<double>();
    return p;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::string landscape_to_csv(const LandscapeMap& m, const Provenance& prov) {
    std::ostringstream out;
    out << prov.csv_header();
    out << "# grid.x: " << axis_line(m.spec.x_name, m.spec.x_min, m.spec.x_max, m.spec.nx) << "\n";
    out << "# grid.y: " << axis_line(m.spec.y_name, m.spec.y_min, m.spec.y_max, m.spec.ny) << "\n";
    out << m.spec.x_name << "," << m.spec.y_name << ",T,Delta_m,Gamma_m,n_m,kappa_eff,regime\n";
    for (const auto& c : m.cells) {
        out << format_double(c.x) << ',' << format_double(c.y) << ',' << format_optional(c.T) << ','
            << format_optional(c.Delta_m) << ',' << format_optional(c.Gamma_m) << ',' << format_optional(c.n_m)
            << ',' << format_optional(c.kappa_eff) << ',' << to_string(c.regime) << '\n';
    }
    return out.str();
}

LandscapeMap landscape_from_csv(const std::string& text) {
    LandscapeMap m;
    bool have_x = false, have_y = false, have_header = false;
    std::istringstream in(text);
    std::string line;
    auto parse_axis = [](const std::string& s, std::string& name, double& lo, double& hi, int& n) {
        auto f = split_csv_line(s);
        if (f.size() != 4) throw ConfigError("malformed grid line '" + s + "'");
        name = f[0];
        lo = parse_double(f[1]);
        hi = parse_double(f[2]);
        n = std::stoi(f[3]);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# grid.x: ", 0) == 0) {
                parse_axis(line.substr(10), m.spec.x_name, m.spec.x_min, m.spec.x_max, m.spec.nx);
                have_x = true;
            } else if (line.rfind("# grid.y: ", 0) == 0) {
                parse_axis(line.substr(10), m.spec.y_name, m.spec.y_min, m.spec.y_max, m.spec.ny);
                have_y = true;
            }
            continue;
        }
        if (!have_header) {
            have_header = true;
            continue;
        }
        auto f = split_csv_line(line);
        if (f.size() != 8) throw ConfigError("landscape row has " + std::to_string(f.size()) + " fields, expected 8");
        CellRecord c;
        c.x = parse_double(f[0]);
        c.y = parse_double(f[1]);
        c.T = parse_optional(f[2]);
        c.Delta_m = parse_optional(f[3]);
        c.Gamma_m = parse_optional(f[4]);
        c.n_m = parse_optional(f[5]);
        c.kappa_eff = parse_optional(f[6]);
        c.regime = regime_from_string(f[7]);
        m.cells.push_back(c);
    }
    if (!have_x || !have_y) throw ConfigError("landscape CSV lacks grid header lines");
    m.spec.check();
    if (m.cells.size() != static_cast<std::size_t>(m.spec.nx) * m.spec.ny)
        throw ConfigError("landscape CSV cell count does not match the grid");
    return m;
}

std::string landscape_to_json(const LandscapeMap& m, const Provenance& prov) {
    json j;
    json pj = json::object();
    for (const auto& [k, v] : prov.entries) pj[k] = v;
    j["provenance"] = pj;
    j["grid"] = {{"x_name", m.spec.x_name}, {"y_name", m.spec.y_name}, {"x_min", m.spec.x_min},
                 {"x_max", m.spec.x_max},   {"y_min", m.spec.y_min},   {"y_max", m.spec.y_max},
                 {"nx", m.spec.nx},         {"ny", m.spec.ny}};
    if (auto pp = std::dynamic_pointer_cast<const PhysicalPlane>(m.plane)) {
        j["plane"] = {{"kind", to_string(pp->kind())},
                      {"margin", pp->margin()},
                      {"params", params_to_json(pp->params())},
                      {"hbar", pp->constants().hbar},
                      {"k_B", pp->constants().k_B}};
    }
    json xs = json::array(), ys = json::array(), T = json::array(), Dm = json::array(), Gm = json::array(),
         nm = json::array(), ke = json::array(), reg = json::array();
    for (const auto& c : m.cells) {
        xs.push_back(c.x);
        ys.push_back(c.y);
        T.push_back(opt_json(c.T));
        Dm.push_back(opt_json(c.Delta_m));
        Gm.push_back(opt_json(c.Gamma_m));
        nm.push_back(opt_json(c.n_m));
        ke.push_back(opt_json(c.kappa_eff));
        reg.push_back(to_string(c.regime));
    }
    j["x"] = xs;
    j["y"] = ys;
    j["T"] = T;
    j["Delta_m"] = Dm;
    j["Gamma_m"] = Gm;
    j["n_m"] = nm;
    j["kappa_eff"] = ke;
    j["regime"] = reg;
    return j.dump(1) + "\n";
}

LandscapeMap landscape_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("landscape JSON: ") + e.what());
    }
    try {
        LandscapeMap m;
        const auto& g = j.at("grid");
        m.spec = GridSpec{g.at("x_name").get<std::string>(), g.at("y_name").get<std::string>(),
                          g.at("x_min").get<double>(),       g.at("x_max").get<double>(),
                          g.at("y_min").get<double>(),       g.at("y_max").get<double>(),
                          g.at("nx").get<int>(),             g.at("ny").get<int>()};
        m.spec.check();
        std::size_t n = static_cast<std::size_t>(m.spec.nx) * m.spec.ny;
        for (const char* key : {"x", "y", "T", "Delta_m", "Gamma_m", "n_m", "kappa_eff", "regime"})
            if (j.at(key).size() != n) throw ConfigError(std::string("landscape JSON array '") + key + "' has wrong length");
        m.cells.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            auto& c = m.cells[k];
            c.x = j["x"][k].get<double>();
            c.y = j["y"][k].get<double>();
            c.T = opt_from_json(j["T"][k]);
            c.Delta_m = opt_from_json(j["Delta_m"][k]);
            c.Gamma_m = opt_from_json(j["Gamma_m"][k]);
            c.n_m = opt_from_json(j["n_m"][k]);
            c.kappa_eff = opt_from_json(j["kappa_eff"][k]);
            c.regime = regime_from_string(j["regime"][k].get<std::string>());
        }
        if (j.contains("plane")) {
            const auto& pl = j["plane"];
            Constants cst{pl.at("hbar").get<double>(), pl.at("k_B").get<double>()};
            m.plane = std::make_shared<PhysicalPlane>(plane_kind_from_string(pl.at("kind").get<std::string>()),
                                                      params_from_json(pl.at("params")),
                                                      pl.at("margin").get<double>(), cst);
        }
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("landscape JSON: ") + e.what());
    }
}

}  // namespace optostirling
