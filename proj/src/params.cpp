#include "optostirling/params.hpp"

#include "optostirling/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace optostirling {

FeedbackParams::FeedbackParams(double g_fb, double phi) : g_fb_(g_fb), phi_(phi) {}

FeedbackParams FeedbackParams::from_homodyne(double g_fb, double theta_fb, double tau_fb, double Delta) {
    FeedbackParams fb(g_fb, theta_fb - Delta * tau_fb);
    fb.theta_fb_ = theta_fb;
    fb.tau_fb_ = tau_fb;
    return fb;
}

ValidationResult validate_params(const PhysicalParams& p) {
    ValidationResult r;
    auto need = [&r](bool ok, const char* what) {
        if (!ok) r.violations.emplace_back(what);
    };
    need(std::isfinite(p.omega_m) && p.omega_m > 0, "omega_m > 0");
    need(p.kappa == p.kappa1 + p.kappa2, "kappa = kappa1+kappa2");
    need(p.gamma > 0, "gamma > 0");
    need(p.kappa1 >= 0, "kappa1 >= 0");
    need(p.kappa2 > 0, "kappa2 > 0");
    need(p.G >= 0, "G >= 0");
    need(p.eta_d > 0 && p.eta_d <= 1, "0 < eta_d <= 1");
    need(p.T_bath > 0, "T_bath > 0");
    need(p.n_T >= 0, "n_T >= 0");
    need(std::isfinite(p.Delta), "Delta finite");
    return r;
}

ValidationResult validate_feedback(const FeedbackParams& fb, double Delta) {
    ValidationResult r;
    if (!(fb.g_fb() >= 0)) r.violations.emplace_back("g_fb >= 0");
    if (fb.theta_fb() && fb.tau_fb()) {
        double expect = *fb.theta_fb() - Delta * *fb.tau_fb();
        if (std::abs(fb.phi() - expect) > 1e-12) r.violations.emplace_back("phi = theta_fb - Delta*tau_fb");
    }
    return r;
}

double thermal_occupation(double T_bath, double omega, const Constants& c) {
    double x = c.hbar * omega / (c.k_B * T_bath);
    return 1.0 / std::expm1(x);
}

PhysicalParams make_params(double omega_m, double gamma, double kappa1, double kappa2, double Delta,
                           double G, double eta_d, double T_bath, const Constants& c) {
    PhysicalParams p;
    p.omega_m = omega_m;
    p.gamma = gamma;
    p.kappa1 = kappa1;
    p.kappa2 = kappa2;
    p.kappa = kappa1 + kappa2;
    p.Delta = Delta;
    p.G = G;
    p.eta_d = eta_d;
    p.T_bath = T_bath;
    p.n_T = thermal_occupation(T_bath, omega_m, c);
    return p;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("invalid number for '" + key + "': '" + v + "'");
    }
    if (trim(v.substr(used)).size() != 0) throw ConfigError("invalid number for '" + key + "': '" + v + "'");
    return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& v, std::size_t n) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
    if (out.size() != n)
        throw ConfigError("'" + key + "' expects " + std::to_string(n) + " comma-separated values");
    return out;
}

void set_plane_key(PlaneDefaults& d, const std::string& sub, const std::string& key, const std::string& v) {
    if (sub == "window") {
        auto w = parse_list(key, v, 4);
        d.window = Window{w[0], w[1], w[2], w[3]};
    } else if (sub == "levels") {
        auto l = parse_list(key, v, 4);
        d.levels = CycleLevels{l[0], l[1], l[2], l[3]};
    } else if (sub == "t_tot") {
        d.t_tot = parse_number(key, v);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

}  // namespace

Preset parse_preset(const std::string& text, const std::string& name, const Constants& c) {
    std::map<std::string, double> scalars;
    Preset preset;
    preset.name = name;

    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'name = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");

        if (key.rfind("feedback.", 0) == 0) {
            set_plane_key(preset.feedback, key.substr(9), key, val);
        } else if (key.rfind("nofeedback.", 0) == 0) {
            set_plane_key(preset.nofeedback, key.substr(11), key, val);
        } else {
            static const char* known[] = {"omega_m", "f_m_hz", "gamma", "kappa1", "kappa2", "kappa",
                                          "Delta",   "G",      "eta_d", "T_bath"};
            bool ok = false;
            for (const char* k : known) ok = ok || key == k;
            if (!ok) throw ConfigError("unknown key '" + key + "'");
            scalars[key] = parse_number(key, val);
        }
    }

    if (scalars.count("omega_m") && scalars.count("f_m_hz"))
        throw ConfigError("give only one of 'omega_m' and 'f_m_hz'");
    if (scalars.count("f_m_hz")) scalars["omega_m"] = 2.0 * std::numbers::pi * scalars["f_m_hz"];

    for (const char* k : {"omega_m", "gamma", "kappa1", "kappa2", "Delta", "G", "eta_d", "T_bath"}) {
        if (!scalars.count(k)) throw ConfigError(std::string("missing required key '") + k + "'");
    }

    auto& s = scalars;
    preset.params = make_params(s["omega_m"], s["gamma"], s["kappa1"], s["kappa2"], s["Delta"], s["G"],
                                s["eta_d"], s["T_bath"], c);
    if (s.count("kappa")) preset.params.kappa = s["kappa"];
    return preset;
}

Preset load_preset_file(const std::string& path, const Constants& c) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
    if (auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    return parse_preset(ss.str(), name, c);
}

}  // namespace optostirling
