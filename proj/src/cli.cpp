#include "optostirling/cli.hpp"

#include "optostirling/cycle.hpp"
#include "optostirling/engine.hpp"
#include "optostirling/errors.hpp"
#include "optostirling/io.hpp"
#include "optostirling/landscape.hpp"
#include "optostirling/params.hpp"
#include "optostirling/sweep.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <sstream>

namespace optostirling {

namespace {

struct Options {
    std::string preset;
    std::string config;
    std::string out = ".";
    std::string plane = "feedback";
    std::vector<int> grid = {400, 400};
    std::vector<double> window;
    double margin = 0.0;
    unsigned threads = 0;

    std::vector<double> levels;
    std::optional<double> t_tot;
    double r_T = 0.5;
    int samples = kDefaultSamplesPerStroke;
    int branch = 0;
    double tol_refine = kDefaultRefineTol;
    double tol_ode = 1e-9;
    double tol_conv = 1e-6;
    int max_cycles = 50;

    std::string variable;
    std::string values_text;
    std::string ttot_text = "200,500,1000,1500,2000,3000,4000";
    std::string rT_text = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::vector<double> values, ttot_grid, rT_grid;
};

// Comma-separated numbers; an empty string is an empty list.
std::vector<double> parse_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    if (text.find_first_not_of(" \t") == std::string::npos) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
        if (a == std::string::npos) throw ConfigError("empty entry in '" + field + "'");
        try {
            out.push_back(parse_double(item.substr(a, b - a + 1)));
        } catch (const ConfigError&) {
            throw ConfigError("invalid number in '" + field + "': '" + item + "'");
        }
    }
    if (!text.empty() && text.back() == ',') throw ConfigError("empty entry in '" + field + "'");
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

Preset resolve_preset(const Options& o) {
    if (!o.preset.empty() && !o.config.empty()) throw ConfigError("give only one of --preset and --config");
    if (o.preset.empty() && o.config.empty()) throw ConfigError("missing field 'preset': pass --preset or --config");
    Preset p = o.preset.empty() ? load_preset_file(o.config) : builtin_preset(o.preset);
    auto v = validate_params(p.params);
    if (!v.ok()) {
        std::string msg = "invalid parameters:";
        for (const auto& s : v.violations) msg += " [" + s + "]";
        throw ConfigError(msg);
    }
    return p;
}

const PlaneDefaults& plane_defaults(const Preset& p, PlaneKind k) {
    return k == PlaneKind::Feedback ? p.feedback : p.nofeedback;
}

Window pick_window(const Options& o, const Preset& p, PlaneKind k, bool prefer_preset) {
    if (!o.window.empty()) {
        if (o.window.size() != 4) throw ConfigError("--window expects x_min,x_max,y_min,y_max");
        return {o.window[0], o.window[1], o.window[2], o.window[3]};
    }
    if (prefer_preset && plane_defaults(p, k).window) return *plane_defaults(p, k).window;
    return default_window(k, p.params);
}

CycleLevels pick_levels(const Options& o, const Preset& p, PlaneKind k) {
    if (!o.levels.empty()) {
        if (o.levels.size() != 4) throw ConfigError("--levels expects Thot,Tcold,Dmh,Dml");
        return {o.levels[0], o.levels[1], o.levels[2], o.levels[3]};
    }
    if (plane_defaults(p, k).levels) return *plane_defaults(p, k).levels;
    throw ConfigError("missing field 'levels': pass --levels Thot,Tcold,Dmh,Dml");
}

double pick_ttot(const Options& o, const Preset& p, PlaneKind k) {
    if (o.t_tot) {
        if (!(*o.t_tot > 0)) throw ConfigError("--ttot must be > 0");
        return *o.t_tot;
    }
    if (plane_defaults(p, k).t_tot) return *plane_defaults(p, k).t_tot;
    return 2000.0;
}

LandscapeMap build_map(const Options& o, const Preset& p, PlaneKind k, const Window& w) {
    if (o.grid.size() != 2) throw ConfigError("--grid expects nx,ny");
    auto plane = std::make_shared<PhysicalPlane>(k, p.params, o.margin);
    GridSpec g = make_grid(*plane, w, o.grid[0], o.grid[1]);
    return map_plane(plane, g, o.threads);
}

Provenance base_provenance(const std::string& command, const Options& o, const Preset& p, PlaneKind k,
                           const Window& w) {
    Provenance prov;
    prov.add("tool", "optostirling " + code_version());
    prov.add("command", command);
    prov.add("preset", p.name);
    prov.add("plane", to_string(k));
    prov.add("window", join({w.x_min, w.x_max, w.y_min, w.y_max}));
    prov.add("grid", std::to_string(o.grid.at(0)) + "," + std::to_string(o.grid.at(1)));
    prov.add("stability_margin", o.margin);
    return prov;
}

void add_cycle_provenance(Provenance& prov, const Options& o, const CycleLevels& lv) {
    prov.add("levels", join({lv.T_hot, lv.T_cold, lv.Dm_h, lv.Dm_l}));
    prov.add("samples_per_stroke", std::to_string(o.samples));
    prov.add("branch", std::to_string(o.branch));
    prov.add("tol_refine", o.tol_refine);
    prov.add("tol_ode", o.tol_ode);
    prov.add("tol_conv", o.tol_conv);
    prov.add("max_cycles", std::to_string(o.max_cycles));
}

int cmd_validate(const Options& o, std::ostream& out) {
    if (!o.preset.empty() && !o.config.empty()) throw ConfigError("give only one of --preset and --config");
    if (o.preset.empty() && o.config.empty()) throw ConfigError("missing field 'preset': pass --preset or --config");
    Preset p = o.preset.empty() ? load_preset_file(o.config) : builtin_preset(o.preset);
    auto v = validate_params(p.params);
    const auto& q = p.params;
    out << "preset " << p.name << "\n"
        << "  omega_m = " << format_double(q.omega_m) << " rad/s\n"
        << "  gamma = " << format_double(q.gamma) << ", kappa1 = " << format_double(q.kappa1)
        << ", kappa2 = " << format_double(q.kappa2) << ", kappa = " << format_double(q.kappa) << "\n"
        << "  Delta = " << format_double(q.Delta) << ", G = " << format_double(q.G)
        << ", eta_d = " << format_double(q.eta_d) << "\n"
        << "  T_bath = " << format_double(q.T_bath) << " K, n_T = " << format_double(q.n_T) << "\n";
    if (v.ok()) {
        out << "Ok\n";
        return kExitOk;
    }
    for (const auto& s : v.violations) out << "violation: " << s << "\n";
    return kExitConfig;
}

int cmd_map(const Options& o, std::ostream& out) {
    Preset p = resolve_preset(o);
    PlaneKind k = plane_kind_from_string(o.plane);
    Window w = pick_window(o, p, k, false);
    LandscapeMap m = build_map(o, p, k, w);
    Provenance prov = base_provenance("map", o, p, k, w);
    std::string stem = "landscape_" + to_string(k);
    atomic_write(join_path(o.out, stem + ".csv"), landscape_to_csv(m, prov));
    atomic_write(join_path(o.out, stem + ".json"), landscape_to_json(m, prov));
    out << "wrote " << stem << ".csv/.json: " << m.cells.size() << " points, " << m.count(RegimeClass::Valid)
        << " Valid, " << m.count(RegimeClass::NonAdiabatic) << " NonAdiabatic, " << m.count(RegimeClass::Unstable)
        << " Unstable, " << m.count(RegimeClass::Degenerate) << " Degenerate\n";
    return kExitOk;
}

int cmd_cycle(const Options& o, std::ostream& out) {
    Preset p = resolve_preset(o);
    PlaneKind k = plane_kind_from_string(o.plane);
    Window w = pick_window(o, p, k, true);
    CycleLevels lv = pick_levels(o, p, k);
    double t_tot = pick_ttot(o, p, k);
    LandscapeMap m = build_map(o, p, k, w);

    Provenance prov = base_provenance("cycle", o, p, k, w);
    add_cycle_provenance(prov, o, lv);
    prov.add("t_tot", t_tot);
    prov.add("r_T", o.r_T);

    StirlingCycle cyc = build_cycle(m, lv, CycleOptions{o.tol_refine, o.branch});
    Schedule s = make_schedule(cyc, t_tot, o.r_T, o.samples, o.tol_refine);
    Trajectory tr = run_to_limit_cycle(s, o.tol_conv, o.max_cycles, o.tol_ode);
    atomic_write(join_path(o.out, "cycle.json"), cycle_to_json(cyc, prov));
    atomic_write(join_path(o.out, "schedule.csv"), schedule_to_csv(s, prov));
    atomic_write(join_path(o.out, "schedule.json"), schedule_to_json(s, prov));
    atomic_write(join_path(o.out, "trajectory.csv"), trajectory_to_csv(tr, prov));
    EngineReport rep = report(tr, s);
    atomic_write(join_path(o.out, "report.json"), report_to_json(rep, prov));
    out << "eta = " << format_double(rep.eta) << "  P = " << format_double(rep.P)
        << "  eta_C = " << format_double(rep.eta_C) << "  eta_CA = " << format_double(rep.eta_CA)
        << "  converged = " << (rep.converged ? "yes" : "no") << " after " << rep.cycles_run << " cycles\n";
    return kExitOk;
}

int cmd_sweep(Options o, std::ostream& out) {
    Preset p = resolve_preset(o);
    PlaneKind k = plane_kind_from_string(o.plane);
    Window w = pick_window(o, p, k, true);
    CycleLevels lv = pick_levels(o, p, k);
    double t_tot = pick_ttot(o, p, k);
    if (o.variable.empty()) throw ConfigError("missing field 'variable': pass --variable");
    o.values = parse_list(o.values_text, "values");
    o.ttot_grid = parse_list(o.ttot_text, "ttot-grid");
    o.rT_grid = parse_list(o.rT_text, "rT-grid");
    if (o.values.empty()) throw ConfigError("missing field 'values': the value list is empty");

    SweepFixed fixed;
    fixed.levels = lv;
    fixed.t_tot = t_tot;
    fixed.r_T = o.r_T;
    fixed.n_samples = o.samples;
    fixed.cycle = CycleOptions{o.tol_refine, o.branch};
    fixed.engine = EngineOptions{o.tol_ode, o.tol_conv, o.max_cycles, 1e-3};

    Provenance prov = base_provenance("sweep", o, p, k, w);
    add_cycle_provenance(prov, o, lv);
    prov.add("t_tot", t_tot);
    prov.add("r_T", o.r_T);
    prov.add("variable", o.variable);
    prov.add("values", join(o.values));

    if (o.variable == "max-power") {
        SweepSpec check{SweepVariable::TemperatureRatio, o.values, fixed};
        check_sweep_spec(check);
        if (o.ttot_grid.empty() || o.rT_grid.empty()) throw ConfigError("max-power grids must be nonempty");
        prov.add("ttot_grid", join(o.ttot_grid));
        prov.add("rT_grid", join(o.rT_grid));
        LandscapeMap m = build_map(o, p, k, w);
        std::vector<MaxPowerRecord> recs;
        for (double ratio : o.values) {
            CycleLevels l = lv;
            l.T_hot = ratio * lv.T_cold;
            recs.push_back(efficiency_at_max_power(m, l, o.ttot_grid, o.rT_grid, fixed, o.threads));
            const auto& r = recs.back();
            out << "T_hot/T_cold = " << format_double(ratio) << ": eta* = " << format_double(r.eta)
                << " at t_tot = " << format_double(r.t_tot) << ", r_T = " << format_double(r.r_T)
                << " (eta_CA = " << format_double(r.eta_CA) << ")\n";
        }
        atomic_write(join_path(o.out, "max_power.csv"), max_power_to_csv(recs, prov));
        atomic_write(join_path(o.out, "max_power.json"), max_power_to_json(recs, prov));
        return kExitOk;
    }

    SweepSpec spec{sweep_variable_from_string(o.variable), o.values, fixed};
    check_sweep_spec(spec);
    LandscapeMap m = build_map(o, p, k, w);
    SweepResult res = run_sweep(spec, m, o.threads);
    std::string stem = "sweep_" + o.variable;
    atomic_write(join_path(o.out, stem + ".csv"), sweep_to_csv(res, prov));
    atomic_write(join_path(o.out, stem + ".json"), sweep_to_json(res, prov));
    for (const auto& r : res.rows)
        out << format_double(r.value) << ": " << r.status << "  eta = " << format_double(r.eta)
            << "  P = " << format_double(r.P) << "\n";
    return kExitOk;
}

void add_common(CLI::App* sub, Options& o, bool plane_opts) {
    sub->add_option("--preset", o.preset, "Built-in parameter preset (fig3, appB-weak, appB-strong)");
    sub->add_option("--config", o.config, "Key-value parameter file");
    if (!plane_opts) return;
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--plane", o.plane, "Control plane: feedback or nofeedback");
    sub->add_option("--grid", o.grid, "Grid size nx,ny")->delimiter(',')->expected(2);
    sub->add_option("--window", o.window, "x_min,x_max,y_min,y_max")->delimiter(',')->expected(4);
    sub->add_option("--margin", o.margin, "Stability margin on the largest eigenvalue real part");
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void add_cycle_opts(CLI::App* sub, Options& o) {
    sub->add_option("--levels", o.levels, "Thot,Tcold,Dmh,Dml")->delimiter(',')->expected(4);
    sub->add_option("--ttot", o.t_tot, "Total cycle time in units of 1/omega_m");
    sub->add_option("--rT", o.r_T, "Fraction of the cycle spent on the isotherms");
    sub->add_option("--samples", o.samples, "Schedule samples per stroke");
    sub->add_option("--branch", o.branch, "Candidate loop index, nearest the window centre first");
    sub->add_option("--tol-refine", o.tol_refine, "Relative level tolerance for isolines and corners");
    sub->add_option("--tol-ode", o.tol_ode, "Relative local error per integration step");
    sub->add_option("--tol-conv", o.tol_conv, "Limit-cycle convergence tolerance");
    sub->add_option("--max-cycles", o.max_cycles, "Maximum number of repeated cycles");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Optomechanical Stirling engine simulator", "optostirling"};
    app.require_subcommand(1);
    auto* validate = app.add_subcommand("validate", "Check a parameter set");
    auto* map = app.add_subcommand("map", "Sample the effective-parameter fields over a control plane");
    auto* cycle = app.add_subcommand("cycle", "Build a Stirling cycle and run the engine to its limit cycle");
    auto* sweep = app.add_subcommand("sweep", "Run a family of cycles");
    add_common(validate, o, false);
    add_common(map, o, true);
    add_common(cycle, o, true);
    add_cycle_opts(cycle, o);
    add_common(sweep, o, true);
    add_cycle_opts(sweep, o);
    sweep->add_option("--variable", o.variable, "temperature-ratio, compression-ratio, ttot, rT or max-power");
    sweep->add_option("--values", o.values_text, "Comma-separated swept values");
    sweep->add_option("--ttot-grid", o.ttot_text, "t_tot grid for max-power");
    sweep->add_option("--rT-grid", o.rT_text, "r_T grid for max-power");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (validate->parsed()) return cmd_validate(o, out);
        if (map->parsed()) return cmd_map(o, out);
        if (cycle->parsed()) return cmd_cycle(o, out);
        if (sweep->parsed()) return cmd_sweep(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NoClosedLoop& e) {
        err << "geometry failure: " << e.what() << "\n";
        return kExitGeometry;
    } catch (const EmptyLevel& e) {
        err << "geometry failure: " << e.what() << "\n";
        return kExitGeometry;
    } catch (const NotAnEngine& e) {
        err << "not an engine: " << e.what() << "\n";
        return kExitNotEngine;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitConfig;
}

}  // namespace optostirling
