#include "optostirling/sweep.hpp"

#include "optostirling/errors.hpp"
#include "optostirling/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace optostirling {

std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::TemperatureRatio: return "temperature-ratio";
        case SweepVariable::CompressionRatio: return "compression-ratio";
        case SweepVariable::TotalTime: return "ttot";
        case SweepVariable::IsothermalFraction: return "rT";
    }
    return "ttot";
}

SweepVariable sweep_variable_from_string(const std::string& s) {
    for (auto v : {SweepVariable::TemperatureRatio, SweepVariable::CompressionRatio, SweepVariable::TotalTime,
                   SweepVariable::IsothermalFraction})
        if (to_string(v) == s) return v;
    throw ConfigError("unknown sweep variable '" + s + "'");
}

void check_sweep_spec(const SweepSpec& spec) {
    if (spec.values.empty()) throw ConfigError("sweep values must be nonempty");
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < spec.values.size(); ++i) {
        inc = inc && spec.values[i] > spec.values[i - 1];
        dec = dec && spec.values[i] < spec.values[i - 1];
    }
    if (!inc && !dec) throw ConfigError("sweep values must be strictly monotone");
    for (double v : spec.values) {
        bool ok = std::isfinite(v);
        switch (spec.variable) {
            case SweepVariable::TemperatureRatio:
            case SweepVariable::CompressionRatio: ok = ok && v > 1.0; break;
            case SweepVariable::TotalTime: ok = ok && v > 0.0; break;
            case SweepVariable::IsothermalFraction: ok = ok && v > 0.0 && v < 1.0; break;
        }
        if (!ok) throw ConfigError("sweep value " + format_double(v) + " is out of range for " + to_string(spec.variable));
    }
}

double symmetric_spring_from_ratio(double ratio) { return (ratio - 1.0) / (ratio + 1.0); }

namespace {

// A cycle that has been built and sampled once, reused across timings.
struct PreparedCycle {
    std::optional<Schedule> sampled;
    bool nonadiabatic = false;
    std::string status = "ok";
    std::string reason;
};

PreparedCycle prepare(const LandscapeMap& map, const CycleLevels& levels, const SweepFixed& fixed) {
    PreparedCycle pc;
    try {
        StirlingCycle cyc = build_cycle(map, levels, fixed.cycle);
        pc.nonadiabatic = touches_nonadiabatic(cyc, map);
        pc.sampled = sample_cycle(cyc, fixed.n_samples, fixed.cycle.refine_tol);
    } catch (const NoClosedLoop& e) {
        pc.status = "NoClosedLoop";
        pc.reason = e.what();
    } catch (const ConfigError& e) {
        pc.status = "NoClosedLoop";
        pc.reason = e.what();
    }
    return pc;
}

SweepRow run_engine(const PreparedCycle& pc, const CycleLevels& levels, double t_tot, double r_T,
                    const SweepFixed& fixed) {
    SweepRow row;
    row.levels = levels;
    row.t_tot = t_tot;
    row.r_T = r_T;
    row.eta_C = 1.0 - levels.T_cold / levels.T_hot;
    row.eta_CA = 1.0 - std::sqrt(levels.T_cold / levels.T_hot);
    row.nonadiabatic_contact = pc.nonadiabatic;
    if (!pc.sampled) {
        row.status = pc.status;
        row.reason = pc.reason;
        return row;
    }
    try {
        Schedule s = make_schedule(*pc.sampled, t_tot, r_T);
        Trajectory tr = run_to_limit_cycle(s, fixed.engine.conv_tol, fixed.engine.max_cycles, fixed.engine.ode_tol);
        EngineReport rep = account(tr, s);
        row.eta = rep.eta;
        row.P = rep.P;
        row.W_tot = rep.W_tot;
        row.Q_abs = rep.Q_abs;
        row.converged = rep.converged;
        row.cycles_run = rep.cycles_run;
        row.max_first_law_residual = rep.max_first_law_residual;
        if (rep.W_tot >= 0.0) {
            row.status = "NotAnEngine";
            row.reason = "W_tot = " + format_double(rep.W_tot) + " >= 0";
        } else if (!rep.converged) {
            row.status = "NoConvergence";
            row.reason = "limit cycle not reached in " + std::to_string(rep.cycles_run) + " cycles";
        }
    } catch (const StepFailure& e) {
        row.status = "StepFailure";
        row.reason = e.what();
    } catch (const ConfigError& e) {
        row.status = "ConfigError";
        row.reason = e.what();
    }
    return row;
}

CycleLevels levels_for(const SweepSpec& spec, double v) {
    CycleLevels l = spec.fixed.levels;
    if (spec.variable == SweepVariable::TemperatureRatio) {
        l.T_hot = v * l.T_cold;
    } else if (spec.variable == SweepVariable::CompressionRatio) {
        double d = symmetric_spring_from_ratio(v);
        l.Dm_h = d;
        l.Dm_l = -d;
    }
    return l;
}

}  // namespace

SweepRow evaluate_engine(const LandscapeMap& map, const CycleLevels& levels, double t_tot, double r_T,
                         const SweepFixed& fixed) {
    return run_engine(prepare(map, levels, fixed), levels, t_tot, r_T, fixed);
}

SweepResult run_sweep(const SweepSpec& spec, const LandscapeMap& map, unsigned threads) {
    check_sweep_spec(spec);
    SweepResult res;
    res.variable = spec.variable;
    res.rows.resize(spec.values.size());
    if (threads == 0) threads = default_threads();

    const bool fixed_geometry =
        spec.variable == SweepVariable::TotalTime || spec.variable == SweepVariable::IsothermalFraction;
    std::optional<PreparedCycle> shared;
    if (fixed_geometry) shared = prepare(map, spec.fixed.levels, spec.fixed);

    parallel_for(
        spec.values.size(),
        [&](std::size_t i) {
            double v = spec.values[i];
            CycleLevels lv = levels_for(spec, v);
            double t_tot = spec.variable == SweepVariable::TotalTime ? v : spec.fixed.t_tot;
            double r_T = spec.variable == SweepVariable::IsothermalFraction ? v : spec.fixed.r_T;
            SweepRow row = shared ? run_engine(*shared, lv, t_tot, r_T, spec.fixed)
                                  : run_engine(prepare(map, lv, spec.fixed), lv, t_tot, r_T, spec.fixed);
            row.value = v;
            res.rows[i] = std::move(row);
        },
        threads);
    return res;
}

MaxPowerRecord efficiency_at_max_power(const LandscapeMap& map, const CycleLevels& levels, std::vector<double> t_grid,
                                       std::vector<double> r_grid, const SweepFixed& fixed, unsigned threads) {
    if (t_grid.empty() || r_grid.empty()) throw ConfigError("max-power grid must be nonempty");
    for (double t : t_grid)
        if (!(std::isfinite(t) && t > 0)) throw ConfigError("t_tot grid value " + format_double(t) + " must be > 0");
    for (double r : r_grid)
        if (!(r > 0 && r < 1)) throw ConfigError("r_T grid value " + format_double(r) + " must lie in (0, 1)");
    std::sort(t_grid.begin(), t_grid.end());
    std::sort(r_grid.begin(), r_grid.end());
    PreparedCycle pc = prepare(map, levels, fixed);
    if (!pc.sampled) throw NoClosedLoop(pc.reason);

    MaxPowerRecord rec;
    rec.levels = levels;
    rec.eta_C = 1.0 - levels.T_cold / levels.T_hot;
    rec.eta_CA = 1.0 - std::sqrt(levels.T_cold / levels.T_hot);
    rec.grid.resize(t_grid.size() * r_grid.size());
    parallel_for(
        rec.grid.size(),
        [&](std::size_t k) {
            double t = t_grid[k / r_grid.size()];
            double r = r_grid[k % r_grid.size()];
            rec.grid[k] = run_engine(pc, levels, t, r, fixed);
            rec.grid[k].value = t;
        },
        threads == 0 ? default_threads() : threads);

    const SweepRow* best = nullptr;
    for (const SweepRow& row : rec.grid) {
        if (row.status != "ok") continue;
        if (!best || row.P > best->P) best = &row;
    }
    if (!best) throw NotAnEngine("no grid point yields W_tot < 0");
    rec.eta = best->eta;
    rec.t_tot = best->t_tot;
    rec.r_T = best->r_T;
    rec.P = best->P;
    return rec;
}

namespace {

const char* kRowHeader =
    "value,T_hot,T_cold,Delta_m_h,Delta_m_l,t_tot,r_T,eta,P,eta_C,eta_CA,W_tot,Q_abs,converged,cycles_run,"
    "nonadiabatic_contact,first_law_residual,status,reason";

std::string csv_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string row_csv(const SweepRow& r) {
    std::ostringstream o;
    o << format_double(r.value) << ',' << format_double(r.levels.T_hot) << ',' << format_double(r.levels.T_cold) << ','
      << format_double(r.levels.Dm_h) << ',' << format_double(r.levels.Dm_l) << ',' << format_double(r.t_tot) << ','
      << format_double(r.r_T) << ',' << format_double(r.eta) << ',' << format_double(r.P) << ','
      << format_double(r.eta_C) << ',' << format_double(r.eta_CA) << ',' << format_double(r.W_tot) << ','
      << format_double(r.Q_abs) << ',' << (r.converged ? 1 : 0) << ',' << r.cycles_run << ','
      << (r.nonadiabatic_contact ? 1 : 0) << ',' << format_double(r.max_first_law_residual) << ',' << r.status << ','
      << csv_escape(r.reason);
    return o.str();
}

nlohmann::json row_json(const SweepRow& r) {
    return {{"value", r.value},
            {"T_hot", r.levels.T_hot},
            {"T_cold", r.levels.T_cold},
            {"Delta_m_h", r.levels.Dm_h},
            {"Delta_m_l", r.levels.Dm_l},
            {"t_tot", r.t_tot},
            {"r_T", r.r_T},
            {"eta", r.eta},
            {"P", r.P},
            {"eta_C", r.eta_C},
            {"eta_CA", r.eta_CA},
            {"W_tot", r.W_tot},
            {"Q_abs", r.Q_abs},
            {"converged", r.converged},
            {"cycles_run", r.cycles_run},
            {"nonadiabatic_contact", r.nonadiabatic_contact},
            {"first_law_residual", r.max_first_law_residual},
            {"status", r.status},
            {"reason", r.reason}};
}

nlohmann::json prov_json(const Provenance& prov) {
    nlohmann::json pj = nlohmann::json::object();
    for (const auto& [k, v] : prov.entries) pj[k] = v;
    return pj;
}

}  // namespace

std::string sweep_to_csv(const SweepResult& r, const Provenance& prov) {
    std::ostringstream o;
    o << prov.csv_header() << "# variable: " << to_string(r.variable) << '\n' << kRowHeader << '\n';
    for (const auto& row : r.rows) o << row_csv(row) << '\n';
    return o.str();
}

std::string sweep_to_json(const SweepResult& r, const Provenance& prov) {
    nlohmann::json j;
    j["provenance"] = prov_json(prov);
    j["variable"] = to_string(r.variable);
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) j["rows"].push_back(row_json(row));
    return j.dump(1) + "\n";
}

std::string max_power_to_csv(const std::vector<MaxPowerRecord>& recs, const Provenance& prov) {
    std::ostringstream o;
    o << prov.csv_header();
    o << "T_ratio,T_hot,T_cold,eta_star,t_tot_star,r_T_star,P_star,eta_C,eta_CA\n";
    for (const auto& r : recs) {
        o << format_double(r.levels.T_hot / r.levels.T_cold) << ',' << format_double(r.levels.T_hot) << ','
          << format_double(r.levels.T_cold) << ',' << format_double(r.eta) << ',' << format_double(r.t_tot) << ','
          << format_double(r.r_T) << ',' << format_double(r.P) << ',' << format_double(r.eta_C) << ','
          << format_double(r.eta_CA) << '\n';
    }
    return o.str();
}

std::string max_power_to_json(const std::vector<MaxPowerRecord>& recs, const Provenance& prov) {
    nlohmann::json j;
    j["provenance"] = prov_json(prov);
    j["records"] = nlohmann::json::array();
    for (const auto& r : recs) {
        nlohmann::json g = nlohmann::json::array();
        for (const auto& row : r.grid) g.push_back(row_json(row));
        j["records"].push_back({{"T_ratio", r.levels.T_hot / r.levels.T_cold},
                                {"T_hot", r.levels.T_hot},
                                {"T_cold", r.levels.T_cold},
                                {"eta_star", r.eta},
                                {"t_tot_star", r.t_tot},
                                {"r_T_star", r.r_T},
                                {"P_star", r.P},
                                {"eta_C", r.eta_C},
                                {"eta_CA", r.eta_CA},
                                {"grid", g}});
    }
    return j.dump(1) + "\n";
}

}  // namespace optostirling
