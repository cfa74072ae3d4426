#pragma once

#include "optostirling/cycle.hpp"
#include "optostirling/engine.hpp"
#include "optostirling/landscape.hpp"

#include <string>
#include <vector>

namespace optostirling {

enum class SweepVariable { TemperatureRatio, CompressionRatio, TotalTime, IsothermalFraction };

std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

// Values held fixed while one variable is swept.
struct SweepFixed {
    CycleLevels levels;
    double t_tot = 2000.0;
    double r_T = 0.5;
    int n_samples = kDefaultSamplesPerStroke;
    CycleOptions cycle;
    EngineOptions engine;
};

// TemperatureRatio values are T_hot / T_cold with T_cold held; CompressionRatio
// values are (1 + Dm_h) / (1 + Dm_l) with Dm_h = -Dm_l; TotalTime values are
// t_tot; IsothermalFraction values are r_T.
struct SweepSpec {
    SweepVariable variable = SweepVariable::TotalTime;
    std::vector<double> values;
    SweepFixed fixed;
};

// Throws ConfigError for empty, non-monotone or out-of-domain values.
void check_sweep_spec(const SweepSpec& spec);

struct SweepRow {
    double value = 0.0;
    CycleLevels levels;
    double t_tot = 0.0;
    double r_T = 0.0;
    std::string status = "ok";  // ok, NoClosedLoop, NotAnEngine, NoConvergence, StepFailure
    std::string reason;
    double eta = 0.0;
    double P = 0.0;
    double W_tot = 0.0;
    double Q_abs = 0.0;
    double eta_C = 0.0;
    double eta_CA = 0.0;
    bool converged = false;
    int cycles_run = 0;
    bool nonadiabatic_contact = false;
    double max_first_law_residual = 0.0;

    [[nodiscard]] bool ok() const { return status == "ok"; }
};

struct SweepResult {
    SweepVariable variable = SweepVariable::TotalTime;
    std::vector<SweepRow> rows;
};

// Half-compression d with (1 + d) / (1 - d) = ratio.
double symmetric_spring_from_ratio(double ratio);

SweepResult run_sweep(const SweepSpec& spec, const LandscapeMap& map, unsigned threads = 0);

// One engine evaluation; failures land in the row status.
SweepRow evaluate_engine(const LandscapeMap& map, const CycleLevels& levels, double t_tot, double r_T,
                         const SweepFixed& fixed);

struct MaxPowerRecord {
    double eta = 0.0;
    double t_tot = 0.0;
    double r_T = 0.0;
    double P = 0.0;
    double eta_C = 0.0;
    double eta_CA = 0.0;
    CycleLevels levels;
    std::vector<SweepRow> grid;  // all evaluated points, t_tot-major
};

// Maximizes P over t_tot x r_T for fixed levels. Ties go to the smaller
// t_tot, then the smaller r_T. Throws NotAnEngine if no point gives W_tot < 0
// and NoClosedLoop if the cycle cannot be built.
MaxPowerRecord efficiency_at_max_power(const LandscapeMap& map, const CycleLevels& levels,
                                       std::vector<double> t_grid, std::vector<double> r_grid,
                                       const SweepFixed& fixed, unsigned threads = 0);

std::string sweep_to_csv(const SweepResult& r, const Provenance& prov = {});
std::string sweep_to_json(const SweepResult& r, const Provenance& prov = {});
std::string max_power_to_csv(const std::vector<MaxPowerRecord>& recs, const Provenance& prov = {});
std::string max_power_to_json(const std::vector<MaxPowerRecord>& recs, const Provenance& prov = {});

}  // namespace optostirling
