#pragma once

#include "optostirling/cycle.hpp"
#include "optostirling/io.hpp"

#include <array>
#include <string>
#include <vector>

namespace optostirling {

// One point of the integration mesh. Energies in units of hbar omega_m,
// accumulated from the start of the pass.
struct TrajectorySample {
    double t = 0.0;
    double n_b = 0.0;
    double U = 0.0;
    double Q_cum = 0.0;
    double W_cum = 0.0;   // U - U(0) - Q_cum
    double Wx_cum = 0.0;  // independent estimate: integral of (dDelta_m/dt) n_b
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    // Mesh index of every schedule sample (duplicate corner times share one).
    std::vector<std::size_t> schedule_nodes;
    int cycles_run = 0;
    bool converged = false;
    double periodicity = 0.0;  // last cycle-to-cycle change, relative
};

struct EngineOptions {
    double ode_tol = 1e-9;
    double conv_tol = 1e-6;
    int max_cycles = 50;
    double first_law_tol = 1e-3;
};

// Dormand-Prince 5(4) on dn_b/dt = -(gamma + Gamma_m(t)) (n_b - n_m(t)) with
// coefficients linear between schedule samples. Throws StepFailure.
Trajectory integrate_schedule(const Schedule& s, double n_b0, double ode_tol = 1e-9);

// Repeats the schedule from n_b0 = n_m(0) until successive passes agree to
// conv_tol (relative to the largest n_b). max_cycles = 0 returns one pass
// flagged unconverged.
Trajectory run_to_limit_cycle(const Schedule& s, double conv_tol = 1e-6, int max_cycles = 50,
                              double ode_tol = 1e-9);

// Integrals over [t_i, t_f] of one pass; t_i and t_f must lie in the mesh span.
double heat(const Trajectory& traj, const Schedule& s, double t_i, double t_f);
double work(const Trajectory& traj, const Schedule& s, double t_i, double t_f);
double work_crosscheck(const Trajectory& traj, const Schedule& s, double t_i, double t_f);
double internal_energy_change(const Trajectory& traj, double t_i, double t_f);

struct StrokeAccount {
    double Q = 0.0;
    double W = 0.0;
    double W_check = 0.0;
    double dU = 0.0;
};

struct EngineReport {
    double eta = 0.0;
    double P = 0.0;
    double Q_abs = 0.0;
    double Q_rej = 0.0;  // sum of negative stroke heats, <= 0
    double W_tot = 0.0;
    double dU_cycle = 0.0;
    std::array<StrokeAccount, 4> per_stroke{};
    double eta_C = 0.0;
    double eta_CA = 0.0;
    double t_tot = 0.0;
    double r_T = 0.0;
    CycleLevels levels;
    bool converged = false;
    int cycles_run = 0;
    double periodicity = 0.0;
    double max_first_law_residual = 0.0;  // max_k |dU - Q - W_check| / |Q|
};

// Accounting without the engine check.
EngineReport account(const Trajectory& traj, const Schedule& s);

// Throws NotAnEngine when W_tot >= 0.
EngineReport report(const Trajectory& traj, const Schedule& s);

std::string trajectory_to_csv(const Trajectory& traj, const Provenance& prov = {});
std::string report_to_json(const EngineReport& r, const Provenance& prov = {});

}  // namespace optostirling
