#pragma once

#include "optostirling/cavity.hpp"
#include "optostirling/params.hpp"

namespace optostirling {

// Adiabatic-elimination products. Gamma_m and Delta_m in units of omega_m,
// T in kelvin.
struct MechanicalEffective {
    double Gamma_m = 0.0;
    double Delta_m = 0.0;
    double n_m = 0.0;
    double T = 0.0;
};

// omega_m arguments below are in internal units (1 for the resonator itself).
double gamma_m(const EffectiveCavity& eff, double G, double omega_m = 1.0);
double delta_m(const EffectiveCavity& eff, double G, double omega_m = 1.0);

// Throws HeatingRunaway when gamma + Gamma_m <= 0.
double bath_occupation(const EffectiveCavity& eff, double G, double omega_m, double gamma, double n_T);

// hbar omega_m (1 + Delta_m) n_m / k_B with omega_m_si in rad/s. Throws
// NegativeFrequency when 1 + Delta_m <= 0.
double effective_temperature(const MechanicalEffective& me, double omega_m_si, const Constants& c = {});

double nb_rate(double n_b, double gamma, double Gamma_m, double n_m);
double nb_analytic(double t, double n_b0, double gamma, double Gamma_m, double n_m);

// Full chain for one point: Gamma_m, Delta_m, n_m and T.
MechanicalEffective mechanical_effective(const PhysicalParams& p, const EffectiveCavity& eff,
                                         const Constants& c = {});

}  // namespace optostirling
