#include "optostirling/mech.hpp"

#include "optostirling/errors.hpp"

#include <cmath>

namespace optostirling {

namespace {

cplx response_difference(const EffectiveCavity& eff, double omega_m) {
    return big_lambda(omega_m, eff) - std::conj(big_lambda(-omega_m, eff));
}

}  // namespace

double gamma_m(const EffectiveCavity& eff, double G, double omega_m) {
    if (G == 0.0) return 0.0;
    return 2.0 * G * G * response_difference(eff, omega_m).real();
}

double delta_m(const EffectiveCavity& eff, double G, double omega_m) {
    if (G == 0.0) return 0.0;
    return G * G * response_difference(eff, omega_m).imag();
}

double bath_occupation(const EffectiveCavity& eff, double G, double omega_m, double gamma, double n_T) {
    double rate = gamma + gamma_m(eff, G, omega_m);
    if (!(rate > 0.0)) throw HeatingRunaway("gamma + Gamma_m = " + std::to_string(rate) + " <= 0");
    double drive = G == 0.0 ? 0.0 : G * G * spectrum_x0(-omega_m, eff);
    return (drive + gamma * n_T) / rate;
}

double effective_temperature(const MechanicalEffective& me, double omega_m_si, const Constants& c) {
    double w = 1.0 + me.Delta_m;
    if (!(w > 0.0)) throw NegativeFrequency("omega_m + Delta_m <= 0");
    return c.hbar * omega_m_si * w * me.n_m / c.k_B;
}

double nb_rate(double n_b, double gamma, double Gamma_m, double n_m) {
    return -(gamma + Gamma_m) * (n_b - n_m);
}

double nb_analytic(double t, double n_b0, double gamma, double Gamma_m, double n_m) {
    return n_m + (n_b0 - n_m) * std::exp(-(gamma + Gamma_m) * t);
}

MechanicalEffective mechanical_effective(const PhysicalParams& p, const EffectiveCavity& eff, const Constants& c) {
    MechanicalEffective me;
    if (p.G != 0.0) {
        cplx d = response_difference(eff, 1.0);
        me.Gamma_m = 2.0 * p.G * p.G * d.real();
        me.Delta_m = p.G * p.G * d.imag();
    }
    double rate = p.gamma + me.Gamma_m;
    if (!(rate > 0.0)) throw HeatingRunaway("gamma + Gamma_m = " + std::to_string(rate) + " <= 0");
    double drive = p.G == 0.0 ? 0.0 : p.G * p.G * spectrum_x0(-1.0, eff);
    me.n_m = (drive + p.gamma * p.n_T) / rate;
    me.T = effective_temperature(me, p.omega_m, c);
    return me;
}

}  // namespace optostirling
