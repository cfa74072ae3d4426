#pragma once

#include "optostirling/params.hpp"

#include <complex>

namespace optostirling {

using cplx = std::complex<double>;

// Feedback-dressed cavity. All rates in units of omega_m.
struct EffectiveCavity {
    cplx mu{0.0, 0.0};
    double kappa_eff = 0.0;
    double Delta_eff = 0.0;
    double n_eff = 0.0;
    cplx m_eff{0.0, 0.0};
};

// |1 - |mu|^2 chi(w) chi(-w)*| below this is treated as a pole.
inline constexpr double kResponsePoleThreshold = 1e-12;

cplx feedback_mu(const PhysicalParams& p, const FeedbackParams& fb);

// Throws DegenerateCavity when kappa_eff <= 0.
EffectiveCavity effective_cavity(const PhysicalParams& p, const FeedbackParams& fb);

cplx chi(double omega, const EffectiveCavity& eff);
cplx big_lambda(double omega, const EffectiveCavity& eff);
cplx small_lambda(double omega, const EffectiveCavity& eff);
double spectrum_x0(double omega, const EffectiveCavity& eff);

}  // namespace optostirling
