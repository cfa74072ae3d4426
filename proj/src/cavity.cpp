#include "optostirling/cavity.hpp"

#include "optostirling/errors.hpp"

#include <cmath>

namespace optostirling {

cplx feedback_mu(const PhysicalParams& p, const FeedbackParams& fb) {
    if (fb.g_fb() == 0.0) return {0.0, 0.0};
    double amp = 2.0 * std::sqrt(p.eta_d * p.kappa1 * p.kappa2) * fb.g_fb();
    return amp * std::exp(cplx(0.0, -fb.phi()));
}

EffectiveCavity effective_cavity(const PhysicalParams& p, const FeedbackParams& fb) {
    EffectiveCavity e;
    e.mu = feedback_mu(p, fb);
    e.kappa_eff = p.kappa - e.mu.real();
    e.Delta_eff = p.Delta - e.mu.imag();
    if (!(e.kappa_eff > 0.0))
        throw DegenerateCavity("kappa_eff = " + std::to_string(e.kappa_eff) + " <= 0");
    if (e.mu != cplx(0.0, 0.0)) {
        e.n_eff = std::norm(e.mu) / (4.0 * p.eta_d * e.kappa_eff * p.kappa2);
        e.m_eff = e.n_eff * (1.0 - 2.0 * p.eta_d * p.kappa2 / e.mu);
    }
    return e;
}

cplx chi(double omega, const EffectiveCavity& eff) {
    return 1.0 / cplx(eff.kappa_eff, eff.Delta_eff - omega);
}

namespace {

// Shared denominator of the two dressed responses.
cplx response_denominator(double omega, const EffectiveCavity& eff, cplx chi_w, cplx chi_mw_conj) {
    cplx den = 1.0 - std::norm(eff.mu) * chi_w * chi_mw_conj;
    if (std::abs(den) < kResponsePoleThreshold)
        throw ResponsePole("response pole at omega = " + std::to_string(omega));
    return den;
}

}  // namespace

cplx big_lambda(double omega, const EffectiveCavity& eff) {
    cplx cw = chi(omega, eff);
    cplx cmw = std::conj(chi(-omega, eff));
    cplx den = response_denominator(omega, eff, cw, cmw);
    return cw * (1.0 + eff.mu * cmw) / den;
}

cplx small_lambda(double omega, const EffectiveCavity& eff) {
    cplx cw = chi(omega, eff);
    cplx cmw = std::conj(chi(-omega, eff));
    cplx den = response_denominator(omega, eff, cw, cmw);
    return cw * (1.0 - std::conj(eff.mu) * cmw) / den;
}

double spectrum_x0(double omega, const EffectiveCavity& eff) {
    cplx lp = big_lambda(omega, eff);
    cplx lm = big_lambda(-omega, eff);
    double s = (eff.n_eff + 1.0) * std::norm(lp) + eff.n_eff * std::norm(lm) + 2.0 * (eff.m_eff * lp * lm).real();
    return 2.0 * eff.kappa_eff * s;
}

}  // namespace optostirling
