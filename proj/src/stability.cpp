#include "optostirling/stability.hpp"

#include "optostirling/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace optostirling {

std::string to_string(RegimeClass r) {
    switch (r) {
        case RegimeClass::Valid: return "Valid";
        case RegimeClass::NonAdiabatic: return "NonAdiabatic";
        case RegimeClass::Unstable: return "Unstable";
        case RegimeClass::Degenerate: return "Degenerate";
    }
    return "Degenerate";
}

RegimeClass regime_from_string(const std::string& s) {
    if (s == "Valid") return RegimeClass::Valid;
    if (s == "NonAdiabatic") return RegimeClass::NonAdiabatic;
    if (s == "Unstable") return RegimeClass::Unstable;
    if (s == "Degenerate") return RegimeClass::Degenerate;
    throw ConfigError("unknown regime label '" + s + "'");
}

DriftMatrix drift_matrix(const PhysicalParams& p, const EffectiveCavity& eff) {
    const cplx I(0.0, 1.0);
    const double G = p.G;
    DriftMatrix d;
    auto& A = d.entries;
    A << -(eff.kappa_eff + I * eff.Delta_eff), std::conj(eff.mu), -I * G, -I * G,
         eff.mu, -(eff.kappa_eff - I * eff.Delta_eff), I * G, I * G,
         -I * G, -I * G, -(p.gamma / 2.0 + I), 0.0,
         I * G, I * G, 0.0, -(p.gamma / 2.0 - I);
    return d;
}

std::array<cplx, 4> drift_eigenvalues(const DriftMatrix& m) {
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(m.entries, false);
    std::array<cplx, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = solver.eigenvalues()[i];
    return out;
}

double max_real_eigenvalue(const DriftMatrix& m) {
    double best = -std::numeric_limits<double>::infinity();
    for (const cplx& z : drift_eigenvalues(m)) best = std::max(best, z.real());
    return best;
}

bool is_stable(const DriftMatrix& m, double margin) { return max_real_eigenvalue(m) < -margin; }

PointEvaluation evaluate_point(const PhysicalParams& p, const FeedbackParams& fb, double margin, const Constants& c) {
    PointEvaluation out;
    EffectiveCavity eff;
    try {
        eff = effective_cavity(p, fb);
    } catch (const DegenerateCavity&) {
        out.regime = RegimeClass::Degenerate;
        out.kappa_eff = p.kappa - feedback_mu(p, fb).real();
        return out;
    }
    out.kappa_eff = eff.kappa_eff;
    if (!is_stable(drift_matrix(p, eff), margin)) {
        out.regime = RegimeClass::Unstable;
        return out;
    }
    // A stable point whose mechanical maps are undefined is still excluded.
    try {
        out.mech = mechanical_effective(p, eff, c);
    } catch (const Error&) {
        out.regime = RegimeClass::Unstable;
        return out;
    }
    if (!std::isfinite(out.mech.T) || !std::isfinite(out.mech.Delta_m) || out.mech.n_m < 0.0) {
        out.regime = RegimeClass::Unstable;
        return out;
    }
    out.has_fields = true;
    out.regime = eff.kappa_eff <= std::max(p.G, out.mech.Gamma_m) ? RegimeClass::NonAdiabatic : RegimeClass::Valid;
    return out;
}

RegimeClass regime_classify(const PhysicalParams& p, const FeedbackParams& fb, double margin) {
    return evaluate_point(p, fb, margin).regime;
}

}  // namespace optostirling
