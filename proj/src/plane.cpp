#include "optostirling/plane.hpp"

#include "optostirling/errors.hpp"

#include <cmath>
#include <numbers>

namespace optostirling {

std::string to_string(Field f) { return f == Field::Temperature ? "T" : "Delta_m"; }

std::string to_string(PlaneKind k) { return k == PlaneKind::Feedback ? "feedback" : "nofeedback"; }

PlaneKind plane_kind_from_string(const std::string& s) {
    if (s == "feedback") return PlaneKind::Feedback;
    if (s == "nofeedback") return PlaneKind::NoFeedback;
    throw ConfigError("plane must be 'feedback' or 'nofeedback', got '" + s + "'");
}

PhysicalPlane::PhysicalPlane(PlaneKind kind, PhysicalParams p, double margin, Constants c)
    : kind_(kind), params_(p), margin_(margin), constants_(c) {}

std::string PhysicalPlane::x_name() const { return kind_ == PlaneKind::Feedback ? "phi" : "Delta"; }
std::string PhysicalPlane::y_name() const { return kind_ == PlaneKind::Feedback ? "g_fb" : "G"; }

std::pair<PhysicalParams, FeedbackParams> PhysicalPlane::at(double x, double y) const {
    if (kind_ == PlaneKind::Feedback) return {params_, FeedbackParams(y, x)};
    PhysicalParams p = params_;
    p.Delta = x;
    p.G = y;
    return {p, FeedbackParams(0.0, 0.0)};
}

PointSample PhysicalPlane::sample(double x, double y) const {
    auto [p, fb] = at(x, y);
    PointEvaluation ev = evaluate_point(p, fb, margin_, constants_);
    PointSample s;
    s.regime = ev.regime;
    s.kappa_eff = ev.kappa_eff;
    if (ev.has_fields) s.fields = FieldValues{ev.mech.T, ev.mech.Delta_m, ev.mech.Gamma_m, ev.mech.n_m, ev.kappa_eff};
    return s;
}

std::optional<FieldValues> PhysicalPlane::fields(double x, double y) const {
    auto [p, fb] = at(x, y);
    try {
        EffectiveCavity eff = effective_cavity(p, fb);
        MechanicalEffective me = mechanical_effective(p, eff, constants_);
        if (!std::isfinite(me.T) || !std::isfinite(me.Delta_m)) return std::nullopt;
        return FieldValues{me.T, me.Delta_m, me.Gamma_m, me.n_m, eff.kappa_eff};
    } catch (const Error&) {
        return std::nullopt;
    }
}

SyntheticPlane::SyntheticPlane(Fn T, Fn Delta_m, Pred valid, double gamma, double Gamma_m)
    : T_(std::move(T)), Dm_(std::move(Delta_m)), valid_(std::move(valid)), gamma_(gamma), Gamma_m_(Gamma_m) {}

std::optional<FieldValues> SyntheticPlane::fields(double x, double y) const {
    double T = T_(x, y);
    double dm = Dm_(x, y);
    return FieldValues{T, dm, Gamma_m_, T / (1.0 + dm), 1.0};
}

PointSample SyntheticPlane::sample(double x, double y) const {
    PointSample s;
    s.kappa_eff = 1.0;
    if (valid_ && !valid_(x, y)) {
        s.regime = RegimeClass::Unstable;
        return s;
    }
    s.regime = RegimeClass::Valid;
    s.fields = fields(x, y);
    return s;
}

Window default_window(PlaneKind kind, const PhysicalParams& p) {
    if (kind == PlaneKind::Feedback) {
        double unit = std::sqrt(p.eta_d * p.kappa1 * p.kappa2);
        double g_max = unit > 0 ? p.kappa / unit : 1.0;
        return Window{0.0, 2.0 * std::numbers::pi, 0.0, g_max};
    }
    return Window{-5.0, 5.0, 0.0, p.kappa / 2.0};
}

}  // namespace optostirling
