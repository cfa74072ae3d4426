#pragma once

#include "optostirling/params.hpp"
#include "optostirling/stability.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace optostirling {

enum class Field { Temperature, OpticalSpring };

std::string to_string(Field f);

struct FieldValues {
    double T = 0.0;
    double Delta_m = 0.0;
    double Gamma_m = 0.0;
    double n_m = 0.0;
    double kappa_eff = 0.0;
};

inline double field_value(const FieldValues& v, Field f) {
    return f == Field::Temperature ? v.T : v.Delta_m;
}

struct PointSample {
    RegimeClass regime = RegimeClass::Degenerate;
    double kappa_eff = 0.0;
    std::optional<FieldValues> fields;
};

// A two-parameter family of operating points. x and y are the steerable
// control coordinates.
class ControlPlane {
public:
    virtual ~ControlPlane() = default;

    [[nodiscard]] virtual std::string x_name() const = 0;
    [[nodiscard]] virtual std::string y_name() const = 0;

    // Full classification at (x, y).
    [[nodiscard]] virtual PointSample sample(double x, double y) const = 0;

    // Field values without the stability check; empty when the maps are
    // undefined at (x, y).
    [[nodiscard]] virtual std::optional<FieldValues> fields(double x, double y) const = 0;

    // Intrinsic mechanical damping entering the rate equation.
    [[nodiscard]] virtual double gamma() const = 0;

    [[nodiscard]] std::optional<double> value(Field f, double x, double y) const {
        auto v = fields(x, y);
        if (!v) return std::nullopt;
        return field_value(*v, f);
    }

    [[nodiscard]] bool valid(double x, double y) const { return sample(x, y).regime == RegimeClass::Valid; }
};

enum class PlaneKind { Feedback, NoFeedback };

std::string to_string(PlaneKind k);
PlaneKind plane_kind_from_string(const std::string& s);

// (phi, g_fb) with the device fixed, or (Delta, G) with g_fb = 0.
class PhysicalPlane final : public ControlPlane {
public:
    PhysicalPlane(PlaneKind kind, PhysicalParams p, double margin = 0.0, Constants c = {});

    [[nodiscard]] std::string x_name() const override;
    [[nodiscard]] std::string y_name() const override;
    [[nodiscard]] PointSample sample(double x, double y) const override;
    [[nodiscard]] std::optional<FieldValues> fields(double x, double y) const override;
    [[nodiscard]] double gamma() const override { return params_.gamma; }

    [[nodiscard]] PlaneKind kind() const { return kind_; }
    [[nodiscard]] const PhysicalParams& params() const { return params_; }
    [[nodiscard]] double margin() const { return margin_; }
    [[nodiscard]] const Constants& constants() const { return constants_; }

private:
    [[nodiscard]] std::pair<PhysicalParams, FeedbackParams> at(double x, double y) const;

    PlaneKind kind_;
    PhysicalParams params_;
    double margin_;
    Constants constants_;
};

// Analytic fields for geometry tests. n_m is taken as T / (1 + Delta_m), so
// one temperature unit corresponds to one quantum.
class SyntheticPlane final : public ControlPlane {
public:
    using Fn = std::function<double(double, double)>;
    using Pred = std::function<bool(double, double)>;

    SyntheticPlane(Fn T, Fn Delta_m, Pred valid = {}, double gamma = 1e-3, double Gamma_m = 0.05);

    [[nodiscard]] std::string x_name() const override { return "x"; }
    [[nodiscard]] std::string y_name() const override { return "y"; }
    [[nodiscard]] PointSample sample(double x, double y) const override;
    [[nodiscard]] std::optional<FieldValues> fields(double x, double y) const override;
    [[nodiscard]] double gamma() const override { return gamma_; }

private:
    Fn T_;
    Fn Dm_;
    Pred valid_;
    double gamma_;
    double Gamma_m_;
};

// Full default window: phi over one period and g_fb up to Re mu = 2 kappa, or
// Delta in [-5, 5] and G up to kappa / 2 without feedback.
Window default_window(PlaneKind kind, const PhysicalParams& p);

}  // namespace optostirling
