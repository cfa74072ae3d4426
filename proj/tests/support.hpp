#pragma once

#include "optostirling/cavity.hpp"
#include "optostirling/params.hpp"
#include "optostirling/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace testsupport {

struct StablePoint {
    optostirling::PhysicalParams p;
    optostirling::FeedbackParams fb;
    optostirling::EffectiveCavity eff;
};

// Random stable, non-degenerate feedback settings on a few devices.
inline std::vector<StablePoint> random_stable_points(int count, unsigned seed) {
    using namespace optostirling;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double wm = 2 * std::numbers::pi * 1e5;
    std::vector<StablePoint> out;
    while (static_cast<int>(out.size()) < count) {
        double k1 = 0.05 + 1.5 * u(rng), k2 = 0.05 + 1.5 * u(rng);
        double Delta = -2 + 4 * u(rng);
        double G = 0.2 * u(rng) * (k1 + k2);
        auto p = make_params(wm, 1e-4, k1, k2, Delta, G, 0.5 + 0.5 * u(rng), 300);
        double gmax = p.kappa / std::sqrt(p.eta_d * k1 * k2);
        FeedbackParams fb(gmax * u(rng), 2 * std::numbers::pi * u(rng));
        auto ev = evaluate_point(p, fb);
        if (ev.regime != RegimeClass::Valid && ev.regime != RegimeClass::NonAdiabatic) continue;
        out.push_back({p, fb, effective_cavity(p, fb)});
    }
    return out;
}

inline double rel(double a, double b) {
    double s = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / s;
}

}  // namespace testsupport
