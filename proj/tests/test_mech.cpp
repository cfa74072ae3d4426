#include <doctest.h>

#include "optostirling/errors.hpp"
#include "optostirling/mech.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace optostirling;
using testsupport::rel;

namespace {

EffectiveCavity bare(double kappa, double Delta) {
    EffectiveCavity e;
    e.kappa_eff = kappa;
    e.Delta_eff = Delta;
    return e;
}

}  // namespace

TEST_CASE("no-feedback sideband closed forms") {
    auto e = bare(2, 1);
    CHECK(gamma_m(e, 0.0) == 0.0);
    CHECK(delta_m(e, 0.0) == 0.0);
    CHECK(rel(gamma_m(e, 0.1), 0.005) < 1e-12);
    CHECK(rel(delta_m(e, 0.1), -0.0025) < 1e-12);
    double k = 2;
    CHECK(rel(gamma_m(e, 0.1), 2 * 0.01 * k * (1 / (k * k) - 1 / (k * k + 4))) < 1e-12);
    CHECK(std::abs(delta_m(bare(2, 0), 0.1)) < 1e-18);
}

TEST_CASE("bath occupation") {
    auto e = bare(2, 1);
    CHECK(bath_occupation(e, 0.0, 1, 1e-4, 6.25e7) == doctest::Approx(6.25e7).epsilon(1e-14));
    double n = bath_occupation(e, 0.1, 1, 1e-4, 6.25e7);
    CHECK(rel(n, (0.01 * 0.5 + 6.25e3) / (1e-4 + 0.005)) < 1e-12);
    CHECK(std::abs(n - 1.2265e6) / 1.2265e6 < 1e-3);

    SUBCASE("backaction floor without intrinsic damping") {
        double floor = spectrum_x0(-1, e) / (2 * 2 * (std::norm(chi(1, e)) - std::norm(chi(-1, e))));
        for (double G : {0.01, 0.1}) CHECK(rel(bath_occupation(e, G, 1, 0.0, 6.25e7), floor) < 1e-12);
        for (double G : {0.01, 0.1}) CHECK(rel(bath_occupation(e, G, 1, 1e-20, 6.25e7), floor) < 1e-6);
    }
    SUBCASE("blue detuning heats without bound") {
        CHECK_THROWS_AS(bath_occupation(bare(2, -1), 0.1, 1, 1e-4, 6.25e7), HeatingRunaway);
    }
}

TEST_CASE("effective temperature") {
    double wm = 2 * std::numbers::pi * 1e5;
    MechanicalEffective me;
    me.n_m = 0;
    CHECK(effective_temperature(me, wm) == 0.0);
    me.n_m = 1e5;
    double T0 = effective_temperature(me, wm);
    CHECK(T0 == doctest::Approx(0.48).epsilon(2e-3));
    me.Delta_m = 0.08;
    CHECK(rel(effective_temperature(me, wm), 1.08 * T0) < 1e-15);
    me.Delta_m = -1.0;
    CHECK_THROWS_AS(effective_temperature(me, wm), NegativeFrequency);
    me.Delta_m = -1.5;
    CHECK_THROWS_AS(effective_temperature(me, wm), NegativeFrequency);
}

TEST_CASE("rate equation") {
    CHECK(nb_rate(3.0, 1e-4, 0.005, 3.0) == 0.0);
    CHECK(nb_rate(0.0, 0.0, 0.005, 1e6) == doctest::Approx(5000).epsilon(1e-14));
    CHECK(nb_rate(2.0, 0.01, 0.0, 1.0) < 0);
    CHECK(nb_rate(0.5, 0.01, 0.0, 1.0) > 0);
    double slope = (nb_rate(2.0, 0.01, 0.02, 1.0) - nb_rate(1.0, 0.01, 0.02, 1.0));
    CHECK(slope == doctest::Approx(-0.03).epsilon(1e-12));

    CHECK(nb_analytic(0, 7.0, 1e-4, 0.005, 100) == 7.0);
    CHECK(nb_analytic(1e9, 7.0, 1e-4, 0.005, 100) == doctest::Approx(100).epsilon(1e-14));
    double th = std::log(2.0) / (1e-4 + 0.005);
    CHECK(nb_analytic(th, 0.0, 1e-4, 0.005, 100) == doctest::Approx(50).epsilon(1e-12));
}

TEST_CASE("mechanical chain at the bad-cavity point") {
    auto p = make_params(2 * std::numbers::pi * 1e5, 1e-4, 1, 1, 1, 0.1, 0.9, 300);
    auto e = effective_cavity(p, FeedbackParams(0, 0));
    auto me = mechanical_effective(p, e);
    CHECK(rel(me.Gamma_m, 0.005) < 1e-12);
    CHECK(rel(me.Delta_m, -0.0025) < 1e-12);
    CHECK(rel(me.n_m, (0.01 * 0.5 + 1e-4 * p.n_T) / (1e-4 + 0.005)) < 1e-12);
    Constants c;
    CHECK(rel(me.T, c.hbar * p.omega_m * (1 - 0.0025) * me.n_m / c.k_B) < 1e-14);
}

TEST_CASE("spectral identities at random stable points") {
    auto pts = testsupport::random_stable_points(100, 23);
    for (const auto& sp : pts) {
        const auto& e = sp.eff;
        double G = sp.p.G;
        if (G == 0) continue;
        double Gm = gamma_m(e, G);
        double spectral = G * G * (spectrum_x0(1, e) - spectrum_x0(-1, e));
        CHECK(std::abs(Gm - spectral) <= 1e-10 * std::max(std::abs(Gm), G * G * spectrum_x0(1, e)));

        cplx d = small_lambda(1, e) - std::conj(small_lambda(-1, e));
        CHECK(std::abs(2 * G * G * d.real() - Gm) <= 1e-10 * std::max(std::abs(Gm), 1e-300) + 1e-18);
        CHECK(std::abs(G * G * d.imag() - delta_m(e, G)) <= 1e-10 * std::abs(delta_m(e, G)) + 1e-18);

        auto ev = evaluate_point(sp.p, sp.fb);
        if (ev.regime == RegimeClass::Valid) {
            CHECK(ev.has_fields);
            CHECK(ev.mech.n_m >= 0);
            CHECK(std::isfinite(ev.mech.T));
        }
    }
}
