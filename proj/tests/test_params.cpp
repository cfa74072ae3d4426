#include <doctest.h>

#include "optostirling/errors.hpp"
#include "optostirling/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace optostirling;

namespace {

bool has(const ValidationResult& r, const std::string& name) {
    return std::find(r.violations.begin(), r.violations.end(), name) != r.violations.end();
}

PhysicalParams base() { return make_params(2 * std::numbers::pi * 1e5, 1e-4, 1, 1, 1, 0.1, 0.9, 300); }

}  // namespace

TEST_CASE("room temperature device validates") {
    auto p = base();
    CHECK(p.kappa == 2.0);
    CHECK(validate_params(p).ok());
}

TEST_CASE("kappa must equal kappa1 + kappa2") {
    auto p = base();
    p.kappa = 3;
    auto r = validate_params(p);
    CHECK_FALSE(r.ok());
    CHECK(has(r, "kappa = kappa1+kappa2"));
}

TEST_CASE("detection efficiency bounds") {
    auto p = base();
    p.eta_d = 0;
    CHECK(has(validate_params(p), "0 < eta_d <= 1"));
    p.eta_d = 1.0;
    CHECK(validate_params(p).ok());
    p.eta_d = 1.01;
    CHECK(has(validate_params(p), "0 < eta_d <= 1"));
}

TEST_CASE("thermal occupation") {
    Constants c;
    double omega = 2 * std::numbers::pi * 1e5;
    SUBCASE("exact inversion gives one quantum") {
        double T = c.hbar * omega / (c.k_B * std::log(2.0));
        CHECK(thermal_occupation(T, omega, c) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("300 K at 100 kHz") {
        double n = thermal_occupation(300, omega, c);
        CHECK(std::abs(n - 6.25e7) / 6.25e7 < 1e-3);
        double classical = c.k_B * 300 / (c.hbar * omega);
        CHECK(std::abs(n - classical) / classical < 1e-7);
    }
    SUBCASE("vacuum limit") {
        CHECK(thermal_occupation(1e-7, omega, c) < 1e-20);
        CHECK(thermal_occupation(1e-8, omega, c) < 1e-200);
        CHECK(thermal_occupation(1e-9, omega, c) >= 0.0);
    }
    SUBCASE("monotone in temperature and frequency") {
        double prev = 0;
        for (double T : {0.01, 0.1, 1.0, 10.0, 300.0}) {
            double n = thermal_occupation(T, omega, c);
            CHECK(n > prev);
            prev = n;
        }
        CHECK(thermal_occupation(1, 2 * omega, c) < thermal_occupation(1, omega, c));
    }
}

TEST_CASE("homodyne phase round trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 100; ++k) {
        double theta = u(rng), tau = u(rng), Delta = u(rng);
        auto fb = FeedbackParams::from_homodyne(0.5, theta, tau, Delta);
        CHECK(fb.phi() == theta - Delta * tau);
        CHECK(validate_feedback(fb, Delta).ok());
    }
    CHECK(has(validate_feedback(FeedbackParams(-0.1, 0), 1), "g_fb >= 0"));
}

TEST_CASE("shipped presets") {
    auto names = builtin_preset_names();
    CHECK(names.size() == 3);
    for (const auto& n : names) {
        auto p = builtin_preset(n);
        CHECK(validate_params(p.params).ok());
        CHECK(p.params.omega_m == doctest::Approx(2 * std::numbers::pi * 1e5));
        CHECK(p.feedback.levels.has_value());
        CHECK(p.nofeedback.levels.has_value());
    }
    auto f = builtin_preset("fig3").params;
    CHECK(f.kappa1 == 1);
    CHECK(f.kappa2 == 1);
    CHECK(f.G == 0.1);
    CHECK(f.Delta == 1);
    CHECK(f.gamma == 1e-4);
    CHECK(f.eta_d == 0.9);
    CHECK(f.T_bath == 300);
    CHECK(builtin_preset("appB-weak").params.kappa == doctest::Approx(0.1));
    CHECK(builtin_preset("appB-weak").params.G == 0.01);
    CHECK(builtin_preset("appB-strong").params.G == 0.1);
    CHECK_THROWS_AS(builtin_preset("nope"), ConfigError);
}

TEST_CASE("config parsing") {
    const std::string good = "# comment\nomega_m = 6.283185307179586e5\ngamma = 1e-4\nkappa1 = 1\nkappa2 = 1\n"
                             "Delta = 1\nG = 0.1\neta_d = 0.9\nT_bath = 300\nfeedback.levels = 0.5,0.22,0.08,-0.08\n";
    auto p = parse_preset(good, "custom");
    CHECK(p.name == "custom");
    CHECK(p.params.kappa == 2);
    REQUIRE(p.feedback.levels);
    CHECK(p.feedback.levels->Dm_l == -0.08);
    CHECK_FALSE(p.feedback.window);

    CHECK_THROWS_AS(parse_preset(good + "bogus = 1\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_preset("gamma = 1e-4\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_preset(good + "G = abc\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_preset(good + "no equals sign\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_preset(good + "feedback.levels = 1,2\n", "x"), ConfigError);
    try {
        parse_preset(good + "bogus = 1\n", "x");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}
