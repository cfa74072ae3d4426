#include <doctest.h>

#include "optostirling/stability.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace optostirling;

namespace {

PhysicalParams device() { return make_params(2 * std::numbers::pi * 1e5, 1e-4, 1, 1, 1, 0.1, 0.9, 300); }

bool contains(const std::array<cplx, 4>& ev, cplx z, double tol) {
    return std::any_of(ev.begin(), ev.end(), [&](cplx w) { return std::abs(w - z) < tol; });
}

}  // namespace

TEST_CASE("decoupled drift spectrum") {
    auto p = device();
    p.G = 0;
    auto e = effective_cavity(p, FeedbackParams(0, 0));
    auto m = drift_matrix(p, e);
    auto ev = drift_eigenvalues(m);
    CHECK(contains(ev, cplx(-2, 1), 1e-12));
    CHECK(contains(ev, cplx(-2, -1), 1e-12));
    CHECK(contains(ev, cplx(-0.5e-4, 1), 1e-12));
    CHECK(contains(ev, cplx(-0.5e-4, -1), 1e-12));
    CHECK(is_stable(m));
    CHECK(max_real_eigenvalue(m) == doctest::Approx(-0.5e-4).epsilon(1e-9));
    CHECK_FALSE(is_stable(m, 1e-3));
}

TEST_CASE("drift matrix conjugation structure") {
    auto p = device();
    auto e = effective_cavity(p, FeedbackParams(0.7, 1.1));
    const auto& A = drift_matrix(p, e).entries;
    const int swap[4] = {1, 0, 3, 2};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(std::abs(A(swap[r], swap[c]) - std::conj(A(r, c))) < 1e-15);
}

TEST_CASE("gain beyond the linewidth destabilizes") {
    auto p = device();
    EffectiveCavity e;
    e.mu = 2.5;
    e.kappa_eff = p.kappa - 2.5;
    e.Delta_eff = p.Delta;
    CHECK(max_real_eigenvalue(drift_matrix(p, e)) > 0);

    p.G = 0;
    p.Delta = 0;
    EffectiveCavity m;
    m.mu = p.kappa;
    m.kappa_eff = 0;
    m.Delta_eff = 0;
    CHECK_FALSE(is_stable(drift_matrix(p, m)));
}

TEST_CASE("regime classification") {
    auto p = device();
    CHECK(regime_classify(p, FeedbackParams(0, 0)) == RegimeClass::Valid);
    auto ev = evaluate_point(p, FeedbackParams(0, 0));
    CHECK(ev.has_fields);
    CHECK(ev.kappa_eff == 2.0);
    double gdeg = p.kappa / (2 * std::sqrt(p.eta_d * p.kappa1 * p.kappa2));
    CHECK(regime_classify(p, FeedbackParams(gdeg, 0)) == RegimeClass::Degenerate);
    CHECK(regime_classify(p, FeedbackParams(1.3 * gdeg, 0.1)) == RegimeClass::Degenerate);

    // Gain just below the degenerate line leaves kappa_eff < G.
    auto nearly = evaluate_point(p, FeedbackParams(0.97 * gdeg, 0));
    CHECK(nearly.kappa_eff < p.G);
    CHECK(nearly.regime != RegimeClass::Valid);

    for (auto r : {RegimeClass::Valid, RegimeClass::NonAdiabatic, RegimeClass::Unstable, RegimeClass::Degenerate})
        CHECK(regime_from_string(to_string(r)) == r);
}

TEST_CASE("classification is total and deterministic over a grid") {
    auto p = device();
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) {
            FeedbackParams fb(2.2 * j / 39, 2 * std::numbers::pi * i / 39);
            auto a = regime_classify(p, fb);
            CHECK(a == regime_classify(p, fb));
            CHECK(a == evaluate_point(p, fb).regime);
            counts[static_cast<int>(a)]++;
        }
    CHECK(counts[0] + counts[1] + counts[2] + counts[3] == 1600);
    CHECK(counts[static_cast<int>(RegimeClass::Valid)] > 0);
    CHECK(counts[static_cast<int>(RegimeClass::Unstable)] > 0);
    CHECK(counts[static_cast<int>(RegimeClass::Degenerate)] > 0);
}

TEST_CASE("eigenvalues satisfy the characteristic polynomial") {
    auto pts = testsupport::random_stable_points(100, 5);
    for (const auto& sp : pts) {
        auto m = drift_matrix(sp.p, sp.eff);
        auto ev = drift_eigenvalues(m);
        for (cplx l : ev) {
            Eigen::Matrix4cd B = m.entries - l * Eigen::Matrix4cd::Identity();
            CHECK(std::abs(B.determinant()) < 1e-8);
            CHECK(contains(ev, std::conj(l), 1e-8));
        }
        CHECK(is_stable(m));
    }
}
