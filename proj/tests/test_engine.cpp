#include <doctest.h>

#include "optostirling/engine.hpp"
#include "optostirling/errors.hpp"
#include "optostirling/mech.hpp"

#include <cmath>
#include <memory>
#include <random>

using namespace optostirling;

namespace {

// Four strokes of n samples each with fixed coefficients.
Schedule constant_schedule(double t_tot, int n, double gamma, double Gm, double Dm, double nm) {
    Schedule s;
    s.gamma = gamma;
    s.levels = {2, 1, 0.1, -0.1};
    for (int k = 0; k < 4; ++k) {
        s.stroke_begin[k] = s.samples.size();
        for (int m = 0; m < n; ++m) {
            ScheduleSample x;
            x.frac = static_cast<double>(m) / (n - 1);
            x.stroke = k;
            x.Gamma_m = Gm;
            x.Delta_m = Dm;
            x.n_m = nm;
            x.T = nm * (1 + Dm);
            s.samples.push_back(x);
        }
        s.stroke_end[k] = s.samples.size() - 1;
    }
    return make_schedule(s, t_tot, 0.5);
}

// Same path walked backwards in time.
Schedule reversed(const Schedule& s) {
    Schedule r = s;
    const std::size_t N = s.samples.size();
    for (std::size_t i = 0; i < N; ++i) {
        r.samples[i] = s.samples[N - 1 - i];
        r.samples[i].t = s.t_tot - s.samples[N - 1 - i].t;
    }
    for (int k = 0; k < 4; ++k) {
        r.stroke_begin[k] = N - 1 - s.stroke_end[3 - k];
        r.stroke_end[k] = N - 1 - s.stroke_begin[3 - k];
    }
    return r;
}

Schedule rectangle_schedule(double t_tot, double r_T = 0.5) {
    auto plane = std::make_shared<SyntheticPlane>([](double x, double) { return x; },
                                                  [](double, double y) { return y; }, SyntheticPlane::Pred{}, 1e-3,
                                                  0.05);
    auto m = map_plane(plane, make_grid(*plane, Window{0, 1, 0, 1}, 41, 41));
    return make_schedule(build_cycle(m, CycleLevels{0.7, 0.3, 0.6, 0.4}), t_tot, r_T);
}

const LandscapeMap& fig3_map() {
    static LandscapeMap m = [] {
        auto pre = builtin_preset("fig3");
        auto plane = std::make_shared<PhysicalPlane>(PlaneKind::Feedback, pre.params);
        return map_plane(plane, make_grid(*plane, *pre.feedback.window, 200, 200));
    }();
    return m;
}

const Schedule& fig3_sampled() {
    static Schedule s = sample_cycle(build_cycle(fig3_map(), *builtin_preset("fig3").feedback.levels));
    return s;
}

}  // namespace

TEST_CASE("integrator against the closed form") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    const double tol = 1e-9;
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        double gamma = 1e-4 * (1 + 9 * u(rng));
        double Gm = 0.05 * u(rng);
        double nm = std::pow(10.0, 6 * u(rng));
        double n0 = std::pow(10.0, 6 * u(rng));
        double t_tot = 100 + 4000 * u(rng);
        auto s = constant_schedule(t_tot, 30, gamma, Gm, -0.05 + 0.1 * u(rng), nm);
        auto tr = integrate_schedule(s, n0, tol);
        for (std::size_t i = 0; i < s.samples.size(); ++i) {
            double want = nb_analytic(s.samples[i].t, n0, gamma, Gm, nm);
            double got = tr.samples[tr.schedule_nodes[i]].n_b;
            worst = std::max(worst, std::abs(got - want) / want);
        }
        for (const auto& x : tr.samples) CHECK(x.n_b >= 0);
    }
    CHECK(worst <= 10 * tol);
}

TEST_CASE("degenerate schedules") {
    Schedule one;
    ScheduleSample x;
    x.n_m = 5;
    x.Gamma_m = 0.01;
    one.samples.push_back(x);
    auto tr = integrate_schedule(one, 3.0);
    REQUIRE(tr.samples.size() == 1);
    CHECK(tr.samples[0].n_b == 3.0);
    CHECK(tr.samples[0].Q_cum == 0.0);

    CHECK_THROWS_AS(integrate_schedule(Schedule{}, 1.0), ConfigError);
    CHECK_THROWS_AS(integrate_schedule(one, 1.0, 0.0), ConfigError);
}

TEST_CASE("limit cycle bookkeeping") {
    auto s = constant_schedule(1000, 20, 1e-4, 0.01, 0.02, 1e4);
    auto tr = run_to_limit_cycle(s);
    CHECK(tr.converged);
    CHECK(tr.cycles_run == 1);
    for (const auto& x : tr.samples) CHECK(x.n_b == doctest::Approx(1e4).epsilon(1e-12));

    auto zero = run_to_limit_cycle(s, 1e-6, 0);
    CHECK_FALSE(zero.converged);
    CHECK(zero.cycles_run == 0);
    CHECK(zero.samples.front().n_b == 1e4);
}

TEST_CASE("heat oracles") {
    SUBCASE("equilibrium exchanges nothing") {
        auto s = constant_schedule(500, 20, 1e-4, 0.01, 0.03, 2e3);
        auto tr = integrate_schedule(s, 2e3);
        CHECK(std::abs(heat(tr, s, 0, 500)) < 1e-9 * 2e3);
        CHECK(std::abs(work(tr, s, 0, 500)) < 1e-9 * 2e3);
    }
    SUBCASE("full relaxation") {
        const double Dm = 0.03, nm = 2e3, n0 = 5e3;
        auto s = constant_schedule(2000, 200, 1e-4, 0.05, Dm, nm);
        auto tr = integrate_schedule(s, n0);
        double Q = heat(tr, s, 0, 2000);
        double want = (1 + Dm) * (nm - n0);
        CHECK(std::abs(Q - want) <= 1e-4 * std::abs(want));
        CHECK(std::abs(internal_energy_change(tr, 0, 2000) - want) <= 1e-9 * std::abs(want));
        CHECK(std::abs(work(tr, s, 0, 2000)) <= 1e-3 * std::abs(Q));
        CHECK(std::abs(work_crosscheck(tr, s, 0, 2000)) <= 1e-12 * std::abs(Q));
    }
}

TEST_CASE("synthetic Stirling engine") {
    auto s = rectangle_schedule(2000);
    auto tr = run_to_limit_cycle(s);
    CHECK(tr.converged);
    auto r = report(tr, s);
    CHECK(r.W_tot < 0);
    CHECK(r.eta > 0);
    CHECK(r.eta < r.eta_C);
    CHECK(r.eta_C == doctest::Approx(1 - 0.3 / 0.7).epsilon(1e-14));
    CHECK(r.Q_rej <= 0);
    CHECK(r.per_stroke[3].Q > 0);
    CHECK(r.P == doctest::Approx(-r.W_tot / 2000).epsilon(1e-14));
    CHECK(r.eta == doctest::Approx(-r.W_tot / r.Q_abs).epsilon(1e-14));
    for (int k = 0; k < 4; ++k) {
        const auto& st = r.per_stroke[k];
        CHECK(std::abs(st.dU - st.Q - st.W_check) <= 1e-3 * std::abs(st.Q));
        if (k % 2 == 1) CHECK(std::abs(st.W) <= 1e-3 * std::abs(st.Q));
    }
    CHECK(std::abs(r.dU_cycle) <= 1e-3 * r.Q_abs);

    auto back = reversed(s);
    auto tb = run_to_limit_cycle(back);
    auto rb = account(tb, back);
    CHECK(rb.W_tot > 0);
    CHECK_THROWS_AS(report(tb, back), NotAnEngine);
}

TEST_CASE("bad-cavity engine") {
    auto s = make_schedule(fig3_sampled(), 2000, 0.5);
    auto tr = run_to_limit_cycle(s, 1e-6, 50);
    CHECK(tr.converged);
    CHECK(tr.cycles_run <= 10);
    for (const auto& x : tr.samples) CHECK(x.n_b >= 0);

    auto r = report(tr, s);
    CHECK(r.W_tot < 0);
    CHECK(r.per_stroke[3].Q > 0);
    CHECK(r.eta_C == doctest::Approx(0.56).epsilon(1e-14));
    CHECK(r.eta_CA == doctest::Approx(0.33675).epsilon(1e-4));
    CHECK(r.eta < r.eta_C);
    CHECK(r.max_first_law_residual <= 1e-3);
    CHECK(std::abs(r.dU_cycle) <= 1e-3 * r.Q_abs);
    double start = tr.samples.front().n_b, end = tr.samples.back().n_b;
    CHECK(std::abs(start - end) / start <= 1e-6);

    // n_b follows the instantaneous bath occupation closely.
    double dev = 0, top = 0;
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        dev = std::max(dev, std::abs(tr.samples[tr.schedule_nodes[i]].n_b - s.samples[i].n_m));
        top = std::max(top, s.samples[i].n_m);
    }
    CHECK(dev / top < 0.2);

    auto r2 = report(run_to_limit_cycle(s, 1e-6, 50, 0.5e-9), s);
    CHECK(std::abs(r2.eta - r.eta) < 1e-3);

    auto dense = make_schedule(build_cycle(fig3_map(), *builtin_preset("fig3").feedback.levels), 2000, 0.5, 400);
    auto r3 = report(run_to_limit_cycle(dense), dense);
    CHECK(std::abs(r3.eta - r.eta) / r.eta < 1e-3);

    auto csv = trajectory_to_csv(tr);
    CHECK(csv.rfind("t,n_b,U,Q_cum,W_cum\n", 0) == 0);
    auto js = report_to_json(r);
    CHECK(js.find("\"eta\"") != std::string::npos);
}
