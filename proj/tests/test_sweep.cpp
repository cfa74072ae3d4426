#include <doctest.h>

#include "optostirling/errors.hpp"
#include "optostirling/sweep.hpp"

#include <memory>

using namespace optostirling;

namespace {

const LandscapeMap& fig3_map() {
    static LandscapeMap m = [] {
        auto pre = builtin_preset("fig3");
        auto plane = std::make_shared<PhysicalPlane>(PlaneKind::Feedback, pre.params);
        return map_plane(plane, make_grid(*plane, *pre.feedback.window, 200, 200));
    }();
    return m;
}

SweepFixed fig3_fixed() {
    SweepFixed f;
    f.levels = *builtin_preset("fig3").feedback.levels;
    f.t_tot = 2000;
    f.r_T = 0.5;
    return f;
}

}  // namespace

TEST_CASE("sweep spec validation") {
    SweepSpec s;
    s.fixed = fig3_fixed();
    CHECK_THROWS_AS(check_sweep_spec(s), ConfigError);
    s.values = {1, 3, 2};
    CHECK_THROWS_AS(check_sweep_spec(s), ConfigError);
    s.values = {1, 1};
    CHECK_THROWS_AS(check_sweep_spec(s), ConfigError);
    s.values = {3, 2, 1};
    CHECK_NOTHROW(check_sweep_spec(s));
    s.values = {0, 500};
    CHECK_THROWS_AS(check_sweep_spec(s), ConfigError);
    CHECK_THROWS_AS(check_sweep_spec({SweepVariable::IsothermalFraction, {0.5, 1.0}, s.fixed}), ConfigError);
    CHECK_THROWS_AS(check_sweep_spec({SweepVariable::TemperatureRatio, {1.0, 2.0}, s.fixed}), ConfigError);
    CHECK_THROWS_AS(check_sweep_spec({SweepVariable::CompressionRatio, {0.9, 1.1}, s.fixed}), ConfigError);
    CHECK_NOTHROW(check_sweep_spec({SweepVariable::IsothermalFraction, {0.1, 0.9}, s.fixed}));
    CHECK(symmetric_spring_from_ratio(1.08 / 0.92) == doctest::Approx(0.08).epsilon(1e-14));
    for (auto v : {SweepVariable::TemperatureRatio, SweepVariable::CompressionRatio, SweepVariable::TotalTime,
                   SweepVariable::IsothermalFraction})
        CHECK(sweep_variable_from_string(to_string(v)) == v);
}

TEST_CASE("single value sweep matches a direct run") {
    const auto& m = fig3_map();
    auto f = fig3_fixed();
    SweepSpec s{SweepVariable::TotalTime, {2000}, f};
    auto res = run_sweep(s, m);
    REQUIRE(res.rows.size() == 1);
    const auto& row = res.rows[0];
    CHECK(row.ok());

    auto sch = make_schedule(build_cycle(m, f.levels), 2000, 0.5);
    auto rep = report(run_to_limit_cycle(sch), sch);
    CHECK(row.eta == rep.eta);
    CHECK(row.P == rep.P);
    CHECK(row.W_tot == rep.W_tot);
    CHECK(row.eta_C == rep.eta_C);

    auto direct = evaluate_engine(m, f.levels, 2000, 0.5, f);
    CHECK(direct.eta == row.eta);
}

TEST_CASE("power falls with cycle time") {
    SweepSpec s{SweepVariable::TotalTime, {200, 500, 1000, 1500, 2000, 3000, 4000}, fig3_fixed()};
    auto res = run_sweep(s, fig3_map());
    REQUIRE(res.rows.size() == 7);
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        REQUIRE(res.rows[i].ok());
        CHECK(res.rows[i].t_tot == s.values[i]);
        CHECK(res.rows[i].eta < res.rows[i].eta_C);
        if (i > 0) CHECK(res.rows[i].P < res.rows[i - 1].P);
    }
    auto again = run_sweep(s, fig3_map(), 1);
    CHECK(sweep_to_csv(again) == sweep_to_csv(res));
    CHECK(sweep_to_json(again) == sweep_to_json(res));
}

TEST_CASE("efficiency rises with the temperature ratio") {
    SweepSpec s{SweepVariable::TemperatureRatio, {0.26 / 0.22, 0.35 / 0.22, 0.5 / 0.22}, fig3_fixed()};
    auto res = run_sweep(s, fig3_map());
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        REQUIRE(res.rows[i].ok());
        CHECK(res.rows[i].levels.T_cold == 0.22);
        CHECK(res.rows[i].levels.T_hot == doctest::Approx(s.values[i] * 0.22).epsilon(1e-14));
        CHECK(res.rows[i].eta < res.rows[i].eta_C);
        if (i > 0) {
            CHECK(res.rows[i].eta > res.rows[i - 1].eta);
            CHECK(res.rows[i].P > res.rows[i - 1].P);
        }
    }
}

TEST_CASE("failed rows are kept") {
    SweepSpec s{SweepVariable::TemperatureRatio, {0.5 / 0.22, 100.0}, fig3_fixed()};
    auto res = run_sweep(s, fig3_map());
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].ok());
    CHECK(res.rows[1].status == "NoClosedLoop");
    CHECK_FALSE(res.rows[1].reason.empty());
    CHECK(sweep_to_csv(res).find("NoClosedLoop") != std::string::npos);
}

TEST_CASE("efficiency at maximum power") {
    const auto& m = fig3_map();
    auto f = fig3_fixed();
    auto rec = efficiency_at_max_power(m, f.levels, {200, 1000, 4000}, {0.3, 0.5, 0.7}, f);
    CHECK(rec.grid.size() == 9);
    CHECK(rec.t_tot == 200);
    CHECK(rec.eta <= rec.eta_CA);
    for (const auto& row : rec.grid)
        if (row.ok()) CHECK(row.P <= rec.P);

    auto one = efficiency_at_max_power(m, f.levels, {1000}, {0.4}, f);
    CHECK(one.t_tot == 1000);
    CHECK(one.r_T == 0.4);
    CHECK(one.eta == evaluate_engine(m, f.levels, 1000, 0.4, f).eta);

    CHECK_THROWS_AS(efficiency_at_max_power(m, CycleLevels{50, 0.22, 0.08, -0.08}, {200}, {0.5}, f), NoClosedLoop);
    auto csv = max_power_to_csv({rec});
    CHECK(csv.find("eta") != std::string::npos);
    CHECK(max_power_to_json({rec}).find("t_tot") != std::string::npos);
}
