#include <doctest.h>

#include "optostirling/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace optostirling;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("optostirling_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("validate") {
    auto r = run({"validate", "--preset", "fig3"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("Ok") != std::string::npos);

    auto dir = scratch("validate");
    std::ofstream(dir / "bad.cfg") << "f_m_hz = 1e5\ngamma = 1e-4\nkappa1 = 1\nkappa2 = 1\nkappa = 3\nDelta = 1\n"
                                      "G = 0.1\neta_d = 0.9\nT_bath = 300\n";
    auto b = run({"validate", "--config", (dir / "bad.cfg").string()});
    CHECK(b.code == kExitConfig);
    CHECK(b.out.find("kappa = kappa1+kappa2") != std::string::npos);
}

TEST_CASE("configuration errors") {
    auto r = run({"map"});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("preset") != std::string::npos);
    CHECK(run({"map", "--preset", "nope"}).code == kExitConfig);
    CHECK(run({"map", "--preset", "fig3", "--plane", "sideways"}).code == kExitConfig);
    CHECK(run({"frobnicate"}).code == kExitConfig);
    CHECK(run({}).code == kExitConfig);
    CHECK(run({"cycle", "--preset", "fig3", "--ttot", "-5", "--grid", "20,20"}).code == kExitConfig);
    CHECK(run({"sweep", "--preset", "fig3", "--variable", "ttot", "--grid", "20,20"}).code == kExitConfig);
    CHECK(run({"sweep", "--preset", "fig3", "--variable", "ttot", "--values", "", "--grid", "20,20"}).code ==
          kExitConfig);
    CHECK(run({"sweep", "--preset", "fig3", "--variable", "ttot", "--values", "3,2,2", "--grid", "20,20"}).code ==
          kExitConfig);
    CHECK(run({"sweep", "--preset", "fig3", "--variable", "ttot", "--values", "0,500", "--grid", "20,20"}).code ==
          kExitConfig);
    CHECK(run({"sweep", "--preset", "fig3", "--variable", "max-power", "--values", "2", "--rT-grid", "0.5,1.2",
               "--grid", "20,20"})
              .code == kExitConfig);
}

TEST_CASE("map outputs") {
    auto dir = scratch("map");
    auto r = run({"map", "--preset", "fig3", "--plane", "feedback", "--grid", "60,60", "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    auto csv = slurp(dir / "landscape_feedback.csv");
    CHECK(csv.find("# preset: fig3") != std::string::npos);
    CHECK(csv.find("# tool: optostirling") != std::string::npos);
    CHECK(csv.find("Unstable") != std::string::npos);
    CHECK(fs::exists(dir / "landscape_feedback.json"));

    auto n = run({"map", "--preset", "fig3", "--plane", "nofeedback", "--grid", "30,30", "--out", dir.string()});
    CHECK(n.code == kExitOk);
    auto head = slurp(dir / "landscape_nofeedback.csv");
    CHECK(head.find("Delta,G") != std::string::npos);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("cycle outputs and exit codes") {
    auto dir = scratch("cycle");
    auto r = run({"cycle", "--preset", "fig3", "--grid", "150,150", "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    for (auto f : {"cycle.json", "schedule.csv", "schedule.json", "trajectory.csv", "report.json"})
        CHECK(fs::exists(dir / f));
    auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
    double eta = rep.at("eta").get<double>();
    CHECK(eta == doctest::Approx(0.13).epsilon(0.02 / 0.13));
    CHECK(rep.at("provenance").at("t_tot").get<std::string>() == "2000");

    auto bad = scratch("cycle_bad");
    auto f = run({"cycle", "--preset", "fig3", "--grid", "60,60", "--levels", "50,40,0.08,-0.08", "--out",
                  bad.string()});
    CHECK(f.code == kExitGeometry);
    CHECK_FALSE(fs::exists(bad / "report.json"));
}

TEST_CASE("sweep outputs") {
    auto dir = scratch("sweep");
    auto r = run({"sweep", "--preset", "fig3", "--grid", "120,120", "--variable", "ttot", "--values", "500,2000",
                  "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    auto csv = slurp(dir / "sweep_ttot.csv");
    CHECK(csv.find("# variable: ttot") != std::string::npos);
    CHECK(fs::exists(dir / "sweep_ttot.json"));

    auto mp = run({"sweep", "--preset", "fig3", "--grid", "120,120", "--variable", "max-power", "--values",
                   "2.2727272727272729", "--ttot-grid", "200,2000", "--rT-grid", "0.5", "--out", dir.string()});
    REQUIRE(mp.code == kExitOk);
    CHECK(fs::exists(dir / "max_power.csv"));
    CHECK(fs::exists(dir / "max_power.json"));
}

TEST_CASE("repeat runs are byte identical") {
    auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& d : {a, b}) {
        REQUIRE(run({"map", "--preset", "appB-weak", "--grid", "40,40", "--out", d.string()}).code == kExitOk);
        REQUIRE(run({"cycle", "--preset", "fig3", "--grid", "120,120", "--samples", "60", "--out", d.string()}).code ==
                kExitOk);
    }
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }
    CHECK(files == 7);
}
