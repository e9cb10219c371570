#include "doctest.h"
#include "looplab/config.hpp"
#include "looplab/experiments.hpp"
#include "looplab/fit.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace looplab;
namespace fs = std::filesystem;

namespace {
const char* kBase = R"(seed: 3
field: {type: abc, A: 1, B: 0.8, C: 0.6, time_law: beltrami}
loop: {type: circle, center: [0.2, -0.1, 0.3], normal: [0.2, 0.3, 1], N: 8}
operator: {gamma: 1, nu: 0.5, alpha: 0.4}
)";

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("looplab_test_" + name);
    fs::remove_all(p);
    return p;
}
}  // namespace

TEST_SUITE("fit") {
    TEST_CASE("log-log slope") {
        const FitResult f = fit_loglog({1, 2, 4, 8}, {3, 12, 48, 192}, 2.0, 0.3);
        CHECK(f.fitted);
        CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(f.pass);
    }
    TEST_CASE("non-positive data is not fitted") {
        const FitResult f = fit_loglog({1, 2, 4}, {1, 0, 3}, 1.0);
        CHECK(!f.fitted);
        CHECK(!f.pass);
        CHECK(f.status == "budget-dominated-by-roundoff");
        CHECK(fit_loglog({1, 2}, {1, 2}).status == "too-few-points");
    }
}

TEST_SUITE("config") {
    TEST_CASE("missing field spec names the key") {
        try {
            parse_config("loop: {type: circle}\nexperiments: [euler_ensemble]\n");
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("'field'") != std::string::npos);
        }
    }

    TEST_CASE("unknown keys are rejected with a line number") {
        try {
            parse_config(std::string(kBase) + "experiments: [euler_ensemble]\nbogus: 1\n");
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            const std::string m = e.what();
            CHECK(m.find("bogus") != std::string::npos);
            CHECK(m.find("line 6") != std::string::npos);
        }
    }

    TEST_CASE("physical parameters must be positive") {
        CHECK_THROWS_AS(parse_config("field: {type: rotation}\nloop: {type: circle}\noperator: {nu: 0}\nexperiments: [euler_ensemble]\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config("field: {type: rotation}\nloop: {type: circle, radius: -1}\nexperiments: [euler_ensemble]\n"),
                        ConfigError);
    }

    TEST_CASE("unknown experiment keys fail before anything runs") {
        const RunConfig c = parse_config(std::string(kBase) + "experiments:\n  - id: euler_ensemble\n    qq: [5]\n");
        const fs::path out = scratch("badkey");
        RunOverrides ov;
        ov.out = out.string();
        CHECK_THROWS_AS(run_config(c, ov, "test"), ConfigError);
        CHECK(!fs::exists(out / "euler_ensemble"));
    }

    TEST_CASE("configs shipped with the project parse") {
        for (const auto& e : fs::directory_iterator(LOOPLAB_SOURCE_DIR "/configs")) {
            CAPTURE(e.path().string());
            CHECK_NOTHROW(load_config(e.path().string()));
        }
    }
}

TEST_SUITE("registry") {
    TEST_CASE("at least ten experiments with descriptions") {
        CHECK(experiment_registry().size() >= 10);
        for (const auto& e : experiment_registry()) CHECK(!e.verifies.empty());
        REQUIRE(find_experiment("residual_scan") != nullptr);
        CHECK(find_experiment("residual_scan")->verifies.find("loop equation") != std::string::npos);
        CHECK(find_experiment("nope") == nullptr);
    }

    TEST_CASE("euler {5/2} run passes and writes a manifest") {
        const RunConfig c = parse_config(std::string(kBase) + "experiments:\n  - id: euler_ensemble\n    q: [5]\n    p: [2]\n");
        const fs::path out = scratch("euler");
        RunOverrides ov;
        ov.out = out.string();
        const RunSummary s = run_config(c, ov, "test");
        CHECK(s.exit_code == 0);
        CHECK(fs::exists(out / "manifest.json"));
        CHECK(fs::exists(out / "euler_ensemble" / "residuals.csv"));
    }

    TEST_CASE("a failing budget exits 2 and names the row") {
        // descending N makes the residual grow along the scan
        const RunConfig c = parse_config(std::string(kBase) +
                                         "experiments:\n  - id: residual_scan\n    N: [16, 8, 8]\n    alpha: [0.4]\n");
        const fs::path out = scratch("fail");
        RunOverrides ov;
        ov.out = out.string();
        const RunSummary s = run_config(c, ov, "test");
        CHECK(s.exit_code == 2);
        REQUIRE(s.outputs.size() == 1);
        bool named = false;
        for (const auto& n : s.outputs[0].notes) named |= n.find("N=8") != std::string::npos;
        CHECK(named);
        CHECK(fs::exists(out / "manifest.json"));
    }

    TEST_CASE("a non-exact field is an input error") {
        const RunConfig c = parse_config(
            "field: {type: rotation, time_law: linear, rate: 1}\nloop: {type: circle, N: 8}\n"
            "experiments:\n  - id: residual_scan\n    N: [8, 16, 32]\n    alpha: [0.4]\n");
        RunOverrides ov;
        ov.out = scratch("inexact").string();
        CHECK(run_config(c, ov, "test").exit_code == 1);
    }

    TEST_CASE("outputs do not depend on the thread count") {
        const std::string text = std::string(kBase) +
                                 "experiments:\n  - id: gaussian_covariance\n    pairs: 2\n    samples: 200\n"
                                 "  - id: kelvin_check\n    t_end: 0.1\n    steps: 16\n";
        const RunConfig c = parse_config(text);
        RunOverrides a, b;
        a.out = scratch("t1").string();
        a.threads = 1;
        b.out = scratch("t3").string();
        b.threads = 3;
        run_config(c, a, "test");
        run_config(c, b, "test");
        for (const char* f : {"gaussian_covariance/covariance.csv", "kelvin_check/kelvin.csv"})
            CHECK(slurp(fs::path(*a.out) / f) == slurp(fs::path(*b.out) / f));
    }
}
