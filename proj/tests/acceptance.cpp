// Runs the shipped configs and prints one PASS/FAIL line per acceptance criterion.
#include "looplab/config.hpp"
#include "looplab/experiments.hpp"

#include <fmt/core.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using namespace looplab;

namespace {

const fs::path kConfigs = LOOPLAB_SOURCE_DIR "/configs";

struct Exp {
    bool pass = false;
    double seconds = 0.0;
    std::vector<std::string> notes;
};

fs::path out_root() {
    const fs::path p = fs::temp_directory_path() / "looplab_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::map<std::string, Exp> run(const std::string& name, const fs::path& out, std::optional<int> threads = {}) {
    std::map<std::string, Exp> r;
    try {
        const RunConfig c = load_config((kConfigs / (name + ".yaml")).string());
        RunOverrides ov;
        ov.out = out.string();
        ov.threads = threads;
        run_config(c, ov, "acceptance");
        std::ifstream f(out / "manifest.json");
        const auto m = nlohmann::json::parse(f);
        for (const auto& e : m["experiments"])
            r[e["id"].get<std::string>()] = {e["pass"].get<bool>(), e["seconds"].get<double>(),
                                             e["notes"].get<std::vector<std::string>>()};
    } catch (const std::exception& e) {
        fmt::print("  {}: {}\n", name, e.what());
    }
    return r;
}

// Notes of one experiment, optionally only those containing `filter`.
bool notes_pass(const Exp& e, const std::string& filter, std::string& detail) {
    bool ok = false;
    for (const auto& n : e.notes) {
        if (!filter.empty() && n.find(filter) == std::string::npos) continue;
        if (n.rfind("INFO", 0) == 0) continue;
        if (!detail.empty()) detail += "; ";
        detail += n;
        ok = true;
        if (n.rfind("PASS", 0) != 0) return false;
    }
    return ok;
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    fmt::print("{} criterion {}: {}\n", ok ? "PASS" : "FAIL", n, detail);
    std::fflush(stdout);
}

// All listed experiments present and passing, total time under the limit (0: no limit).
void criterion(int n, const std::map<std::string, Exp>& r, const std::vector<std::string>& ids, double limit_s) {
    bool ok = true;
    double t = 0.0;
    std::string detail;
    for (const auto& id : ids) {
        auto it = r.find(id);
        if (it == r.end()) {
            ok = false;
            detail += id + " missing; ";
            continue;
        }
        ok &= it->second.pass;
        t += it->second.seconds;
        std::string d;
        notes_pass(it->second, "", d);
        detail += id + ": " + d + "; ";
    }
    if (limit_s > 0.0) ok &= t < limit_s;
    detail += fmt::format("runtime {:.1f} s", t);
    if (limit_s > 0.0) detail += fmt::format(" (limit {:.0f} s)", limit_s);
    report(n, ok, detail);
}

std::map<std::string, std::string> csv_bytes(const fs::path& dir) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        std::ifstream f(e.path(), std::ios::binary);
        std::stringstream s;
        s << f.rdbuf();
        m[fs::relative(e.path(), dir).string()] = s.str();
    }
    return m;
}

}  // namespace

int main() {
    const fs::path root = out_root();

    const auto euler = run("euler", root / "euler");
    criterion(1, euler, {"euler_ensemble"}, 10.0);

    const auto oracles = run("oracles", root / "oracles");
    criterion(2, oracles, {"operator_oracles", "momentum_oracles"}, 120.0);
    criterion(3, oracles, {"degeneracies"}, 0.0);

    const auto scaling = run("scaling", root / "scaling");
    const auto obstruction = run("obstruction", root / "obstruction");
    {
        // the Taylor scan lives in the obstruction experiment
        std::map<std::string, Exp> r = scaling;
        auto it = obstruction.find("obstruction_demo");
        if (it != obstruction.end()) {
            Exp taylor = it->second;
            std::string d;
            taylor.pass = notes_pass(taylor, "Taylor", d);
            taylor.notes = {d};
            r["taylor_remainder"] = taylor;
        }
        criterion(4, r, {"rad_scan", "bs_recovery", "taylor_remainder", "liquid_scan"}, 600.0);
    }

    const auto residual = run("residual", root / "residual");
    criterion(5, residual, {"residual_scan"}, 1800.0);

    const auto bs = run("biot_savart", root / "biot_savart");
    criterion(6, bs, {"bs_closed_form"}, 0.0);

    const auto gauss = run("gaussian", root / "gaussian");
    criterion(7, gauss, {"gaussian_covariance", "psi0_arbitration"}, 300.0);

    criterion(8, obstruction, {"obstruction_demo"}, 0.0);

    const auto kelvin = run("kelvin", root / "kelvin");
    criterion(9, kelvin, {"kelvin_check"}, 0.0);

    {
        run("smoke", root / "smoke_a", 1);
        run("smoke", root / "smoke_b", 1);
        run("smoke", root / "smoke_c", 4);
        const auto a = csv_bytes(root / "smoke_a");
        const auto b = csv_bytes(root / "smoke_b");
        const auto c = csv_bytes(root / "smoke_c");
        const bool ok = !a.empty() && a == b && a == c;
        report(10, ok, fmt::format("{} CSV files, same seed twice at 1 thread and once at 4 threads: {}", a.size(),
                                   ok ? "byte-identical" : "differ"));
    }

    fmt::print("{} of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
