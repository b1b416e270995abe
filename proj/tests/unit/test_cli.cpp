#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#ifndef RANGER21_BENCH_EXE
#error "RANGER21_BENCH_EXE must point at the bench executable"
#endif

namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() : dir(fs::temp_directory_path() / "ranger21_cli_test") {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        const auto p = dir / name;
        std::ofstream(p) << text;
        return p;
    }
};

int bench(const std::string& args, const fs::path& capture) {
    const std::string cmd = std::string(RANGER21_BENCH_EXE) + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmall = R"({"schema_version": 1, "t_max": 40, "cadence": 10, "seed": 3,
  "problem": {"name": "rosenbrock"},
  "optimizers": [{"preset": "adamw"}, {"preset": "ranger21"}]})";

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("run writes curves and summary; reruns are byte-identical") {
        Scratch s;
        const auto cfg = s.write("small.json", kSmall);
        const auto log = s.dir / "log.txt";
        REQUIRE(bench("run " + cfg.string() + " --out " + (s.dir / "a").string() + " --quiet", log) == 0);
        CHECK(slurp(log).empty());
        REQUIRE(bench("run " + cfg.string() + " --out " + (s.dir / "b").string() + " --threads 1", log) == 0);
        CHECK(slurp(log).find("adamw") != std::string::npos);
        const auto a = slurp(s.dir / "a" / "curves.csv");
        CHECK(a.rfind("run,optimizer,step,eta_t,loss", 0) == 0);
        CHECK(a == slurp(s.dir / "b" / "curves.csv"));
        CHECK(slurp(s.dir / "a" / "summary.csv") == slurp(s.dir / "b" / "summary.csv"));

        REQUIRE(bench("run " + cfg.string() + " --out " + (s.dir / "c").string() + " --quiet --seed 4", log) == 0);
        CHECK(fs::exists(s.dir / "c" / "curves.csv"));
    }

    TEST_CASE("schedule prints one row per step") {
        Scratch s;
        const auto cfg = s.write("small.json", kSmall);
        const auto out = s.dir / "sched.csv";
        REQUIRE(bench("schedule " + cfg.string(), out) == 0);
        const auto text = slurp(out);
        CHECK(text.rfind("step,eta_t\n1,", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 41);
        CHECK(text.find("\n40,0\n") != std::string::npos);
    }

    TEST_CASE("overlapping phases warn but succeed") {
        Scratch s;
        const auto cfg = s.write("overlap.json", R"({"schema_version": 1, "t_max": 10,
          "problem": {"name": "rosenbrock"},
          "optimizers": [{"preset": "ranger21", "overrides": {"t_warmup": 8, "t_warmdown": 8}}]})");
        const auto out = s.dir / "v.txt";
        CHECK(bench("validate " + cfg.string(), out) == 0);
        CHECK(slurp(out).find("warning") != std::string::npos);
    }

    TEST_CASE("exit codes") {
        Scratch s;
        const auto log = s.dir / "log.txt";
        CHECK(bench("validate " + s.write("ok.json", kSmall).string(), log) == 0);

        CHECK(bench("validate " + s.write("bad.json", R"({"schema_version": 1})").string(), log) == 1);
        CHECK(slurp(log).find("config error") != std::string::npos);
        CHECK(bench("validate " + s.write("broken.json", "{ not json").string(), log) == 1);
        CHECK(bench("frobnicate", log) == 1);
        CHECK(bench("run", log) == 1);

        CHECK(bench("validate " + (s.dir / "missing.json").string(), log) == 2);
        CHECK(bench("run " + s.write("small.json", kSmall).string() + " --quiet --out /proc/nope", log) == 2);

        const auto diverge = s.write("diverge.json", R"({"schema_version": 1, "t_max": 20,
          "problem": {"name": "quadratic", "spectrum": [1e300], "start": [1e10]},
          "optimizers": [{"preset": "adamw", "overrides": {"eta": 1e300}}]})");
        CHECK(bench("run " + diverge.string() + " --quiet --out " + (s.dir / "d").string(), log) == 3);
    }
}
