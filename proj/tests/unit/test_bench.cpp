#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "ranger21/bench/config.hpp"
#include "ranger21/bench/csv.hpp"
#include "ranger21/bench/runner.hpp"

using namespace ranger21;
using namespace ranger21::bench;

namespace {

std::string config_with(const std::string& problem, const std::string& optimizers,
                        const std::string& extra = "") {
    return R"({"schema_version": 1, "t_max": 100, )" + extra + R"("problem": )" + problem +
           R"(, "optimizers": )" + optimizers + "}";
}

const std::string kRosen = R"({"name": "rosenbrock"})";
const std::string kBoth = R"([{"preset": "adamw"}, {"preset": "ranger21"}])";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("bench") {
    TEST_CASE("empty overrides resolve to the published defaults") {
        const auto cfg = parse_config(config_with(kRosen, R"([{"preset": "ranger21"}])"));
        REQUIRE(cfg.optimizers.size() == 1);
        const auto& c = cfg.optimizers[0].config;
        const auto d = Ranger21Config::defaults(kDefaultLearningRate, 100);
        CHECK(c.schedule.eta == d.schedule.eta);
        CHECK(c.schedule.t_warmup == d.schedule.t_warmup);
        CHECK(c.moments.beta0 == 0.9);
        CHECK(c.moments.beta2 == 0.999);
        CHECK(c.weight_decay == 1e-4);
        CHECK(c.clip.eps_clipping == 1e-3);
        CHECK(c.k_lookahead == 5);
        CHECK(c.toggles == Toggles{});
        CHECK(cfg.optimizers[0].label == "ranger21");
        CHECK(cfg.cadence == 1);
        CHECK(cfg.problem.start == std::vector<double>{-1.5, 2.0});
    }

    TEST_CASE("t_warmup defaults to 22 percent of t_max") {
        const auto cfg = parse_config(R"({"schema_version": 1, "t_max": 1000,
            "problem": {"name": "rosenbrock"}, "optimizers": [{"preset": "ranger21"}]})");
        CHECK(cfg.optimizers[0].config.schedule.t_warmup == 220);
        CHECK(cfg.optimizers[0].config.schedule.t_warmdown == 280);
    }

    TEST_CASE("overrides and comments") {
        const auto cfg = parse_config(R"({
            // line comments are allowed
            "schema_version": 1, "t_max": 50, "cadence": 5, "seed": 9, "threshold": 0.5,
            "problem": {"name": "quadratic", "spectrum": [1, 2]},
            "optimizers": [{"preset": "ranger21", "label": "r21-noagc",
                            "overrides": {"eta": 0.01, "beta2": 0.99, "t_warmup": 5,
                                          "toggles": {"agc": false}}}]})");
        const auto& c = cfg.optimizers[0].config;
        CHECK(c.schedule.eta == 0.01);
        CHECK(c.moments.beta2 == 0.99);
        CHECK(c.schedule.beta2 == 0.99);
        CHECK(c.schedule.t_warmup == 5);
        CHECK_FALSE(c.toggles.agc);
        CHECK(c.toggles.pnm);
        CHECK(cfg.seed == 9);
        CHECK(*cfg.threshold == 0.5);
        CHECK(cfg.problem.start == std::vector<double>{1, 1});
        CHECK(cfg.optimizers[0].label == "r21-noagc");
    }

    TEST_CASE("errors name the offending field") {
        CHECK(error_of(config_with(kRosen, R"([{"preset": "adamw", "overrides": {"eta": -1}}])"))
                  .find("optimizers[0].overrides.eta") != std::string::npos);
        CHECK(error_of(config_with(kRosen, kBoth, R"("bogus": 1, )")).find("bogus") != std::string::npos);
        CHECK(error_of(R"({"schema_version": 1, "t_max": 10, "optimizers": [{"preset": "adamw"}]})")
                  .find("problem") != std::string::npos);
        CHECK(error_of(config_with(kRosen, "[]")).find("optimizers") != std::string::npos);
        CHECK(error_of(config_with(kRosen, R"([{"preset": "sgd"}])")).find("optimizers[0].preset") !=
              std::string::npos);
        CHECK(error_of(config_with(kRosen, R"([{"preset": "adamw", "overrides": {"tau": 0.1}}])"))
                  .find("tau") != std::string::npos);
        CHECK(error_of(config_with(kRosen, R"([{"preset": "adamw"}, {"preset": "adamw"}])")).find("label") !=
              std::string::npos);
        CHECK(error_of(config_with(kRosen, kBoth, R"("cadence": 0, )")).find("cadence") != std::string::npos);
        CHECK(error_of(R"({"schema_version": 2, "t_max": 10, "problem": {"name": "rosenbrock"},
                          "optimizers": [{"preset": "adamw"}]})")
                  .find("schema_version") != std::string::npos);
        CHECK(error_of(config_with(R"({"name": "mlp", "dataset": {"classes": 1}})", kBoth)).find("problem.dataset.classes") !=
              std::string::npos);
        const auto syntax = error_of("{\n  \"schema_version\": 1,\n  oops\n}");
        CHECK(syntax.find("line 3") != std::string::npos);
    }

    TEST_CASE("cadence 10 over 100 steps logs 10 records per optimizer on a shared grid") {
        auto cfg = parse_config(config_with(kRosen, kBoth, R"("cadence": 10, )"));
        const auto result = run_benchmark(cfg);
        REQUIRE(result.records.size() == 20);
        std::vector<std::int64_t> steps_a, steps_r;
        for (const auto& r : result.records) {
            (r.optimizer == "adamw" ? steps_a : steps_r).push_back(r.step);
        }
        CHECK(steps_a == steps_r);
        CHECK(steps_a.front() == 10);
        CHECK(steps_a.back() == 100);
        CHECK(std::is_sorted(steps_a.begin(), steps_a.end()));

        cfg.cadence = 30;
        const auto odd = run_benchmark(cfg);
        CHECK(odd.records.size() == 8);  // 30, 60, 90 and the final step
        CHECK(odd.records[3].step == 100);
    }

    TEST_CASE("logged eta_t and summary invariants") {
        const auto cfg = parse_config(config_with(kRosen, kBoth, R"("cadence": 7, "threshold": 4.0, )"));
        const auto result = run_benchmark(cfg);
        for (const auto& r : result.records) {
            const auto& spec = cfg.optimizers[r.run];
            if (spec.preset == Preset::Ranger21) {
                CHECK(r.eta_t == lr_factor(r.step, spec.config.schedule) * spec.config.schedule.eta);
            } else {
                CHECK(r.eta_t == spec.config.schedule.eta);
            }
            CHECK(r.eta_t == scheduled_eta(spec, r.step));
            CHECK(*result.summaries[r.run].best_loss <= r.loss);
            CHECK_FALSE(r.accuracy.has_value());
        }
        for (const auto& s : result.summaries) {
            CHECK_FALSE(s.diverged);
            CHECK(s.steps_completed == 100);
            REQUIRE(s.final_loss.has_value());
            CHECK(s.initial_loss == 12.5);
        }
    }

    TEST_CASE("csv emission and round trip") {
        CHECK(records_to_csv({}) == std::string(kRecordHeader) + "\n");
        RunRecord r;
        r.run = 1;
        r.optimizer = "ranger21";
        r.step = 3;
        r.eta_t = 0.1;
        r.loss = 1.0 / 3.0;
        r.accuracy = 0.75;
        r.clip_ratio = 0.5;
        r.mean_vhat = 1e-300;
        r.decay_norm = -0.0;
        const std::vector<RunRecord> one{r};
        const auto text = records_to_csv(one);
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
        CHECK(text.find("0.33333333333333331") != std::string::npos);
        CHECK(records_from_csv(text) == one);

        const auto cfg = parse_config(config_with(R"({"name": "mlp", "dataset": {"n": 40, "dims": 3, "classes": 2}, "hidden": [4], "batch_size": 8})",
                                                  kBoth, R"("cadence": 9, )"));
        const auto result = run_benchmark(cfg);
        CHECK(records_from_csv(records_to_csv(result.records)) == result.records);
        CHECK(result.records[0].accuracy.has_value());

        CHECK_THROWS_AS(records_from_csv("nope\n"), std::runtime_error);
        CHECK_THROWS_AS(records_from_csv(std::string(kRecordHeader) + "\n1,a,2\n"), std::runtime_error);
        CHECK_THROWS_AS(emit_csv(one, "/proc/definitely/not/writable.csv"), IoError);
    }

    TEST_CASE("output does not depend on the thread count") {
        const auto cfg = parse_config(config_with(
            R"({"name": "mlp", "dataset": {"n": 60, "dims": 4, "classes": 3}, "hidden": [5], "batch_size": 16})",
            R"([{"preset": "adamw"}, {"preset": "ranger21"}, {"preset": "ranger21", "label": "r2",
                 "overrides": {"eta": 0.01}}])",
            R"("cadence": 10, )"));
        const auto one = records_to_csv(run_benchmark(cfg, RunOptions{1}).records);
        const auto many = records_to_csv(run_benchmark(cfg, RunOptions{3}).records);
        CHECK(one == many);
        CHECK(summaries_to_csv(run_benchmark(cfg, RunOptions{1}).summaries) ==
              summaries_to_csv(run_benchmark(cfg, RunOptions{2}).summaries));
    }

    TEST_CASE("a diverging run is marked and keeps its partial records") {
        const auto cfg = parse_config(config_with(
            R"({"name": "quadratic", "spectrum": [1e300], "start": [1e10]})",
            R"([{"preset": "adamw", "overrides": {"eta": 1e300}}])", R"("cadence": 1, )"));
        const auto result = run_benchmark(cfg);
        REQUIRE(result.summaries.size() == 1);
        CHECK(result.summaries[0].diverged);
        CHECK(result.summaries[0].diverged_at.has_value());
        CHECK(result.all_diverged());
        for (const auto& r : result.records) {
            CHECK(std::isfinite(r.loss));
        }
    }

    TEST_CASE("load_config reports unreadable files as I/O errors") {
        CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
    }
}
