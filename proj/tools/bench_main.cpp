// bench: run, inspect and validate optimizer benchmark configs.
//
// Exit codes: 0 success, 1 config error, 2 I/O error, 3 every run diverged.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ranger21/bench/config.hpp"
#include "ranger21/bench/csv.hpp"
#include "ranger21/bench/runner.hpp"
#include "ranger21/numfmt.hpp"
#include "ranger21/simd/kernels.hpp"

namespace {

using namespace ranger21;
using namespace ranger21::bench;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitDiverged = 3;

std::string or_dash(const std::optional<double>& x) { return x ? format_double(*x) : "-"; }

void print_summary(const RunConfig& cfg, const BenchmarkResult& result, std::ostream& os) {
    os << "problem " << cfg.problem.name() << ", t_max " << cfg.t_max << ", seed " << cfg.seed
       << ", simd " << simd::backend_name(simd::active_backend()) << '\n';
    for (const auto& s : result.summaries) {
        os << "  " << s.optimizer << " (" << preset_name(s.preset) << "): ";
        if (s.diverged) {
            os << "DIVERGED at step " << *s.diverged_at << ", ";
        }
        os << "initial " << format_double(s.initial_loss) << ", final " << or_dash(s.final_loss)
           << ", best " << or_dash(s.best_loss);
        if (s.final_accuracy) {
            os << ", accuracy " << format_double(*s.final_accuracy);
        }
        if (cfg.threshold) {
            os << ", steps to " << format_double(*cfg.threshold) << ": "
               << (s.steps_to_threshold ? std::to_string(*s.steps_to_threshold) : "not reached");
        }
        os << '\n';
    }
}

// Overlapping warm-up and warm-down are allowed (the schedule never reaches
// its plateau) but are almost always a mistake in t_max.
void warn_overlaps(const RunConfig& cfg) {
    for (const auto& o : cfg.optimizers) {
        const auto& c = o.config;
        if (o.preset == Preset::Ranger21 && c.toggles.warmup && c.toggles.warmdown &&
            c.schedule.phases_overlap()) {
            std::cerr << "warning: " << o.label << ": warm-up (" << c.schedule.t_warmup
                      << ") and warm-down (" << c.schedule.t_warmdown << ") overlap within t_max "
                      << c.schedule.t_max << "; the learning rate never reaches eta\n";
        }
    }
}

int cmd_run(const std::string& path, const std::optional<std::string>& out_dir,
            const std::optional<std::uint64_t>& seed, bool quiet, unsigned threads) {
    RunConfig cfg = load_config(path);
    warn_overlaps(cfg);
    if (seed) {
        cfg.seed = *seed;
    }
    const std::filesystem::path dir = out_dir ? *out_dir : cfg.output;
    const BenchmarkResult result = run_benchmark(cfg, RunOptions{threads});
    write_text_file(dir / "curves.csv", records_to_csv(result.records));
    write_text_file(dir / "summary.csv", summaries_to_csv(result.summaries));
    if (!quiet) {
        print_summary(cfg, result, std::cout);
        std::cout << "wrote " << (dir / "curves.csv").string() << " and "
                  << (dir / "summary.csv").string() << '\n';
    }
    return result.all_diverged() ? kExitDiverged : kExitOk;
}

int cmd_schedule(const std::string& path, const std::optional<std::string>& label) {
    const RunConfig cfg = load_config(path);
    warn_overlaps(cfg);
    const OptimizerSpec* spec = nullptr;
    for (const auto& o : cfg.optimizers) {
        if (label ? o.label == *label : o.preset == Preset::Ranger21) {
            spec = &o;
            break;
        }
    }
    if (spec == nullptr && !label) {
        spec = &cfg.optimizers.front();
    }
    if (spec == nullptr) {
        throw ConfigError("no optimizer labelled '" + *label + "' in " + path);
    }
    std::string out = "step,eta_t\n";
    for (std::int64_t t = 1; t <= cfg.t_max; ++t) {
        out += std::to_string(t) + ',' + format_double(scheduled_eta(*spec, t)) + '\n';
    }
    std::fwrite(out.data(), 1, out.size(), stdout);
    return kExitOk;
}

int cmd_validate(const std::string& path) {
    const RunConfig cfg = load_config(path);
    warn_overlaps(cfg);
    std::cout << path << ": ok (schema " << cfg.schema_version << ", problem " << cfg.problem.name()
              << ", " << cfg.optimizers.size() << " optimizer(s), t_max " << cfg.t_max << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ranger21 optimizer benchmark harness"};
    app.require_subcommand(1);

    std::string simd_name;
    app.add_option("--simd", simd_name, "Kernel backend: scalar, avx2 or neon (default: widest available)");

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "Run every optimizer in a config and write CSV curves");
    run->add_option("config", config_path, "Run configuration (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory (overrides the config's output)");
    run->add_option("--seed", seed, "Run seed (overrides the config's seed)");
    run->add_flag("--quiet", quiet, "Print nothing on success");
    run->add_option("--threads", threads, "Concurrent optimizer runs (0 = auto)");

    std::optional<std::string> label;
    auto* schedule = app.add_subcommand("schedule", "Print the learning-rate schedule as step,eta_t CSV");
    schedule->add_option("config", config_path, "Run configuration (JSON)")->required();
    schedule->add_option("--optimizer", label, "Optimizer label (default: first ranger21 entry)");

    auto* validate = app.add_subcommand("validate", "Parse and check a config without running it");
    validate->add_option("config", config_path, "Run configuration (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (!simd_name.empty()) {
            simd::set_backend(simd::parse_backend(simd_name));
        }
        if (run->parsed()) {
            return cmd_run(config_path, out_dir, seed, quiet, threads);
        }
        if (schedule->parsed()) {
            return cmd_schedule(config_path, label);
        }
        return cmd_validate(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
