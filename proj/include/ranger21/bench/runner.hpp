#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ranger21/bench/config.hpp"

namespace ranger21::bench {

/// One logged row of an optimizer's training curve.
struct RunRecord {
    std::size_t run = 0;  // index into RunConfig::optimizers
    std::string optimizer;
    std::int64_t step = 0;
    double eta_t = 0.0;
    double loss = 0.0;                // full objective after the step
    std::optional<double> accuracy;   // classification problems only
    double clip_ratio = 0.0;          // fraction of units clipped at this step
    double mean_vhat = 0.0;           // mean of v_hat over every parameter element
    double decay_norm = 0.0;          // norm of the decay displacement eta_t * d

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RunSummary {
    std::size_t run = 0;
    std::string optimizer;
    Preset preset = Preset::Ranger21;
    double initial_loss = 0.0;
    std::optional<double> final_loss;      // last logged loss
    std::optional<double> final_accuracy;
    std::optional<double> best_loss;       // min over logged losses
    std::optional<std::int64_t> steps_to_threshold;  // first logged step at or below threshold
    bool diverged = false;
    std::optional<std::int64_t> diverged_at;  // step whose loss or gradient went non-finite
    std::int64_t steps_completed = 0;
};

struct BenchmarkResult {
    std::vector<RunRecord> records;   // sorted by (optimizer, step)
    std::vector<RunSummary> summaries;  // in config order

    bool all_diverged() const;
};

struct RunOptions {
    /// Worker threads for independent optimizer runs; 0 picks
    /// min(hardware threads, number of runs). Output does not depend on it.
    unsigned threads = 0;
};

/// Whether step t of a t_max-step run is logged at the given cadence.
bool is_record_step(std::int64_t t, std::int64_t t_max, std::int64_t cadence);

/// Runs every optimizer in the config on an identically seeded problem.
BenchmarkResult run_benchmark(const RunConfig& config, const RunOptions& options = {});

/// Learning rate applied at step t by the given optimizer.
double scheduled_eta(const OptimizerSpec& spec, std::int64_t t);

}  // namespace ranger21::bench
