#include "ranger21/bench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "ranger21/problems/problem.hpp"
#include "ranger21/schedule.hpp"
#include "ranger21/simd/kernels.hpp"

namespace ranger21::bench {
namespace {

// Minibatch order must not correlate with weight init, which uses the run seed itself.
constexpr std::uint64_t kSamplerSalt = 0x9E3779B97F4A7C15ull;

struct StepTotals {
    std::size_t units = 0;
    std::size_t clipped = 0;
    double vhat_sum = 0.0;
    std::size_t elements = 0;
    double decay_sq = 0.0;
    double eta_t = 0.0;
};

StepTotals summarize(const StepDiagnostics& diag) {
    const auto& k = simd::kernels();
    StepTotals s;
    s.eta_t = diag.eta_t;
    for (const auto& t : diag.tensors) {
        s.units += t.clip.units;
        s.clipped += t.clip.clipped;
        s.vhat_sum += k.sum(t.v_hat);
        s.elements += t.v_hat.size();
        s.decay_sq += k.sum_squares(t.decay);
    }
    return s;
}

struct RunOutput {
    std::vector<RunRecord> records;
    RunSummary summary;
};

RunOutput run_one(const RunConfig& cfg, const problems::Problem& problem, std::size_t index) {
    const OptimizerSpec& spec = cfg.optimizers[index];
    RunOutput out;
    RunSummary& sum = out.summary;
    sum.run = index;
    sum.optimizer = spec.label;
    sum.preset = spec.preset;

    auto params = problem.initial_params(cfg.seed);
    sum.initial_loss = problem.loss(params);
    Optimizer opt(spec.preset, spec.config, std::move(params));

    StepTotals totals;
    bool want_diag = false;
    opt.set_observer([&](const StepDiagnostics& d) {
        if (want_diag) {
            totals = summarize(d);
        }
    });

    problems::BatchSampler sampler(problem.num_samples(), cfg.problem.batch_size,
                                   cfg.seed ^ kSamplerSalt);
    auto diverge = [&](std::int64_t t) {
        sum.diverged = true;
        sum.diverged_at = t;
    };

    for (std::int64_t t = 1; t <= cfg.t_max; ++t) {
        problems::Evaluation ev;
        try {
            ev = problem.evaluate(opt.params(), sampler.next());
        } catch (const NonFiniteValue&) {
            diverge(t);
            break;
        }
        if (!std::isfinite(ev.loss)) {
            diverge(t);
            break;
        }
        want_diag = is_record_step(t, cfg.t_max, cfg.cadence);
        opt.step(ev.grads);
        sum.steps_completed = t;
        if (!want_diag) {
            continue;
        }
        const problems::Metrics m = problem.metrics(opt.params());
        if (!std::isfinite(m.loss)) {
            diverge(t);
            break;
        }
        RunRecord r;
        r.run = index;
        r.optimizer = spec.label;
        r.step = t;
        r.eta_t = totals.eta_t;
        r.loss = m.loss;
        r.accuracy = m.accuracy;
        r.clip_ratio = totals.units == 0 ? 0.0
                                         : static_cast<double>(totals.clipped) /
                                               static_cast<double>(totals.units);
        r.mean_vhat = totals.vhat_sum / static_cast<double>(totals.elements);
        r.decay_norm = totals.eta_t * std::sqrt(totals.decay_sq);
        if (!std::isfinite(r.mean_vhat) || !std::isfinite(r.decay_norm)) {
            diverge(t);
            break;
        }
        out.records.push_back(r);

        sum.final_loss = m.loss;
        sum.final_accuracy = m.accuracy;
        if (!sum.best_loss || m.loss < *sum.best_loss) {
            sum.best_loss = m.loss;
        }
        if (cfg.threshold && !sum.steps_to_threshold && m.loss <= *cfg.threshold) {
            sum.steps_to_threshold = t;
        }
    }
    return out;
}

}  // namespace

bool BenchmarkResult::all_diverged() const {
    return !summaries.empty() &&
           std::all_of(summaries.begin(), summaries.end(), [](const RunSummary& s) { return s.diverged; });
}

bool is_record_step(std::int64_t t, std::int64_t t_max, std::int64_t cadence) {
    return t % cadence == 0 || t == t_max;
}

double scheduled_eta(const OptimizerSpec& spec, std::int64_t t) {
    const Ranger21Config& c = spec.config;
    if (spec.preset == Preset::AdamW) {
        return c.schedule.eta;
    }
    double factor = 1.0;
    if (c.toggles.warmup) {
        factor = std::min(factor, warmup_factor(t, c.schedule));
    }
    if (c.toggles.warmdown) {
        factor = std::min(factor, warmdown_factor(t, c.schedule));
    }
    return factor * c.schedule.eta;
}

BenchmarkResult run_benchmark(const RunConfig& config, const RunOptions& options) {
    if (config.optimizers.empty()) {
        throw std::invalid_argument("run_benchmark: no optimizers configured");
    }
    const auto problem = make_problem(config.problem, config.seed);
    const std::size_t runs = config.optimizers.size();
    std::vector<RunOutput> outputs(runs);
    std::vector<std::exception_ptr> errors(runs);

    unsigned threads = options.threads;
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, runs));

    // Each worker claims run indices in turn; results land in their own slots,
    // so assembly below is independent of scheduling.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < runs; i = next++) {
            try {
                outputs[i] = run_one(config, *problem, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    BenchmarkResult result;
    for (auto& o : outputs) {
        result.records.insert(result.records.end(), o.records.begin(), o.records.end());
        result.summaries.push_back(std::move(o.summary));
    }
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const RunRecord& a, const RunRecord& b) {
                         if (a.optimizer != b.optimizer) {
                             return a.optimizer < b.optimizer;
                         }
                         return a.step < b.step;
                     });
    return result;
}

}  // namespace ranger21::bench
