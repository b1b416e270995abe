#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ranger21/engine.hpp"
#include "ranger21/problems/mlp.hpp"
#include "ranger21/problems/problem.hpp"

namespace ranger21::bench {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kDefaultLearningRate = 3e-3;

/// Malformed or invalid run configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output (CLI exit code 2).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DatasetSpec {
    std::optional<std::uint64_t> seed;  // unset: the run seed
    std::size_t n = 2000;
    std::size_t dims = 20;
    std::size_t classes = 4;
    double separation = 8.0;
};

enum class ProblemKind { Rosenbrock, Quadratic, Mlp };

struct ProblemSpec {
    ProblemKind kind = ProblemKind::Rosenbrock;
    std::vector<double> start;     // rosenbrock, quadratic
    std::vector<double> spectrum;  // quadratic
    DatasetSpec dataset;           // mlp
    std::vector<std::size_t> hidden{32};
    problems::Activation activation = problems::Activation::Tanh;
    double label_smoothing = 0.1;
    std::size_t batch_size = 0;  // 0 = full batch

    std::string name() const;
};

struct OptimizerSpec {
    std::string label;  // unique within a config; defaults to the preset name
    Preset preset = Preset::Ranger21;
    Ranger21Config config;  // fully resolved; AdamW reads eta, weight_decay, beta1, beta2, eps
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    ProblemSpec problem;
    std::vector<OptimizerSpec> optimizers;
    std::int64_t t_max = 1;
    std::int64_t cadence = 1;
    std::string output = "results";
    std::uint64_t seed = 0;
    std::optional<double> threshold;  // loss level for steps-to-threshold
};

/// Parses and fully resolves a JSON run configuration. Throws ConfigError
/// with the offending field path (or line and column for syntax errors).
RunConfig parse_config(std::string_view text);

/// Reads and parses a config file; IoError if it cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Builds the problem `spec` describes, generating its dataset if it has one.
std::unique_ptr<problems::Problem> make_problem(const ProblemSpec& spec, std::uint64_t run_seed);

}  // namespace ranger21::bench
