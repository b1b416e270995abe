#include "ranger21/bench/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ranger21/problems/dataset.hpp"

namespace ranger21::bench {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

std::string type_name(const json& j) { return j.type_name(); }

// A JSON object together with its location in the document. Every key read
// through it is marked as consumed; finish() rejects whatever was not.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            fail(path_.empty() ? "<root>" : path_, "expected an object, got " + type_name(j_));
        }
    }

    const std::string& path() const { return path_; }

    std::string child(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return j_.contains(std::string(key)); }

    const json* get(std::string_view key) {
        const std::string k(key);
        used_.insert(k);
        auto it = j_.find(k);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(std::string_view key) {
        const json* v = get(key);
        if (v == nullptr) {
            fail(child(key), "required field is missing");
        }
        return *v;
    }

    double number(std::string_view key, double fallback) {
        const json* v = get(key);
        return v == nullptr ? fallback : as_number(*v, child(key));
    }

    std::int64_t integer(std::string_view key, std::int64_t fallback) {
        const json* v = get(key);
        return v == nullptr ? fallback : as_integer(*v, child(key));
    }

    bool boolean(std::string_view key, bool fallback) {
        const json* v = get(key);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_boolean()) {
            fail(child(key), "expected true or false, got " + type_name(*v));
        }
        return v->get<bool>();
    }

    std::string string(std::string_view key, std::string fallback) {
        const json* v = get(key);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_string()) {
            fail(child(key), "expected a string, got " + type_name(*v));
        }
        return v->get<std::string>();
    }

    std::vector<double> numbers(std::string_view key, std::vector<double> fallback) {
        const json* v = get(key);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_array()) {
            fail(child(key), "expected an array of numbers, got " + type_name(*v));
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            out.push_back(as_number((*v)[i], child(key) + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) {
                fail(child(it.key()), "unknown key");
            }
        }
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) {
            fail(path, "expected a number, got " + type_name(v));
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            fail(path, "must be finite");
        }
        return x;
    }

    static std::int64_t as_integer(const json& v, const std::string& path) {
        if (v.is_number_integer()) {
            return v.get<std::int64_t>();
        }
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9.0e15) {
                return static_cast<std::int64_t>(x);
            }
        }
        fail(path, "expected an integer, got " + (v.is_number() ? v.dump() : type_name(v)));
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::size_t positive_size(Node& n, std::string_view key, std::size_t fallback) {
    const std::int64_t v = n.integer(key, static_cast<std::int64_t>(fallback));
    if (v < 1) {
        fail(n.child(key), "must be >= 1, got " + std::to_string(v));
    }
    return static_cast<std::size_t>(v);
}

std::uint64_t seed_value(Node& n, std::string_view key, std::uint64_t fallback) {
    const json* v = n.get(key);
    if (v == nullptr) {
        return fallback;
    }
    if (v->is_number_unsigned()) {
        return v->get<std::uint64_t>();
    }
    fail(n.child(key), "expected a non-negative integer, got " +
                           (v->is_number() ? v->dump() : type_name(*v)));
}

DatasetSpec parse_dataset(const json& j, const std::string& path) {
    Node n(j, path);
    DatasetSpec d;
    if (n.has("seed")) {
        d.seed = seed_value(n, "seed", 0);
    }
    d.n = positive_size(n, "n", d.n);
    d.dims = positive_size(n, "dims", d.dims);
    d.classes = positive_size(n, "classes", d.classes);
    d.separation = n.number("separation", d.separation);
    if (d.classes < 2) {
        fail(n.child("classes"), "must be >= 2");
    }
    if (d.n < d.classes) {
        fail(n.child("n"), "must be >= classes (" + std::to_string(d.classes) + ")");
    }
    if (d.separation < 0.0) {
        fail(n.child("separation"), "must be >= 0");
    }
    n.finish();
    return d;
}

ProblemSpec parse_problem(const json& j) {
    Node n(j, "problem");
    ProblemSpec p;
    const std::string name = n.string("name", "");
    if (name.empty()) {
        fail(n.child("name"), "required field is missing");
    }
    if (name == "rosenbrock") {
        p.kind = ProblemKind::Rosenbrock;
        p.start = n.numbers("start", {-1.5, 2.0});
        if (p.start.size() != 2) {
            fail(n.child("start"), "must have exactly 2 entries");
        }
    } else if (name == "quadratic") {
        p.kind = ProblemKind::Quadratic;
        p.spectrum = n.numbers("spectrum", {});
        if (p.spectrum.empty()) {
            fail(n.child("spectrum"), "required non-empty array");
        }
        for (std::size_t i = 0; i < p.spectrum.size(); ++i) {
            if (!(p.spectrum[i] > 0.0)) {
                fail(n.child("spectrum") + "[" + std::to_string(i) + "]", "must be > 0");
            }
        }
        p.start = n.numbers("start", std::vector<double>(p.spectrum.size(), 1.0));
        if (p.start.size() != p.spectrum.size()) {
            fail(n.child("start"), "must have as many entries as spectrum");
        }
    } else if (name == "mlp") {
        p.kind = ProblemKind::Mlp;
        const json* ds = n.get("dataset");
        if (ds != nullptr) {
            p.dataset = parse_dataset(*ds, n.child("dataset"));
        }
        if (const json* h = n.get("hidden")) {
            if (!h->is_array()) {
                fail(n.child("hidden"), "expected an array of layer widths");
            }
            p.hidden.clear();
            for (std::size_t i = 0; i < h->size(); ++i) {
                const std::string where = n.child("hidden") + "[" + std::to_string(i) + "]";
                const std::int64_t w = Node::as_integer((*h)[i], where);
                if (w < 1) {
                    fail(where, "layer width must be >= 1");
                }
                p.hidden.push_back(static_cast<std::size_t>(w));
            }
        }
        const std::string act = n.string("activation", "tanh");
        try {
            p.activation = problems::parse_activation(act);
        } catch (const std::invalid_argument& e) {
            fail(n.child("activation"), e.what());
        }
        p.label_smoothing = n.number("label_smoothing", p.label_smoothing);
        if (!(p.label_smoothing >= 0.0 && p.label_smoothing < 1.0)) {
            fail(n.child("label_smoothing"), "must lie in [0, 1)");
        }
        const std::int64_t bs = n.integer("batch_size", 0);
        if (bs < 0) {
            fail(n.child("batch_size"), "must be >= 0 (0 = full batch)");
        }
        p.batch_size = static_cast<std::size_t>(bs);
    } else {
        fail(n.child("name"), "unknown problem '" + name + "' (expected rosenbrock, quadratic or mlp)");
    }
    n.finish();
    return p;
}

void require_beta(double b, const std::string& path) {
    if (!(b >= 0.0 && b < 1.0)) {
        fail(path, "must lie in [0, 1)");
    }
}

void parse_toggles(const json& j, const std::string& path, Toggles& t) {
    Node n(j, path);
    t.agc = n.boolean("agc", t.agc);
    t.centralization = n.boolean("centralization", t.centralization);
    t.pnm = n.boolean("pnm", t.pnm);
    t.norm_loss = n.boolean("norm_loss", t.norm_loss);
    t.stable_decay = n.boolean("stable_decay", t.stable_decay);
    t.warmup = n.boolean("warmup", t.warmup);
    t.warmdown = n.boolean("warmdown", t.warmdown);
    t.lookahead = n.boolean("lookahead", t.lookahead);
    n.finish();
}

OptimizerSpec parse_optimizer(const json& j, const std::string& path, std::int64_t t_max) {
    Node n(j, path);
    OptimizerSpec spec;
    const std::string preset = n.string("preset", "");
    if (preset.empty()) {
        fail(n.child("preset"), "required field is missing");
    }
    try {
        spec.preset = parse_preset(preset);
    } catch (const std::invalid_argument& e) {
        fail(n.child("preset"), e.what());
    }
    spec.label = n.string("label", preset);
    if (spec.label.empty() || spec.label.find_first_of(",\"\n\r") != std::string::npos) {
        fail(n.child("label"), "must be non-empty and free of commas, quotes and newlines");
    }

    static const json empty = json::object();
    const json* ov = n.get("overrides");
    Node o(ov == nullptr ? empty : *ov, n.child("overrides"));

    const double eta = o.number("eta", kDefaultLearningRate);
    if (!(eta > 0.0)) {
        fail(o.child("eta"), "learning rate must be > 0");
    }
    Ranger21Config& c = spec.config;
    c = Ranger21Config::defaults(eta, t_max);
    c.moments.beta1 = o.number("beta1", c.moments.beta1);
    c.moments.beta2 = o.number("beta2", c.moments.beta2);
    c.moments.eps = o.number("eps", c.moments.eps);
    c.weight_decay = o.number("weight_decay", c.weight_decay);
    require_beta(c.moments.beta1, o.child("beta1"));
    require_beta(c.moments.beta2, o.child("beta2"));
    if (!(c.moments.eps > 0.0)) {
        fail(o.child("eps"), "must be > 0");
    }
    if (c.weight_decay < 0.0) {
        fail(o.child("weight_decay"), "must be >= 0");
    }
    c.schedule.beta2 = c.moments.beta2;

    if (spec.preset == Preset::AdamW) {
        // AdamW has no schedule, clipping or lookahead; their keys would be silently
        // ignored, so they are rejected here instead.
        o.finish();
        n.finish();
        return spec;
    }

    c.moments.beta0 = o.number("beta0", c.moments.beta0);
    require_beta(c.moments.beta0, o.child("beta0"));
    c.schedule.t_warmup = o.integer("t_warmup", c.schedule.t_warmup);
    c.schedule.t_warmdown = o.integer("t_warmdown", c.schedule.t_warmdown);
    if (c.schedule.t_warmup < 1 || c.schedule.t_warmup > t_max) {
        fail(o.child("t_warmup"), "must lie in [1, t_max]");
    }
    if (c.schedule.t_warmdown < 1 || c.schedule.t_warmdown > t_max) {
        fail(o.child("t_warmdown"), "must lie in [1, t_max]");
    }
    c.clip.tau = o.number("tau", c.clip.tau);
    c.clip.eps_clipping = o.number("eps_clipping", c.clip.eps_clipping);
    if (!(c.clip.tau > 0.0)) {
        fail(o.child("tau"), "must be > 0");
    }
    if (!(c.clip.eps_clipping > 0.0)) {
        fail(o.child("eps_clipping"), "must be > 0");
    }
    c.k_lookahead = o.integer("k_lookahead", c.k_lookahead);
    if (c.k_lookahead < 1) {
        fail(o.child("k_lookahead"), "must be >= 1");
    }
    c.beta_lookahead = o.number("beta_lookahead", c.beta_lookahead);
    require_beta(c.beta_lookahead, o.child("beta_lookahead"));
    if (const json* t = o.get("toggles")) {
        parse_toggles(*t, o.child("toggles"), c.toggles);
    }
    o.finish();
    n.finish();
    try {
        c.validate();
    } catch (const std::exception& e) {
        fail(n.child("overrides"), e.what());
    }
    return spec;
}

}  // namespace

std::string ProblemSpec::name() const {
    switch (kind) {
        case ProblemKind::Rosenbrock:
            return "rosenbrock";
        case ProblemKind::Quadratic:
            return "quadratic";
        case ProblemKind::Mlp:
            return "mlp";
    }
    return "unknown";
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("syntax error: ") + e.what());
    }
    Node root(doc, "");
    RunConfig cfg;

    const json& version = root.require("schema_version");
    cfg.schema_version = static_cast<int>(Node::as_integer(version, "schema_version"));
    if (cfg.schema_version != kSchemaVersion) {
        fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version) +
                                   " (this build reads version " + std::to_string(kSchemaVersion) + ")");
    }
    cfg.seed = seed_value(root, "seed", 0);
    cfg.t_max = Node::as_integer(root.require("t_max"), "t_max");
    if (cfg.t_max < 1) {
        fail("t_max", "must be >= 1");
    }
    cfg.cadence = root.integer("cadence", 1);
    if (cfg.cadence < 1) {
        fail("cadence", "must be >= 1");
    }
    cfg.output = root.string("output", cfg.output);
    if (cfg.output.empty()) {
        fail("output", "must be a non-empty directory path");
    }
    if (const json* th = root.get("threshold")) {
        cfg.threshold = Node::as_number(*th, "threshold");
    }
    cfg.problem = parse_problem(root.require("problem"));

    const json& opts = root.require("optimizers");
    if (!opts.is_array() || opts.empty()) {
        fail("optimizers", "expected a non-empty array");
    }
    std::set<std::string> labels;
    for (std::size_t i = 0; i < opts.size(); ++i) {
        const std::string path = "optimizers[" + std::to_string(i) + "]";
        cfg.optimizers.push_back(parse_optimizer(opts[i], path, cfg.t_max));
        if (!labels.insert(cfg.optimizers.back().label).second) {
            fail(path + ".label", "duplicate label '" + cfg.optimizers.back().label +
                                      "'; give each optimizer a distinct label");
        }
    }
    root.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading config file " + path.string());
    }
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::unique_ptr<problems::Problem> make_problem(const ProblemSpec& spec, std::uint64_t run_seed) {
    switch (spec.kind) {
        case ProblemKind::Rosenbrock:
            return std::make_unique<problems::RosenbrockProblem>(spec.start);
        case ProblemKind::Quadratic:
            return std::make_unique<problems::QuadraticProblem>(spec.spectrum, spec.start);
        case ProblemKind::Mlp: {
            const DatasetSpec& d = spec.dataset;
            problems::MlpArch arch;
            arch.inputs = d.dims;
            arch.hidden = spec.hidden;
            arch.classes = d.classes;
            arch.activation = spec.activation;
            return std::make_unique<problems::MlpProblem>(
                arch, problems::make_blobs(d.seed.value_or(run_seed), d.n, d.dims, d.classes, d.separation),
                spec.label_smoothing);
        }
    }
    throw std::logic_error("make_problem: unhandled problem kind");
}

}  // namespace ranger21::bench
