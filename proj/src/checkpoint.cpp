#include "ranger21/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ranger21 {
namespace {

constexpr std::array<char, 8> kMagic = {'R', '2', '1', 'C', 'K', 'P', 'T', '\0'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u64(std::uint64_t x) {
        std::array<char, 8> bytes;
        for (std::size_t i = 0; i < 8; ++i) {
            bytes[i] = static_cast<char>((x >> (8 * i)) & 0xffu);
        }
        out_.write(bytes.data(), bytes.size());
    }
    void i64(std::int64_t x) { u64(static_cast<std::uint64_t>(x)); }
    void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
    void flag(bool b) { u64(b ? 1 : 0); }
    void str(const std::string& s) {
        u64(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void doubles(std::span<const double> xs) {
        u64(xs.size());
        for (double x : xs) {
            f64(x);
        }
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint64_t u64() {
        std::array<unsigned char, 8> bytes;
        in_.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
        if (!in_) {
            throw std::runtime_error("checkpoint: unexpected end of data");
        }
        std::uint64_t x = 0;
        for (std::size_t i = 0; i < 8; ++i) {
            x |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        }
        return x;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool flag() {
        const auto v = u64();
        if (v > 1) {
            throw std::runtime_error("checkpoint: corrupt flag");
        }
        return v == 1;
    }
    std::string str() {
        const auto n = u64();
        if (n > (1u << 20)) {
            throw std::runtime_error("checkpoint: implausible string length");
        }
        std::string s(n, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(n));
        if (!in_) {
            throw std::runtime_error("checkpoint: unexpected end of data");
        }
        return s;
    }
    std::vector<double> doubles(std::size_t expected) {
        const auto n = u64();
        if (n != expected) {
            throw std::runtime_error("checkpoint: buffer length " + std::to_string(n) +
                                     " does not match tensor size " + std::to_string(expected));
        }
        std::vector<double> xs(n);
        for (double& x : xs) {
            x = f64();
        }
        return xs;
    }

private:
    std::istream& in_;
};

void write_config(Writer& w, const Ranger21Config& c) {
    w.f64(c.schedule.eta);
    w.f64(c.schedule.beta2);
    w.i64(c.schedule.t_max);
    w.i64(c.schedule.t_warmup);
    w.i64(c.schedule.t_warmdown);
    w.f64(c.moments.beta0);
    w.f64(c.moments.beta1);
    w.f64(c.moments.beta2);
    w.f64(c.moments.eps);
    w.f64(c.weight_decay);
    w.f64(c.clip.tau);
    w.f64(c.clip.eps_clipping);
    w.i64(c.k_lookahead);
    w.f64(c.beta_lookahead);
    const Toggles& t = c.toggles;
    for (bool b : {t.agc, t.centralization, t.pnm, t.norm_loss, t.stable_decay, t.warmup,
                   t.warmdown, t.lookahead}) {
        w.flag(b);
    }
}

Ranger21Config read_config(Reader& r) {
    Ranger21Config c;
    c.schedule.eta = r.f64();
    c.schedule.beta2 = r.f64();
    c.schedule.t_max = r.i64();
    c.schedule.t_warmup = r.i64();
    c.schedule.t_warmdown = r.i64();
    c.moments.beta0 = r.f64();
    c.moments.beta1 = r.f64();
    c.moments.beta2 = r.f64();
    c.moments.eps = r.f64();
    c.weight_decay = r.f64();
    c.clip.tau = r.f64();
    c.clip.eps_clipping = r.f64();
    c.k_lookahead = r.i64();
    c.beta_lookahead = r.f64();
    Toggles& t = c.toggles;
    for (bool* b : {&t.agc, &t.centralization, &t.pnm, &t.norm_loss, &t.stable_decay, &t.warmup,
                    &t.warmdown, &t.lookahead}) {
        *b = r.flag();
    }
    return c;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Optimizer& opt) {
    out.write(kMagic.data(), kMagic.size());
    Writer w(out);
    w.u64(kCheckpointVersion);
    w.u64(opt.preset() == Preset::AdamW ? 0 : 1);
    write_config(w, opt.config());
    const OptimizerState& s = opt.state();
    w.i64(s.steps);
    const auto params = opt.params();
    w.u64(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const ParamTensor& p = params[i];
        w.str(p.name());
        w.u64(p.rank());
        for (std::size_t extent : p.shape()) {
            w.u64(extent);
        }
        w.doubles(p.values());
        const MomentState& m = s.moments[i];
        w.doubles(m.m_prev);
        w.doubles(m.m_prev2);
        w.doubles(m.v);
        w.doubles(m.v_max);
        w.doubles(s.lookahead.slow_weights[i]);
    }
    if (!out) {
        throw std::runtime_error("checkpoint: write failed");
    }
}

Optimizer read_checkpoint(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw std::runtime_error("checkpoint: bad magic header");
    }
    Reader r(in);
    if (const auto version = r.u64(); version != kCheckpointVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    }
    const auto preset_code = r.u64();
    if (preset_code > 1) {
        throw std::runtime_error("checkpoint: unknown preset code");
    }
    const Preset preset = preset_code == 0 ? Preset::AdamW : Preset::Ranger21;
    Ranger21Config config = read_config(r);
    OptimizerState state;
    state.steps = r.i64();
    const auto count = r.u64();
    std::vector<ParamTensor> params;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string name = r.str();
        const auto rank = r.u64();
        if (rank == 0 || rank > 16) {
            throw std::runtime_error("checkpoint: implausible tensor rank");
        }
        Shape shape(rank);
        for (auto& extent : shape) {
            extent = r.u64();
        }
        const std::size_t n = element_count(shape);
        params.emplace_back(std::move(name), std::move(shape), r.doubles(n));
        MomentState m;
        m.m_prev = r.doubles(n);
        m.m_prev2 = r.doubles(n);
        m.v = r.doubles(n);
        m.v_max = r.doubles(n);
        state.moments.push_back(std::move(m));
        state.lookahead.slow_weights.push_back(r.doubles(n));
    }
    return Optimizer(preset, std::move(config), std::move(params), std::move(state));
}

void save_checkpoint(const std::filesystem::path& path, const Optimizer& opt) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
    }
    write_checkpoint(out, opt);
}

Optimizer load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("checkpoint: cannot open " + path.string());
    }
    return read_checkpoint(in);
}

}  // namespace ranger21
