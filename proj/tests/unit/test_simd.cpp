#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ranger21/engine.hpp"
#include "ranger21/problems/dataset.hpp"
#include "ranger21/problems/problem.hpp"
#include "ranger21/simd/kernels.hpp"

using namespace ranger21;
using simd::Backend;
using simd::KernelTable;

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same_bits(a[i], b[i])) {
            return false;
        }
    }
    return true;
}

// Inputs with wide dynamic range so that rounding differences would show.
std::vector<double> nasty(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-30, 30);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::ldexp(mant(rng), expo(rng));
        if (i % 11 == 3) {
            v[i] = -0.0;
        }
        if (i % 13 == 5) {
            v[i] = std::numeric_limits<double>::denorm_min() * 7.0;
        }
    }
    return v;
}

// The documented reduction order, written out independently.
double documented_sum(const std::vector<double>& x) {
    const std::size_t body = x.size() - x.size() % 4;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < body; ++i) {
        lane[i % 4] += x[i];
    }
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = body; i < x.size(); ++i) {
        s += x[i];
    }
    return s;
}

std::vector<const KernelTable*> vector_tables() {
    std::vector<const KernelTable*> out;
    for (Backend b : simd::available_backends()) {
        if (b != Backend::Scalar) {
            out.push_back(simd::kernels_for(b));
        }
    }
    return out;
}

struct BackendGuard {
    Backend saved = simd::active_backend();
    ~BackendGuard() { simd::set_backend(saved); }
};

}  // namespace

TEST_SUITE("simd") {
    TEST_CASE("backend names and availability") {
        CHECK(simd::parse_backend("scalar") == Backend::Scalar);
        CHECK(simd::parse_backend("avx2") == Backend::Avx2);
        CHECK(simd::parse_backend("neon") == Backend::Neon);
        CHECK_THROWS_AS(simd::parse_backend("sse9"), std::invalid_argument);
        const auto avail = simd::available_backends();
        REQUIRE(!avail.empty());
        CHECK(avail.front() == Backend::Scalar);
        for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
            const bool listed = std::find(avail.begin(), avail.end(), b) != avail.end();
            CHECK(listed == (simd::kernels_for(b) != nullptr));
            if (!listed) {
                CHECK_THROWS_AS(simd::set_backend(b), std::invalid_argument);
            }
        }
        MESSAGE("active backend: " << simd::backend_name(simd::active_backend()));
    }

    TEST_CASE("scalar reductions follow the documented order") {
        const KernelTable& s = *simd::kernels_for(Backend::Scalar);
        std::mt19937_64 rng(1);
        for (std::size_t n = 0; n < 40; ++n) {
            const auto x = nasty(rng, n);
            const auto y = nasty(rng, n);
            CHECK(same_bits(s.sum(x), documented_sum(x)));
            std::vector<double> sq(n), xy(n);
            for (std::size_t i = 0; i < n; ++i) {
                sq[i] = x[i] * x[i];
                xy[i] = x[i] * y[i];
            }
            CHECK(same_bits(s.sum_squares(x), documented_sum(sq)));
            CHECK(same_bits(s.dot(x, y), documented_sum(xy)));
        }
    }

    TEST_CASE("vector backends match scalar bit for bit") {
        const auto tables = vector_tables();
        if (tables.empty()) {
            MESSAGE("no vector backend on this machine; only the scalar table is exercised");
        }
        const KernelTable& ref = *simd::kernels_for(Backend::Scalar);
        std::mt19937_64 rng(2);
        for (const KernelTable* vt : tables) {
            CAPTURE(simd::backend_name(vt->backend));
            for (std::size_t n = 0; n <= 67; ++n) {
                CAPTURE(n);
                const auto x = nasty(rng, n);
                const auto y = nasty(rng, n);
                CHECK(same_bits(vt->sum(x), ref.sum(x)));
                CHECK(same_bits(vt->sum_squares(x), ref.sum_squares(x)));
                CHECK(same_bits(vt->dot(x, y), ref.dot(x, y)));

                auto a = x, b = x;
                ref.scale(a, 0.3);
                vt->scale(b, 0.3);
                CHECK(same_bits(a, b));

                std::vector<double> oa(n), ob(n);
                ref.scaled_copy(x, -1.7, oa);
                vt->scaled_copy(x, -1.7, ob);
                CHECK(same_bits(oa, ob));

                a = x, b = x;
                ref.add_scalar(a, 1e-3);
                vt->add_scalar(b, 1e-3);
                CHECK(same_bits(a, b));

                a = y, b = y;
                ref.axpy(0.77, x, a);
                vt->axpy(0.77, x, b);
                CHECK(same_bits(a, b));

                const auto d = nasty(rng, n);
                a = x, b = x;
                ref.apply_update(a, y, d, 3e-3);
                vt->apply_update(b, y, d, 3e-3);
                CHECK(same_bits(a, b));

                auto sa = y, sb = y;
                a = x, b = x;
                ref.lookahead_blend(sa, a, 0.5);
                vt->lookahead_blend(sb, b, 0.5);
                CHECK(same_bits(sa, sb));
                CHECK(same_bits(a, b));
            }
        }
    }

    TEST_CASE("moment kernels match scalar bit for bit over multi-step runs") {
        const auto tables = vector_tables();
        const KernelTable& ref = *simd::kernels_for(Backend::Scalar);
        std::mt19937_64 rng(3);
        for (const KernelTable* vt : tables) {
            CAPTURE(simd::backend_name(vt->backend));
            for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 17u, 64u, 67u}) {
                CAPTURE(n);
                std::vector<double> m1(n), m2(n), v1(n), v2(n), vm1(n), vm2(n);
                std::vector<double> p1(n), p2(n), q1(n), q2(n), pv1(n), pv2(n);
                std::vector<double> u1(n), u2(n), h1(n), h2(n);
                for (int t = 1; t <= 12; ++t) {
                    // Repeat a gradient now and then so v == v_max ties occur.
                    const auto g = (t % 4 == 0) ? std::vector<double>(n, 0.0) : nasty(rng, n);
                    const double bc1 = 1.0 - std::pow(0.9, t);
                    const double bc2 = 1.0 - std::pow(0.999, t);
                    ref.adam_moments({g, m1, v1, u1, h1, 0.9, 0.999, bc1, bc2, 1e-8});
                    vt->adam_moments({g, m2, v2, u2, h2, 0.9, 0.999, bc1, bc2, 1e-8});
                    CHECK(same_bits(m1, m2));
                    CHECK(same_bits(v1, v2));
                    CHECK(same_bits(u1, u2));
                    CHECK(same_bits(h1, h2));

                    const double norm = std::sqrt(1.9 * 1.9 + 0.81);
                    ref.pnm_moments({g, p1, q1, pv1, vm1, u1, h1, 0.9, 0.81, 0.999, bc1, bc2, 1e-8, norm});
                    vt->pnm_moments({g, p2, q2, pv2, vm2, u2, h2, 0.9, 0.81, 0.999, bc1, bc2, 1e-8, norm});
                    CHECK(same_bits(q1, q2));
                    CHECK(same_bits(pv1, pv2));
                    CHECK(same_bits(vm1, vm2));
                    CHECK(same_bits(u1, u2));
                    CHECK(same_bits(h1, h2));
                    std::swap(p1, q1);
                    std::swap(p2, q2);
                }
            }
        }
    }

    TEST_CASE("whole training runs are identical under every backend") {
        BackendGuard guard;
        problems::MlpArch arch;
        arch.inputs = 5;
        arch.hidden = {7, 6};
        arch.classes = 3;
        const problems::MlpProblem problem(arch, problems::make_blobs(4, 90, 5, 3, 2.0), 0.1);

        std::vector<std::vector<double>> finals;
        for (Backend b : simd::available_backends()) {
            simd::set_backend(b);
            for (Preset preset : {Preset::AdamW, Preset::Ranger21}) {
                Optimizer opt(preset, Ranger21Config::defaults(3e-3, 60), problem.initial_params(9));
                for (int t = 0; t < 60; ++t) {
                    opt.step(problem.evaluate(opt.params(), {}).grads);
                }
                std::vector<double> flat;
                for (const auto& p : opt.params()) {
                    flat.insert(flat.end(), p.values().begin(), p.values().end());
                }
                finals.push_back(std::move(flat));
            }
        }
        for (std::size_t i = 2; i < finals.size(); ++i) {
            CHECK(same_bits(finals[i], finals[i % 2]));
        }
    }
}
