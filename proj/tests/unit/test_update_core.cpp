#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles/oracles.hpp"
#include "ranger21/update_core.hpp"

using namespace ranger21;

namespace {

ParamTensor scalar(double x) { return ParamTensor("s", {1}, {x}); }

}  // namespace

TEST_SUITE("update_core") {
    TEST_CASE("config validation") {
        CHECK_NOTHROW(MomentConfig{}.validate());
        CHECK_THROWS_AS((MomentConfig{1.0, 0.9, 0.999, 1e-8}.validate()), std::invalid_argument);
        CHECK_THROWS_AS((MomentConfig{0.9, 0.9, 0.999, 0.0}.validate()), std::invalid_argument);
        CHECK_THROWS_AS((DecayConfig{-1e-4, true, true}.validate()), std::invalid_argument);
    }

    TEST_CASE("pnm worked examples") {
        SUBCASE("zero gradient") {
            MomentState s(1);
            const auto out = pnm_update(s, scalar(0.0), 1, MomentConfig{});
            CHECK(out.update.values()[0] == 0.0);
            CHECK(out.v_hat.values()[0] == 0.0);
        }
        SUBCASE("unit gradient at t = 1") {
            MomentState s(1);
            const auto out = pnm_update(s, scalar(1.0), 1, MomentConfig{});
            // m = 0.19, m_hat = 1.9 * 0.19 / 0.1 = 3.61, v_hat = 1
            CHECK(s.m_prev[0] == doctest::Approx(0.19).epsilon(1e-14));
            CHECK(out.v_hat.values()[0] == doctest::Approx(1.0).epsilon(1e-14));
            const double expect = 3.61 / (std::sqrt(4.42) * (1.0 + 1e-8));
            CHECK(std::fabs(out.update.values()[0] - expect) <= 1e-12);
            CHECK(out.update.values()[0] == doctest::Approx(1.7171).epsilon(1e-4));
        }
        SUBCASE("beta0 = 0 removes the normalizer") {
            MomentState s(1);
            const auto out = pnm_update(s, scalar(1.0), 1, MomentConfig{0.0, 0.9, 0.999, 1e-8});
            // m = 0.19, m_hat = 0.19 / 0.1 = 1.9, v_hat = 1
            CHECK(out.update.values()[0] == doctest::Approx(1.9 / (1.0 + 1e-8)).epsilon(1e-14));
        }
        CHECK_THROWS_AS(([] { MomentState s(1); pnm_update(s, scalar(1.0), 0, MomentConfig{}); })(),
                        std::invalid_argument);
        CHECK_THROWS_AS(([] { MomentState s(2); pnm_update(s, scalar(1.0), 1, MomentConfig{}); })(),
                        std::invalid_argument);
    }

    TEST_CASE("pnm matches the scalar oracle and keeps v_max monotone") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> g(-10, 10);
        for (int run = 0; run < 20; ++run) {
            MomentState s(1);
            oracle::Pnm ref;
            double prev_vmax = 0.0;
            for (int t = 1; t <= 50; ++t) {
                const double x = g(rng);
                const auto out = pnm_update(s, scalar(x), t, MomentConfig{});
                const double u = ref.step(x);
                CHECK(std::fabs(out.update.values()[0] - u) <= 1e-12 * std::fmax(1.0, std::fabs(u)));
                CHECK(s.v_max[0] >= prev_vmax);
                prev_vmax = s.v_max[0];
            }
        }
    }

    TEST_CASE("buffer rotation keeps m_{t-1} and m_{t-2}") {
        MomentState s(1);
        const MomentConfig cfg;
        pnm_update(s, scalar(1.0), 1, cfg);
        const double m1 = s.m_prev[0];
        pnm_update(s, scalar(2.0), 2, cfg);
        CHECK(s.m_prev2[0] == m1);
        CHECK(s.m_prev[0] == doctest::Approx(0.19 * 2.0).epsilon(1e-14));  // m_0 = 0
    }

    TEST_CASE("beta0 = 0 reduces to the two-buffer momentum") {
        std::mt19937_64 rng(22);
        std::uniform_real_distribution<double> g(-1, 1);
        const MomentConfig cfg{0.0, 0.9, 0.999, 1e-8};
        MomentState s(1);
        double m1 = 0, m2 = 0, v = 0, vmax = 0;
        for (int t = 1; t <= 30; ++t) {
            const double x = g(rng);
            const auto out = pnm_update(s, scalar(x), t, cfg);
            const double m = 0.81 * m2 + 0.19 * x;
            m2 = m1;
            m1 = m;
            v = 0.999 * v + 0.001 * x * x;
            vmax = std::fmax(vmax, v);
            const double vhat = vmax / (1 - oracle::power(0.999, t));
            const double expect = (m / (1 - oracle::power(0.9, t))) / (std::sqrt(vhat) + 1e-8);
            CHECK(out.update.values()[0] == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    TEST_CASE("constant gradient: moments converge") {
        MomentState s(1);
        const MomentConfig cfg;
        MomentOutput out{scalar(0), scalar(0)};
        for (int t = 1; t <= 10000; ++t) {
            out = pnm_update(s, scalar(0.5), t, cfg);
        }
        CHECK(std::fabs(s.m_prev[0] - 0.5) <= 1e-6);
        // m_hat -> ((1 + b0) - b0) * 0.5 = 0.5
        const double m_hat = out.update.values()[0] * std::sqrt(4.42) * (std::sqrt(out.v_hat.values()[0]) + 1e-8);
        CHECK(std::fabs(m_hat - 0.5) <= 1e-6);
    }

    TEST_CASE("adam moments match the textbook formulas") {
        MomentState s(1);
        const auto out = adam_update(s, scalar(1.0), 1, MomentConfig{});
        CHECK(out.v_hat.values()[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(out.update.values()[0] == doctest::Approx(1.0 / (1.0 + 1e-8)).epsilon(1e-14));
    }

    TEST_CASE("combined decay examples") {
        const DecayConfig on;
        const auto ones = ParamTensor::filled("v", {2}, 1.0);
        SUBCASE("unit norm gives zero decay") {
            const auto d = combined_decay(ParamTensor("w", {2}, {0.6, 0.8}), ones, 1.0, on);
            CHECK(d.values()[0] == 0.0);
            CHECK(d.values()[1] == 0.0);
        }
        SUBCASE("norm 2 and v_hat = 1 gives 5e-5 theta") {
            const ParamTensor theta("w", {2}, {1.2, 1.6});
            const auto d = combined_decay(theta, ones, 1.0, on);
            CHECK(d.values()[0] == doctest::Approx(5e-5 * 1.2).epsilon(1e-14));
            CHECK(d.values()[1] == doctest::Approx(5e-5 * 1.6).epsilon(1e-14));
        }
        SUBCASE("zero theta gives zero decay") {
            const auto d = combined_decay(ParamTensor::zeros("w", {2}), ones, 1.0, on);
            CHECK(d.values()[0] == 0.0);
        }
        SUBCASE("zero v_hat uses the floor") {
            const ParamTensor theta("w", {1}, {2.0});
            const auto d = combined_decay(theta, ParamTensor::zeros("v", {1}), 1.0, on);
            CHECK(d.values()[0] == doctest::Approx(1e-4 / kStableDecayFloor * 0.5 * 2.0).epsilon(1e-14));
        }
        SUBCASE("both flags off is plain lambda theta") {
            const ParamTensor theta("w", {2}, {3.0, -1.0});
            const auto d = combined_decay(theta, ParamTensor::filled("v", {2}, 9.0), 1.0, DecayConfig{1e-4, false, false});
            CHECK(d.values()[0] == doctest::Approx(3e-4).epsilon(1e-14));
            CHECK(d.values()[1] == doctest::Approx(-1e-4).epsilon(1e-14));
        }
    }

    TEST_CASE("decay properties on random tensors") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 200; ++trial) {
            const auto shape = testing::random_shape(rng, 1 + trial % 3, 5);
            const auto theta = testing::random_tensor(rng, shape, -1.5, 1.5);
            const double n = frobenius_norm(theta);
            if (n == 0.0 || n == 1.0) {
                continue;
            }
            const double c = 0.25 + trial * 0.01;
            const auto vhat = ParamTensor::filled("v", shape, c);
            const double eta_t = 0.7;
            const auto d = combined_decay(theta, vhat, eta_t, DecayConfig{});

            double dot = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                dot += d.values()[i] * theta.values()[i];
            }
            CHECK((n > 1.0) == (dot > 0.0));  // theta - d moves the norm toward 1

            const double expect = eta_t * 1e-4 / std::sqrt(c) * std::fabs(n - 1.0);
            CHECK(frobenius_norm(d) == doctest::Approx(expect).epsilon(1e-12));

            const auto ones = ParamTensor::filled("v", shape, 1.0);
            const auto stable = combined_decay(theta, ones, eta_t, DecayConfig{1e-4, true, true});
            const auto plain = combined_decay(theta, ones, eta_t, DecayConfig{1e-4, true, false});
            for (std::size_t i = 0; i < d.size(); ++i) {
                CHECK(std::fabs(stable.values()[i] - plain.values()[i]) <= 1e-15);
            }
        }
    }
}
