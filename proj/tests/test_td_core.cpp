#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hdrl/td_core.hpp"

using namespace hdrl;

namespace {
RunningStats stats_with(double mean, double std_dev, double tau = 1e-3) {
    RunningStats s;
    s.mean = mean;
    s.std = std_dev;
    s.var = std_dev * std_dev;
    s.ema_rate = tau;
    return s;
}
}  // namespace

TEST_CASE("effective_discount examples") {
    HyperParams hp;  // defaults: kappa=0.01, p=1, beta=0.1

    CHECK(effective_discount(0.0, stats_with(1.0, 0.5), hp) == 1.0);
    CHECK(effective_discount(50.0, stats_with(1.0, 0.0), hp) ==
          doctest::Approx(0.5).epsilon(1e-12));
    // raw value 1 - 0.01*200/1 = -1, clamped
    CHECK(effective_discount(200.0, stats_with(1.0, 0.0), hp) == 0.0);
}

TEST_CASE("effective_discount cold start is myopic") {
    HyperParams hp;
    RunningStats fresh;  // mean = std = 0, denominator floored
    CHECK(effective_discount(1.0, fresh, hp) == 0.0);
    CHECK(effective_discount(0.0, fresh, hp) == 1.0);
}

TEST_CASE("effective_discount rejects non-finite input") {
    HyperParams hp;
    CHECK_THROWS_AS(effective_discount(std::nan(""), stats_with(1, 0), hp),
                    std::invalid_argument);
}

TEST_CASE("effective_discount range and monotonicity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uv(0.0, 100.0);
    std::uniform_real_distribution<double> um(0.0, 5.0);
    std::uniform_real_distribution<double> uk(0.0, 0.1);
    for (int i = 0; i < 2000; ++i) {
        HyperParams hp;
        hp.kappa = uk(rng);
        double v = uv(rng);
        auto s = stats_with(um(rng), um(rng));
        double g = effective_discount(v, s, hp);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        // non-increasing in v and kappa, non-decreasing in mean
        CHECK(effective_discount(v + 1.0, s, hp) <= g);
        HyperParams hp2 = hp;
        hp2.kappa = hp.kappa + 0.01;
        CHECK(effective_discount(v, s, hp2) <= g);
        auto s2 = s;
        s2.mean += 1.0;
        CHECK(effective_discount(v, s2, hp) >= g);
    }
}

TEST_CASE("kappa zero gives undiscounted TD") {
    HyperParams hp;
    hp.kappa = 0.0;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        double v = u(rng), vn = u(rng), r = u(rng);
        auto s = stats_with(u(rng), u(rng));
        double g = effective_discount(v, s, hp);
        CHECK(g == 1.0);
        CHECK(hyper_td_error(r, g, v, vn, false) ==
              doctest::Approx(r + vn - v).epsilon(1e-15));
    }
}

TEST_CASE("hyper_td_error examples") {
    CHECK(hyper_td_error(0.0, 1.0, 7.0, 7.0, false) == 0.0);
    CHECK(hyper_td_error(1.0, 0.9, 10.0, 10.0, false) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hyper_td_error(1.0, 0.5, 2.0, 123.0, true) == -1.0);
}

TEST_CASE("hyper_td_error fixed-point identity") {
    for (double v : {0.0, 0.5, 3.0, 100.0})
        CHECK(hyper_td_error(0.0, 1.0, v, v, false) == 0.0);
}

TEST_CASE("compensate_scale examples and linearity") {
    CHECK(compensate_scale(5.0, 0.0) == 5.0);
    CHECK(compensate_scale(5.0, 1.0) == 0.0);
    CHECK(compensate_scale(1.0, 0.99) == doctest::Approx(0.01).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::uniform_real_distribution<double> ug(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double x = u(rng), a = u(rng), g = ug(rng);
        CHECK(compensate_scale(a * x, g) ==
              doctest::Approx(a * compensate_scale(x, g)).epsilon(1e-12));
    }
}

TEST_CASE("update_stats examples") {
    RunningStats s;
    s.ema_rate = 1.0;
    s.mean = 42.0;
    s.var = 9.0;
    s.std = 3.0;
    s = update_stats(s, 3.0);
    CHECK(s.mean == 3.0);
    CHECK(s.std == 0.0);
    CHECK(s.count == 1);

    RunningStats t;
    t.ema_rate = 0.5;
    t = update_stats(t, 2.0);
    CHECK(t.mean == doctest::Approx(1.0));
    CHECK(t.var == doctest::Approx(1.0));
    CHECK(t.std == doctest::Approx(1.0));
}

TEST_CASE("update_stats converges on a constant stream") {
    RunningStats s;
    s.ema_rate = 0.05;
    for (int i = 0; i < 2000; ++i) s = update_stats(s, 4.0);
    CHECK(s.mean == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(s.std == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("update_stats keeps std nonnegative on random streams") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> tau(0.001, 1.0);
    std::exponential_distribution<double> sample(0.7);
    for (int trial = 0; trial < 50; ++trial) {
        RunningStats s;
        s.ema_rate = tau(rng);
        for (int i = 0; i < 500; ++i) {
            s = update_stats(s, sample(rng));
            CHECK(s.std >= 0.0);
            CHECK(std::isfinite(s.std));
        }
    }
}

TEST_CASE("update_avg_discount examples") {
    RunningStats s;
    s.ema_rate = 0.37;
    s.avg_discount = 0.5;
    CHECK(update_avg_discount(s, 0.5).avg_discount == doctest::Approx(0.5));

    RunningStats t;
    t.ema_rate = 0.1;
    CHECK(update_avg_discount(t, 1.0).avg_discount == doctest::Approx(0.1));

    RunningStats u;
    u.ema_rate = 1.0;
    u.avg_discount = 0.2;
    CHECK(update_avg_discount(u, 0.7).avg_discount == doctest::Approx(0.7));

    CHECK_THROWS_AS(update_avg_discount(u, 1.5), std::invalid_argument);
}

TEST_CASE("hyperbolic return oracle") {
    std::vector<double> empty;
    CHECK(hyperbolic_return_oracle<double>(empty, 0.01) == 0.0);

    std::vector<double> v{1.0, 2.0, 3.0};
    CHECK(hyperbolic_return_oracle<double>(v, 0.0) == 6.0);

    std::vector<double> ones{1.0, 1.0, 1.0};
    double expected = 1.0 + 1.0 / 1.01 + 1.0 / 1.02;
    CHECK(hyperbolic_return_oracle<double>(ones, 0.01) ==
          doctest::Approx(expected).epsilon(1e-12));

    // kappa > 0 strictly below the plain sum when a later signal is positive
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> sig(10);
        double sum = 0.0;
        for (auto& x : sig) {
            x = u(rng);
            sum += x;
        }
        CHECK(hyperbolic_return_oracle<double>(sig, 0.05) < sum);
        CHECK(hyperbolic_return_oracle<double>(sig, 0.0) ==
              doctest::Approx(sum).epsilon(1e-15));
    }
}

// Deterministic chain, reward only at the terminal transition. The
// oracle iterates V <- r_scaled + gamma(V) V_next to a fixed point and
// the TD error must vanish at it.
TEST_CASE("tabular chain fixed point") {
    const int n = 6;
    HyperParams hp;
    auto stats = stats_with(1.0 / n, 0.3);
    const double scaled_terminal = 1.0;

    std::vector<double> value(n, 0.0);
    for (int sweep = 0; sweep < 100000; ++sweep) {
        for (int i = n - 1; i >= 0; --i) {
            const bool terminal = i == n - 1;
            const double r = terminal ? scaled_terminal : 0.0;
            const double vn = terminal ? 0.0 : value[i + 1];
            const double g = effective_discount(value[i], stats, hp);
            value[i] = r + g * vn;
        }
    }
    for (int i = 0; i < n; ++i) {
        const bool terminal = i == n - 1;
        const double r = terminal ? scaled_terminal : 0.0;
        const double vn = terminal ? 0.0 : value[i + 1];
        const double g = effective_discount(value[i], stats, hp);
        const double delta = hyper_td_error(r, g, value[i], vn, terminal);
        CHECK(std::abs(delta) < 1e-10);
    }
}
