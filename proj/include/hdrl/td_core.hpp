#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace hdrl {

// Hyperparameters of the state-dependent discount:
//   gamma(V) = 1 - kappa * V / (mu + beta * sigma)^exponent
struct HyperParams {
    double kappa = 0.01;
    double exponent = 1.0;
    double beta = 0.1;
};

// Per-channel signal statistics (EMA mean/variance) plus the running
// average discount factor used for scale compensation.
struct RunningStats {
    double mean = 0.0;
    double var = 0.0;
    double std = 0.0;
    double avg_discount = 0.0;
    double ema_rate = 1e-3;
    std::uint64_t count = 0;
};

struct TDOutcome {
    double delta = 0.0;
    double gamma_eff = 1.0;
    double scaled_signal = 0.0;
};

// Floor on (mu + beta*sigma)^p before any signal has been observed.
inline constexpr double kDenominatorFloor = 1e-6;

namespace detail {
inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x))
        throw std::invalid_argument(std::string("non-finite ") + what);
}
}  // namespace detail

// State-dependent effective discount factor, clamped to [0,1].
template <typename Scalar = double>
Scalar effective_discount(Scalar v_now, const RunningStats& stats,
                          const HyperParams& hp) {
    detail::require_finite(static_cast<double>(v_now), "value");
    detail::require_finite(stats.mean, "mean");
    detail::require_finite(stats.std, "std");
    Scalar den = std::pow(static_cast<Scalar>(stats.mean) +
                              static_cast<Scalar>(hp.beta * stats.std),
                          static_cast<Scalar>(hp.exponent));
    den = std::max(den, static_cast<Scalar>(kDenominatorFloor));
    Scalar raw = Scalar(1) - static_cast<Scalar>(hp.kappa) * v_now / den;
    return std::clamp(raw, Scalar(0), Scalar(1));
}

// One-step TD error with the given effective discount. Terminal
// transitions zero the successor value.
template <typename Scalar = double>
Scalar hyper_td_error(Scalar signal_scaled, Scalar gamma_eff, Scalar v_now,
                      Scalar v_next, bool terminal) {
    detail::require_finite(static_cast<double>(signal_scaled), "signal");
    detail::require_finite(static_cast<double>(gamma_eff), "discount");
    detail::require_finite(static_cast<double>(v_now), "value");
    detail::require_finite(static_cast<double>(v_next), "successor value");
    Scalar bootstrap = terminal ? Scalar(0) : v_next;
    return signal_scaled + gamma_eff * bootstrap - v_now;
}

// Multiplies the raw signal by (1 - avg_discount) so the critic's
// magnitude stays on the raw-signal scale.
template <typename Scalar = double>
Scalar compensate_scale(Scalar signal_raw, Scalar avg_discount) {
    detail::require_finite(static_cast<double>(signal_raw), "signal");
    detail::require_finite(static_cast<double>(avg_discount), "avg discount");
    return signal_raw * (Scalar(1) - avg_discount);
}

// EMA update of mean/variance with the stats' own smoothing rate.
inline RunningStats update_stats(RunningStats stats, double sample) {
    detail::require_finite(sample, "sample");
    const double tau = stats.ema_rate;
    const double prev_mean = stats.mean;
    stats.mean = (1.0 - tau) * prev_mean + tau * sample;
    stats.var = (1.0 - tau) * stats.var +
                tau * (sample - prev_mean) * (sample - stats.mean);
    stats.std = std::sqrt(std::max(0.0, stats.var));
    ++stats.count;
    return stats;
}

inline RunningStats update_avg_discount(RunningStats stats, double gamma_eff) {
    if (!(gamma_eff >= 0.0 && gamma_eff <= 1.0))
        throw std::invalid_argument("discount outside [0,1]");
    const double tau = stats.ema_rate;
    stats.avg_discount = (1.0 - tau) * stats.avg_discount + tau * gamma_eff;
    stats.avg_discount = std::clamp(stats.avg_discount, 0.0, 1.0);
    return stats;
}

// Finite-horizon hyperbolic return: sum_k s[k] / (1 + kappa * k).
template <typename Scalar = double>
Scalar hyperbolic_return_oracle(std::span<const Scalar> signals, Scalar kappa) {
    Scalar total = 0;
    for (std::size_t k = 0; k < signals.size(); ++k)
        total += signals[k] / (Scalar(1) + kappa * static_cast<Scalar>(k));
    return total;
}

}  // namespace hdrl
