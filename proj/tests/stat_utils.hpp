#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace teststat {

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double sample_variance(const std::vector<double>& v) {
    const double m = mean(v);
    double sq = 0.0;
    for (double x : v) sq += (x - m) * (x - m);
    return sq / (v.size() - 1);
}

// Regularized incomplete beta via Lentz's continued fraction.
inline double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const double front = std::exp(lbeta + a * std::log(x) +
                                  b * std::log(1.0 - x)) / a;
    if (x > (a + 1.0) / (a + b + 2.0))
        return 1.0 - incbeta(b, a, 1.0 - x);
    double f = 1.0, c = 1.0, d = 0.0;
    const double tiny = 1e-30;
    for (int i = 0; i <= 300; ++i) {
        const int m = i / 2;
        double num;
        if (i == 0)
            num = 1.0;
        else if (i % 2 == 0)
            num = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        else
            num = -(a + m) * (a + b + m) * x /
                  ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        const double delta = c * d;
        f *= delta;
        if (std::abs(1.0 - delta) < 1e-10) return front * (f - 1.0);
    }
    throw std::runtime_error("incomplete beta did not converge");
}

inline double student_t_cdf(double t, double df) {
    const double x = df / (df + t * t);
    const double p = 0.5 * incbeta(df / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - p : p;
}

struct WelchResult {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double t = 0.0;
    double df = 1.0;
    double p_a_greater = 1.0;  // one-sided, H1: mean_a > mean_b
};

inline WelchResult welch(const std::vector<double>& a,
                         const std::vector<double>& b) {
    WelchResult r;
    r.mean_a = mean(a);
    r.mean_b = mean(b);
    const double va = sample_variance(a) / a.size();
    const double vb = sample_variance(b) / b.size();
    const double se2 = va + vb;
    if (se2 <= 0.0) {
        r.t = 0.0;
        r.df = static_cast<double>(a.size() + b.size() - 2);
        r.p_a_greater = r.mean_a > r.mean_b ? 0.0 : 1.0;
        return r;
    }
    r.t = (r.mean_a - r.mean_b) / std::sqrt(se2);
    r.df = se2 * se2 /
           (va * va / (a.size() - 1) + vb * vb / (b.size() - 1));
    r.p_a_greater = 1.0 - student_t_cdf(r.t, r.df);
    return r;
}

}  // namespace teststat
