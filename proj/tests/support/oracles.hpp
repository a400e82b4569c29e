#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// std::mt19937 is the reference engine for the from-scratch twister.
inline std::vector<std::uint32_t> mt_outputs(std::uint32_t seed, std::size_t count) {
    std::mt19937 ref(seed);
    std::vector<std::uint32_t> out(count);
    for (auto& v : out) v = static_cast<std::uint32_t>(ref());
    return out;
}

inline double beta_pdf(double a, double b, double t) {
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    if (t <= 0.0) return a == 1.0 ? std::exp(log_norm) : 0.0;
    if (t >= 1.0) return b == 1.0 ? std::exp(log_norm) : 0.0;
    return std::exp(log_norm + (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t));
}

// Beta(a, b) CDF by composite Simpson integration of the density. Slow, but
// shares nothing with the binomial-sum form in the library.
inline double beta_cdf_quadrature(double a, double b, double x, int panels = 20000) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double h = x / panels;
    double s = beta_pdf(a, b, 0.0) + beta_pdf(a, b, x);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * beta_pdf(a, b, i * h);
    return s * h / 3.0;
}

// Active candidate (0-based) for slots 1..n: candidate a runs 2^e slots,
// then the next one; e grows after the last candidate.
inline std::vector<std::size_t> epoch_schedule(std::size_t candidates, std::size_t n) {
    std::vector<std::size_t> out;
    for (unsigned e = 1; out.size() < n; ++e)
        for (std::size_t a = 0; a < candidates && out.size() < n; ++a)
            for (std::uint64_t r = 0; r < (std::uint64_t{1} << e) && out.size() < n; ++r)
                out.push_back(a);
    return out;
}

inline double ucb(double x, double t, double n, double alpha) {
    return x / t + std::sqrt(alpha * std::log(n) / t);
}

inline double bernoulli_kl(double p, double q) {
    auto term = [](double a, double b) { return a == 0.0 ? 0.0 : a * std::log(a / b); };
    return term(p, q) + term(1.0 - p, 1.0 - q);
}

// Largest q in [p, 1] with d(p, q) <= budget, by a 200-step bisection.
inline double klucb(double p, double budget) {
    double lo = p, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bernoulli_kl(p, mid) <= budget ? lo : hi) = mid;
    }
    return lo;
}

// Exponential-weights update with importance weighting on the active entry.
inline std::vector<double> exp_weights(std::vector<double> pi, std::size_t alg, double reward,
                                       double n, double arms) {
    const double eta = std::sqrt(std::log(static_cast<double>(pi.size())) / (n * arms));
    pi[alg] *= std::exp(eta * reward / pi[alg]);
    double s = 0.0;
    for (double v : pi) s += v;
    for (double& v : pi) v /= s;
    return pi;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracle
