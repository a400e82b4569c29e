#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mabsoc {

// CDF of Beta(a, b) for positive integer a, b at x in [0,1], via the binomial
// identity I_x(a, b) = P(Binomial(a + b - 1, x) >= a).
double beta_cdf_integer(std::uint64_t a, std::uint64_t b, double x);

// Kolmogorov-Smirnov distance between an ascending-sorted sample and
// Beta(a, b) with integer parameters.
double ks_distance_beta(std::span<const double> sorted, std::uint64_t a, std::uint64_t b);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Oracle checks behind `mabsim validate`: order-statistic and binned QF
// distributions, draw-count complexity, bin-table / belief / epoch / quantizer
// invariants, and hand-computed anchors.
std::vector<CheckResult> run_validation_suite(std::uint32_t seed);

}  // namespace mabsoc
