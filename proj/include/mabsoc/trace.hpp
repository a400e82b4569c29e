#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mabsoc/policies.hpp"

namespace mabsoc {

// Result of one experiment over a horizon of N slots.
struct RegretTrace {
    std::vector<double> cumulative_regret;  // pseudo-regret after slot n, n = 1..N
    double realized_regret = 0.0;           // N * mu_star - sum of received rewards
    std::vector<std::uint64_t> pulls;       // real pulls per arm, sums to N
    std::uint64_t optimal_pulls = 0;
    std::vector<double> means;              // arm means of this experiment's environment

    PolicyCounters counters;                     // totals over the run
    std::vector<std::uint32_t> draws_per_slot;   // filled when counters are recorded
    std::vector<std::uint32_t> comparisons_per_slot;

    // Aggregators only.
    std::optional<std::size_t> committed;        // 0-based candidate index
    std::vector<std::uint8_t> active_algorithm;  // per slot
    std::vector<std::vector<double>> belief;     // after each learning slot

    double final_regret() const {
        return cumulative_regret.empty() ? 0.0 : cumulative_regret.back();
    }
};

}  // namespace mabsoc
