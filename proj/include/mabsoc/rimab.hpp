#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mabsoc/env.hpp"
#include "mabsoc/policies.hpp"
#include "mabsoc/rng.hpp"
#include "mabsoc/trace.hpp"

namespace mabsoc {

// Doubling-epoch schedule of the learning phase. Each candidate stays active
// for 2^e consecutive slots; after the last candidate, e grows by one.
struct EpochState {
    unsigned e = 1;
    std::uint64_t r = 0;    // slots elapsed in the current block
    std::size_t alg = 0;    // active candidate, 0-based

    friend bool operator==(const EpochState&, const EpochState&) = default;
};

EpochState epoch_advance(EpochState state, std::size_t candidates);

// sqrt(ln A / (n K)).
double learning_rate(std::uint64_t n, std::size_t arms, std::size_t candidates);

// Exponential-weights step on the active candidate: pi[alg] *= exp(eta * r / pi[alg]),
// then renormalise. Throws if pi[alg] is not positive.
void belief_update(std::vector<double>& pi, std::size_t alg, double reward, double eta);

// Lowest index attaining max pi.
std::size_t commit(std::span<const double> pi);

// The two-candidate selector: 0 = UCB with ln(n + K), 1 = SBTS-ESSR on the
// shared stats and persistent table.
enum class CandidateAlg : std::size_t { Ucb = 0, SbtsEssr = 1 };
std::size_t arm_sel(CandidateAlg alg, const ArmStats& stats, std::uint64_t n,
                    std::optional<std::size_t> prev_arm, BinTable& table, Mt19937& rng,
                    double alpha = kDefaultAlpha);

enum class AggregatorMode {
    RiMab,         // epoch exploration, then commit
    VelcroApprox,  // all candidates live, belief-weighted sampled choice every slot
};

inline constexpr std::uint64_t kDefaultLearningSlots = 500;

struct AggregatorConfig {
    std::vector<PolicyConfig> candidates = default_candidates();
    std::uint64_t learning_slots = kDefaultLearningSlots;
    AggregatorMode mode = AggregatorMode::RiMab;

    static std::vector<PolicyConfig> default_candidates();
    std::string label() const;
    void validate(std::uint64_t horizon) const;
};

// One aggregator experiment. Rewards come from `rewards`; `rng` feeds the
// candidates' internal randomness (and the sampled choice in VelcroApprox).
RegretTrace rimab_run(const AggregatorConfig& config, const Environment& env,
                      std::uint64_t horizon, RewardStreams& rewards, Mt19937& rng,
                      bool record_counters = false);

}  // namespace mabsoc
