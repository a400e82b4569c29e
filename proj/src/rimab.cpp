#include "mabsoc/rimab.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mabsoc {

EpochState epoch_advance(EpochState state, std::size_t candidates) {
    if (candidates == 0) throw std::invalid_argument("epoch_advance: no candidates");
    state.r += 1;
    if (state.r == (std::uint64_t{1} << state.e)) {
        state.r = 0;
        state.alg += 1;
        if (state.alg >= candidates) {
            state.e += 1;
            state.alg = 0;
        }
    }
    return state;
}

double learning_rate(std::uint64_t n, std::size_t arms, std::size_t candidates) {
    if (n == 0 || arms == 0 || candidates == 0)
        throw std::invalid_argument("learning_rate: n, K and A must be positive");
    return std::sqrt(std::log(static_cast<double>(candidates)) /
                     (static_cast<double>(n) * static_cast<double>(arms)));
}

void belief_update(std::vector<double>& pi, std::size_t alg, double reward, double eta) {
    if (alg >= pi.size()) throw std::invalid_argument("belief_update: algorithm out of range");
    if (!(pi[alg] > 0.0)) throw std::domain_error("belief_update: zero belief cannot be unbiased");
    const double unbiased = reward / pi[alg];
    pi[alg] *= std::exp(eta * unbiased);
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& p : pi) p /= total;
}

std::size_t commit(std::span<const double> pi) { return select_arm(pi); }

std::size_t arm_sel(CandidateAlg alg, const ArmStats& stats, std::uint64_t n,
                    std::optional<std::size_t> prev_arm, BinTable& table, Mt19937& rng,
                    double alpha) {
    switch (alg) {
        case CandidateAlg::Ucb: return select_arm(qf_ucb(stats, n, alpha, stats.size()));
        case CandidateAlg::SbtsEssr: return select_arm(qf_sbts_essr(stats, table, prev_arm, rng));
    }
    throw std::invalid_argument("arm_sel: unknown algorithm");
}

std::vector<PolicyConfig> AggregatorConfig::default_candidates() {
    PolicyConfig ucb;
    ucb.kind = PolicyKind::Ucb;
    PolicyConfig ts;
    ts.kind = PolicyKind::SbtsEssr;
    return {ucb, ts};
}

std::string AggregatorConfig::label() const {
    std::string s = mode == AggregatorMode::RiMab ? "rimab" : "velcro-approx";
    s += "[";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i) s += ",";
        s += candidates[i].label();
    }
    return s + "]";
}

void AggregatorConfig::validate(std::uint64_t horizon) const {
    if (candidates.size() < 2) throw std::invalid_argument("aggregator needs at least 2 candidates");
    if (candidates.size() > 255) throw std::invalid_argument("aggregator supports at most 255 candidates");
    for (const auto& c : candidates) c.validate();
    if (mode == AggregatorMode::RiMab) {
        if (learning_slots < 1) throw std::invalid_argument("learning phase needs at least one slot");
        if (learning_slots >= horizon)
            throw std::invalid_argument("learning phase must be shorter than the horizon");
    }
}

namespace {

struct SlotRecorder {
    const Environment& env;
    RegretTrace& trace;
    double cumulative = 0.0;
    double rewards = 0.0;

    void play(std::size_t arm, double reward) {
        cumulative += env.optimal_mean() - env.arm(arm).mean;
        rewards += reward;
        trace.cumulative_regret.push_back(cumulative);
        trace.pulls[arm] += 1;
    }
};

}  // namespace

RegretTrace rimab_run(const AggregatorConfig& config, const Environment& env,
                      std::uint64_t horizon, RewardStreams& rewards, Mt19937& rng,
                      bool record_counters) {
    config.validate(horizon);
    const std::size_t arms = env.size();
    const std::size_t count = config.candidates.size();

    std::vector<Policy> candidates;
    candidates.reserve(count);
    for (const auto& c : config.candidates) {
        candidates.emplace_back(c, arms, Policy::Role::Candidate);
        candidates.back().count_sort_comparisons(record_counters);
    }

    RegretTrace trace;
    trace.means = env.means();
    trace.pulls.assign(arms, 0);
    trace.cumulative_regret.reserve(horizon);
    trace.active_algorithm.reserve(horizon);
    if (record_counters) {
        trace.draws_per_slot.reserve(horizon);
        trace.comparisons_per_slot.reserve(horizon);
    }

    ArmStats stats(arms);
    std::vector<double> pi(count, 1.0 / static_cast<double>(count));
    EpochState epoch;
    std::optional<std::size_t> committed;
    SlotRecorder recorder{env, trace};

    auto totals = [&] {
        PolicyCounters sum;
        for (const auto& p : candidates) {
            sum.draws += p.counters().draws;
            sum.retries += p.counters().retries;
            sum.comparisons += p.counters().comparisons;
        }
        return sum;
    };

    for (std::uint64_t n = 1; n <= horizon; ++n) {
        const PolicyCounters before = record_counters ? totals() : PolicyCounters{};
        std::size_t alg = 0;
        std::size_t arm = 0;
        double reward = 0.0;

        if (config.mode == AggregatorMode::VelcroApprox) {
            std::vector<std::size_t> choices(count);
            for (std::size_t a = 0; a < count; ++a) choices[a] = candidates[a].step(stats, n, rng);
            // Sample the followed candidate from the belief.
            const double u = rng.next_unit();
            double acc = 0.0;
            alg = count - 1;
            for (std::size_t a = 0; a < count; ++a) {
                acc += pi[a];
                if (u < acc) {
                    alg = a;
                    break;
                }
            }
            arm = choices[alg];
            for (auto& c : candidates) c.observe(arm, n);
            reward = rewards.pull(arm);
            belief_update(pi, alg, reward, learning_rate(n, arms, count));
        } else if (n <= config.learning_slots) {
            alg = epoch.alg;
            arm = candidates[alg].step(stats, n, rng);
            reward = rewards.pull(arm);
            belief_update(pi, alg, reward, learning_rate(n, arms, count));
            trace.belief.push_back(pi);
            epoch = epoch_advance(epoch, count);
        } else {
            if (!committed) committed = commit(pi);
            alg = *committed;
            arm = candidates[alg].step(stats, n, rng);
            reward = rewards.pull(arm);
        }

        recorder.play(arm, reward);
        trace.active_algorithm.push_back(static_cast<std::uint8_t>(alg));
        update_stats(stats, arm, reward);
        stats.X[arm] = candidates[alg].precision().store(stats.X[arm]);

        if (record_counters) {
            const PolicyCounters after = totals();
            trace.draws_per_slot.push_back(static_cast<std::uint32_t>(after.draws - before.draws));
            trace.comparisons_per_slot.push_back(
                static_cast<std::uint32_t>(after.comparisons - before.comparisons));
        }
    }

    trace.counters = totals();
    trace.committed = config.mode == AggregatorMode::RiMab ? committed : std::optional<std::size_t>(commit(pi));
    trace.optimal_pulls = 0;
    for (std::size_t k = 0; k < arms; ++k)
        if (env.arm(k).mean == env.optimal_mean()) trace.optimal_pulls += trace.pulls[k];
    trace.realized_regret =
        static_cast<double>(horizon) * env.optimal_mean() - recorder.rewards;
    return trace;
}

}  // namespace mabsoc
