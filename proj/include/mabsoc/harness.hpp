#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mabsoc/env.hpp"
#include "mabsoc/policies.hpp"
#include "mabsoc/rimab.hpp"
#include "mabsoc/trace.hpp"

namespace mabsoc {

// Where an experiment's arm means come from.
struct EnvSpec {
    enum class Source { Preset, Random, Explicit };

    Source source = Source::Preset;
    std::string preset = "mu1";
    std::size_t arms = 0;        // Random only
    double min_gap = 0.0;        // Random only
    std::vector<double> means;   // Explicit only
    RewardKind reward = RewardKind::Bernoulli;
    double sigma = kDefaultSigma;

    // env: "mu1".."mu4", "random:K:gap" or "means:0.1,0.5,...";
    // reward: "bernoulli" or "gaussian:sigma".
    static EnvSpec parse(std::string_view env, std::string_view reward = "bernoulli");
    static EnvSpec random(std::size_t arms, double min_gap, RewardKind reward = RewardKind::Bernoulli,
                          double sigma = kDefaultSigma);
    static EnvSpec from_preset(std::string_view name, RewardKind reward = RewardKind::Bernoulli,
                               double sigma = kDefaultSigma);

    std::size_t arm_count() const;
    std::string env_string() const;
    std::string reward_string() const;

    // Fixed presets ignore the seed; random instances are redrawn per
    // experiment from (base_seed, experiment).
    Environment build(std::uint32_t base_seed, std::uint64_t experiment) const;
};

using Algorithm = std::variant<PolicyConfig, AggregatorConfig>;

std::string algorithm_label(const Algorithm& algorithm);
// Seed stream of the algorithm's internal randomness.
std::string algorithm_stream_label(const Algorithm& algorithm);

struct ExperimentConfig {
    EnvSpec env;
    Algorithm algorithm = PolicyConfig{};
    std::uint64_t horizon = 10000;
    std::size_t experiments = 100;
    std::uint32_t base_seed = 42;
    unsigned threads = 0;          // 0: one per hardware thread
    bool record_counters = false;  // keep per-slot draw/comparison counts

    void validate() const;
};

// One seeded experiment; identical (config, index) gives identical traces.
RegretTrace run_experiment(const ExperimentConfig& config, std::size_t index);

// Single standalone policy over a given environment and reward streams.
RegretTrace run_policy(const PolicyConfig& policy, const Environment& env, std::uint64_t horizon,
                       RewardStreams& rewards, Mt19937& rng, bool record_counters = false);

// Type-7 (linear interpolation) quantile of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

struct BoxplotStats {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double lower_whisker = 0.0;  // most extreme samples within 1.5 IQR of the box
    double upper_whisker = 0.0;
    std::vector<double> outliers;
};

BoxplotStats boxplot_stats(std::span<const double> values);

struct BatchSummary {
    std::vector<double> mean_regret;  // per slot
    std::vector<double> std_regret;   // per slot, sample std (0 for one experiment)
    std::vector<double> final_regrets;
    std::vector<std::uint64_t> optimal_pulls;
    double mean_final_regret = 0.0;
    double std_final_regret = 0.0;
    double mean_optimal_pulls = 0.0;
    double draws_per_slot = 0.0;        // averaged over experiments and slots
    double comparisons_per_slot = 0.0;
    std::vector<std::size_t> committed_counts;  // per candidate, aggregators only
    BoxplotStats boxplot;
};

BatchSummary summarize(std::span<const RegretTrace> traces, std::uint64_t horizon);

struct BatchResult {
    ExperimentConfig config;
    BatchSummary summary;
    std::vector<RegretTrace> traces;
};

// Runs every experiment (in parallel when threads allow) and reduces in index
// order, so results do not depend on the thread count.
BatchResult run_batch(const ExperimentConfig& config);

// "slot,mean_regret,std_regret" rows.
void write_curve_csv(const std::filesystem::path& path, const BatchSummary& summary);
nlohmann::ordered_json batch_to_json(const BatchResult& result, bool include_curves);

}  // namespace mabsoc
