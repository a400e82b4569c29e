#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mabsoc/rng.hpp"

namespace mabsoc {

enum class RewardKind { Bernoulli, GaussianClipped };

inline constexpr double kDefaultSigma = 0.05;

// Stream ids fed to derive_seed().
inline constexpr std::uint64_t kEnvironmentStream = 1;
inline constexpr std::uint64_t kRewardStreamBase = 0x1000;

struct ArmDistribution {
    RewardKind kind = RewardKind::Bernoulli;
    double mean = 0.0;
    std::optional<double> sigma;  // GaussianClipped only

    static ArmDistribution bernoulli(double mean);
    static ArmDistribution gaussian(double mean, double sigma = kDefaultSigma);
};

// Immutable set of K >= 2 arms.
class Environment {
public:
    explicit Environment(std::vector<ArmDistribution> arms);

    // Same kind (and sigma) for every arm.
    static Environment from_means(std::span<const double> means, RewardKind kind,
                                  double sigma = kDefaultSigma);

    std::size_t size() const noexcept { return arms_.size(); }
    const ArmDistribution& arm(std::size_t k) const { return arms_.at(k); }
    const std::vector<ArmDistribution>& arms() const noexcept { return arms_; }
    std::vector<double> means() const;

    double optimal_mean() const noexcept { return optimal_mean_; }
    // Lowest index attaining optimal_mean().
    std::size_t optimal_arm() const noexcept { return optimal_arm_; }

private:
    std::vector<ArmDistribution> arms_;
    double optimal_mean_ = 0.0;
    std::size_t optimal_arm_ = 0;
};

// Standard normal from two uniforms (Box-Muller, cosine branch). Deterministic
// across platforms, unlike std::normal_distribution.
double standard_normal(Mt19937& rng);

// Reward in [0,1] for a 0-based arm index.
double sample_reward(const Environment& env, std::size_t arm, Mt19937& rng);

// K distinct means in [0,1] with pairwise gaps >= min_gap, by rejection.
std::vector<double> random_means(std::size_t k, double min_gap, Mt19937& rng);
Environment random_instance(std::size_t k, double min_gap, Mt19937& rng,
                            RewardKind kind = RewardKind::Bernoulli,
                            double sigma = kDefaultSigma);

// N*mu_star - sum_k T_k*mu_k, where counts are real pulls summing to n.
double pseudo_regret(std::span<const std::uint64_t> counts, const Environment& env,
                     std::uint64_t n);

// Named arm sets mu1..mu4.
std::vector<double> preset_means(std::string_view name);
bool is_preset(std::string_view name);

// One Prng per arm, so the k-th reward of an arm is the same regardless of
// which policy asked for it or when.
class RewardStreams {
public:
    RewardStreams(const Environment& env, std::uint32_t base_seed, std::uint64_t experiment);

    double pull(std::size_t arm);

private:
    const Environment* env_;
    std::vector<Mt19937> streams_;
};

}  // namespace mabsoc
