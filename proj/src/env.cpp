#include "mabsoc/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mabsoc {

ArmDistribution ArmDistribution::bernoulli(double mean) {
    return ArmDistribution{RewardKind::Bernoulli, mean, std::nullopt};
}

ArmDistribution ArmDistribution::gaussian(double mean, double sigma) {
    return ArmDistribution{RewardKind::GaussianClipped, mean, sigma};
}

Environment::Environment(std::vector<ArmDistribution> arms) : arms_(std::move(arms)) {
    if (arms_.size() < 2) throw std::invalid_argument("environment needs at least 2 arms");
    for (const auto& a : arms_) {
        if (!(a.mean >= 0.0 && a.mean <= 1.0))
            throw std::invalid_argument("arm mean must lie in [0,1]");
        const bool gaussian = a.kind == RewardKind::GaussianClipped;
        if (gaussian != a.sigma.has_value())
            throw std::invalid_argument("sigma must be set exactly for Gaussian arms");
        if (gaussian && !(*a.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    }
    optimal_arm_ = 0;
    for (std::size_t k = 1; k < arms_.size(); ++k)
        if (arms_[k].mean > arms_[optimal_arm_].mean) optimal_arm_ = k;
    optimal_mean_ = arms_[optimal_arm_].mean;
}

Environment Environment::from_means(std::span<const double> means, RewardKind kind, double sigma) {
    std::vector<ArmDistribution> arms;
    arms.reserve(means.size());
    for (double m : means)
        arms.push_back(kind == RewardKind::Bernoulli ? ArmDistribution::bernoulli(m)
                                                     : ArmDistribution::gaussian(m, sigma));
    return Environment(std::move(arms));
}

std::vector<double> Environment::means() const {
    std::vector<double> out;
    out.reserve(arms_.size());
    for (const auto& a : arms_) out.push_back(a.mean);
    return out;
}

double standard_normal(Mt19937& rng) {
    const double u1 = 1.0 - rng.next_unit();  // (0, 1]
    const double u2 = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_reward(const Environment& env, std::size_t arm, Mt19937& rng) {
    if (arm >= env.size()) throw std::invalid_argument("sample_reward: arm index out of range");
    const ArmDistribution& a = env.arm(arm);
    if (a.kind == RewardKind::Bernoulli) return rng.next_unit() <= a.mean ? 1.0 : 0.0;
    return std::clamp(a.mean + *a.sigma * standard_normal(rng), 0.0, 1.0);
}

std::vector<double> random_means(std::size_t k, double min_gap, Mt19937& rng) {
    if (k < 2) throw std::invalid_argument("random_means: need at least 2 arms");
    if (min_gap < 0.0 || static_cast<double>(k) * min_gap > 1.0)
        throw std::invalid_argument("random_means: K * min_gap must not exceed 1");

    constexpr int kMaxAttempts = 1'000'000;
    std::vector<double> means(k);
    std::vector<double> sorted(k);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (auto& m : means) m = rng.next_unit();
        sorted = means;
        std::sort(sorted.begin(), sorted.end());
        bool ok = true;
        for (std::size_t i = 1; i < k && ok; ++i)
            ok = sorted[i] - sorted[i - 1] >= min_gap && sorted[i] != sorted[i - 1];
        if (ok) return means;
    }
    throw std::runtime_error("random_means: rejection sampling exhausted its retry cap");
}

Environment random_instance(std::size_t k, double min_gap, Mt19937& rng, RewardKind kind,
                            double sigma) {
    const auto means = random_means(k, min_gap, rng);
    return Environment::from_means(means, kind, sigma);
}

double pseudo_regret(std::span<const std::uint64_t> counts, const Environment& env,
                     std::uint64_t n) {
    if (counts.size() != env.size())
        throw std::invalid_argument("pseudo_regret: one count per arm required");
    std::uint64_t total = 0;
    double regret = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        total += counts[k];
        regret += static_cast<double>(counts[k]) * (env.optimal_mean() - env.arm(k).mean);
    }
    if (total != n) throw std::invalid_argument("pseudo_regret: counts do not sum to N");
    return regret;
}

std::vector<double> preset_means(std::string_view name) {
    if (name == "mu1") return {0.1, 0.3, 0.5, 0.7};
    if (name == "mu2") return {0.54, 0.53, 0.52, 0.51};
    if (name == "mu3") return {0.1, 0.5, 0.8, 0.7, 0.4, 0.2, 0.6, 0.3};
    if (name == "mu4") return {0.21, 0.22, 0.26, 0.28, 0.24, 0.25, 0.27, 0.23};
    throw std::invalid_argument("unknown preset: " + std::string(name));
}

bool is_preset(std::string_view name) {
    return name == "mu1" || name == "mu2" || name == "mu3" || name == "mu4";
}

RewardStreams::RewardStreams(const Environment& env, std::uint32_t base_seed,
                             std::uint64_t experiment)
    : env_(&env) {
    streams_.reserve(env.size());
    for (std::size_t k = 0; k < env.size(); ++k)
        streams_.emplace_back(derive_seed(base_seed, experiment, kRewardStreamBase + k));
}

double RewardStreams::pull(std::size_t arm) {
    return sample_reward(*env_, arm, streams_.at(arm));
}

}  // namespace mabsoc
