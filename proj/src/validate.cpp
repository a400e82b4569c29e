#include "mabsoc/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "mabsoc/env.hpp"
#include "mabsoc/harness.hpp"
#include "mabsoc/numeric.hpp"
#include "mabsoc/policies.hpp"
#include "mabsoc/rimab.hpp"

namespace mabsoc {

double beta_cdf_integer(std::uint64_t a, std::uint64_t b, double x) {
    if (a < 1 || b < 1) throw std::invalid_argument("beta_cdf_integer: parameters must be >= 1");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const std::uint64_t m = a + b - 1;
    double total = 0.0;
    for (std::uint64_t j = a; j <= m; ++j) {
        const double log_term = std::lgamma(static_cast<double>(m) + 1.0) -
                                std::lgamma(static_cast<double>(j) + 1.0) -
                                std::lgamma(static_cast<double>(m - j) + 1.0) +
                                static_cast<double>(j) * std::log(x) +
                                static_cast<double>(m - j) * std::log1p(-x);
        total += std::exp(log_term);
    }
    return std::min(total, 1.0);
}

double ks_distance_beta(std::span<const double> sorted, std::uint64_t a, std::uint64_t b) {
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = beta_cdf_integer(a, b, sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

ArmStats frozen_stats(std::uint64_t x, std::uint64_t t) {
    ArmStats s(1);
    s.X[0] = static_cast<double>(x);
    s.T[0] = t;
    return s;
}

void distribution_checks(std::uint32_t seed, std::vector<CheckResult>& out) {
    constexpr int kDraws = 100000;
    constexpr std::size_t kBins = 20;
    const std::pair<std::uint64_t, std::uint64_t> cases[] = {{1, 1}, {3, 8}, {7, 10}};
    for (auto [x, t] : cases) {
        const ArmStats stats = frozen_stats(x, t);
        const std::uint64_t a = x;
        const std::uint64_t b = t - x + 1;

        Mt19937 rng(derive_seed(seed, x * 100 + t, 11));
        std::vector<double> draws(kDraws);
        for (auto& d : draws) d = qf_sbts(stats, rng)[0];
        std::sort(draws.begin(), draws.end());
        const double ks = ks_distance_beta(draws, a, b);
        out.push_back({"sbts-vs-beta(X=" + std::to_string(x) + ",T=" + std::to_string(t) + ")",
                       ks < 0.01, fmt("KS distance %.5f (limit 0.01)", ks)});

        Mt19937 rng_es(derive_seed(seed, x * 100 + t, 12));
        std::vector<double> freq(kBins, 0.0);
        for (int i = 0; i < kDraws; ++i) {
            const double q = qf_sbts_es(stats, kBins, rng_es)[0];
            freq[bin_index(q, kBins)] += 1.0 / kDraws;
        }
        double worst = 0.0;
        for (std::size_t l = 0; l < kBins; ++l) {
            const double mass = beta_cdf_integer(a, b, static_cast<double>(l + 1) / kBins) -
                                beta_cdf_integer(a, b, static_cast<double>(l) / kBins);
            worst = std::max(worst, std::abs(freq[l] - mass));
        }
        out.push_back({"sbts-es-bins-vs-beta(X=" + std::to_string(x) + ",T=" + std::to_string(t) + ")",
                       worst < 0.01, fmt("max bin error %.5f (limit 0.01)", worst)});
    }
}

void complexity_checks(std::uint32_t seed, std::vector<CheckResult>& out) {
    ExperimentConfig cfg;
    cfg.env = EnvSpec::random(6, 0.0);
    cfg.horizon = 2000;
    cfg.experiments = 1;
    cfg.base_seed = seed;
    cfg.record_counters = true;

    PolicyConfig essr;
    essr.kind = PolicyKind::SbtsEssr;
    cfg.algorithm = essr;
    const RegretTrace t_essr = run_experiment(cfg, 0);
    bool essr_ok = t_essr.draws_per_slot.at(0) == 0;
    for (std::size_t n = 1; n < t_essr.draws_per_slot.size(); ++n)
        essr_ok = essr_ok && t_essr.draws_per_slot[n] == 2 * 6 + 1;
    out.push_back({"sbts-essr-draws-constant", essr_ok, "draws per slot == 2K+1 for every slot n > 1"});

    PolicyConfig sbts;
    sbts.kind = PolicyKind::Sbts;
    cfg.algorithm = sbts;
    const RegretTrace t_sbts = run_experiment(cfg, 0);
    // Before slot n the counts sum to (n - 1) real pulls plus the K priors.
    bool sbts_ok = true;
    for (std::size_t i = 0; i < t_sbts.draws_per_slot.size(); ++i)
        sbts_ok = sbts_ok && t_sbts.draws_per_slot[i] == i + 6;
    out.push_back({"sbts-draws-linear", sbts_ok, "draws at slot n == sum_k T(k,n) == n - 1 + K"});
}

void invariant_checks(std::uint32_t seed, std::vector<CheckResult>& out) {
    {
        Mt19937 env_rng(derive_seed(seed, 0, 21));
        const Environment env = random_instance(4, 0.0, env_rng);
        RewardStreams rewards(env, seed, 0);
        Mt19937 rng(derive_seed(seed, 0, 22));
        ArmStats stats(env.size());
        BinTable table(20);
        std::optional<std::size_t> prev;
        bool ok = true;
        for (int n = 1; n <= 100000 && ok; ++n) {
            const auto q = qf_sbts_essr(stats, table, prev, rng);
            for (std::size_t k = 0; k < env.size(); ++k)
                ok = ok && table.column_sum(k) == stats.T[k] + table.bins() - 1;
            const std::size_t arm = select_arm(q);
            update_stats(stats, arm, rewards.pull(arm));
            prev = arm;
        }
        out.push_back({"bin-table-column-sums", ok, "sum_l beta(l,k) == T(k) + L - 1 over 1e5 slots"});
    }
    {
        ExperimentConfig cfg;
        cfg.env = EnvSpec::from_preset("mu3", RewardKind::GaussianClipped);
        cfg.horizon = 2000;
        cfg.experiments = 1;
        cfg.base_seed = seed;
        cfg.algorithm = AggregatorConfig{};
        const RegretTrace t = run_experiment(cfg, 0);
        double worst = 0.0;
        for (const auto& pi : t.belief)
            worst = std::max(worst, std::abs(std::accumulate(pi.begin(), pi.end(), 0.0) - 1.0));
        out.push_back({"belief-normalised", worst < 1e-12 && t.belief.size() == kDefaultLearningSlots,
                       fmt("max |sum pi - 1| = %.3g", worst)});
    }
    {
        // Closed form: block b lasts 2^(1 + b / A) slots and runs candidate b % A.
        constexpr std::size_t kCandidates = 2;
        EpochState state;
        std::size_t block = 0;
        std::uint64_t left = 2;
        bool ok = true;
        for (int n = 1; n <= 10000 && ok; ++n) {
            ok = state.alg == block % kCandidates;
            state = epoch_advance(state, kCandidates);
            if (--left == 0) {
                ++block;
                left = std::uint64_t{1} << (1 + block / kCandidates);
            }
        }
        out.push_back({"epoch-schedule", ok, "matches doubling-block closed form for 1e4 slots"});
    }
    {
        Mt19937 rng(derive_seed(seed, 0, 23));
        const FixedFormat formats[] = {{27, 26}, {11, 10}, {6, 5}, {11, 7}};
        bool ok = true;
        for (const auto& f : formats) {
            double prev_x = -1.0;
            double prev_q = quantize(prev_x, f);
            std::vector<double> xs(100000);
            for (auto& x : xs) x = -0.5 + 3.0 * rng.next_unit();
            std::sort(xs.begin(), xs.end());
            for (double x : xs) {
                const double q = quantize(x, f);
                ok = ok && quantize(q, f) == q && q >= prev_q;
                prev_q = q;
            }
        }
        out.push_back({"quantize-idempotent-monotone", ok, "1e5 inputs per format"});
    }
}

void anchor_checks(std::vector<CheckResult>& out) {
    ArmStats ucb(1);
    ucb.X[0] = 2;
    ucb.T[0] = 4;
    const double q = qf_ucb(ucb, 10, 2.0)[0];
    out.push_back({"anchor-ucb", std::abs(q - 1.5730) <= 1e-4, fmt("QF = %.6f", q)});

    std::vector<double> pi{0.5, 0.5};
    belief_update(pi, 0, 1.0, learning_rate(1, 4, 2));
    out.push_back({"anchor-belief", std::abs(pi[0] - 0.697) <= 1e-3 && std::abs(pi[1] - 0.303) <= 1e-3,
                   fmt("pi = (%.4f, %.4f)", pi[0], pi[1])});

    const double a = binned_qf(std::vector<double>{0.342, 0.012, 0.753, 0.553}, 2, 10);
    const double b = binned_qf(std::vector<double>{0.342, 0.012, 0.083, 0.553}, 2, 10);
    out.push_back({"anchor-sbts-es", a == 0.35 && b == 0.05, fmt("QFs %.4f, %.4f", a, b)});

    const double d = kl_divergence(0.5, 0.25);
    out.push_back({"anchor-kl", std::abs(d - 0.1438) <= 1e-4, fmt("d = %.6f", d)});
}

}  // namespace

std::vector<CheckResult> run_validation_suite(std::uint32_t seed) {
    std::vector<CheckResult> out;
    distribution_checks(seed, out);
    complexity_checks(seed, out);
    invariant_checks(seed, out);
    anchor_checks(out);
    return out;
}

}  // namespace mabsoc
