#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mabsoc/numeric.hpp"
#include "mabsoc/rng.hpp"

namespace mabsoc {

// Cumulative reward X and pull count T per arm. Both start at 1 (uniform
// prior), so T[k] - 1 is the number of real pulls of arm k.
struct ArmStats {
    explicit ArmStats(std::size_t arms) : X(arms, 1.0), T(arms, 1) {}

    std::size_t size() const noexcept { return T.size(); }
    std::vector<std::uint64_t> pulls() const;

    std::vector<double> X;
    std::vector<std::uint64_t> T;
};

// X[arm] += reward, T[arm] += 1. Reward must lie in [0,1].
void update_stats(ArmStats& stats, std::size_t arm, double reward);

// L x K matrix of binned uniform-sample counts, one column per arm.
// Default-constructed tables (or ones built with only a bin count) are
// unfilled until reset().
class BinTable {
public:
    BinTable() = default;
    explicit BinTable(std::size_t bins) : bins_(bins) {}
    BinTable(std::size_t bins, std::size_t arms, std::uint64_t fill = 1);

    void reset(std::size_t arms, std::uint64_t fill = 1);

    bool filled() const noexcept { return arms_ > 0; }
    std::size_t bins() const noexcept { return bins_; }
    std::size_t arms() const noexcept { return arms_; }

    std::uint64_t& at(std::size_t bin, std::size_t arm) { return cells_[arm * bins_ + bin]; }
    std::uint64_t at(std::size_t bin, std::size_t arm) const { return cells_[arm * bins_ + bin]; }
    std::span<std::uint64_t> column(std::size_t arm) {
        return {cells_.data() + arm * bins_, bins_};
    }
    std::span<const std::uint64_t> column(std::size_t arm) const {
        return {cells_.data() + arm * bins_, bins_};
    }
    std::uint64_t column_sum(std::size_t arm) const;

private:
    std::size_t bins_ = 0;
    std::size_t arms_ = 0;
    std::vector<std::uint64_t> cells_;  // column-major
};

// Lowest index attaining the maximum. NaN entries throw std::domain_error.
std::size_t select_arm(std::span<const double> q);

// X/T + sqrt(alpha * ln(n + log_shift) / T). log_shift is 0 for standalone
// UCB and K when UCB runs as an aggregator candidate.
std::vector<double> qf_ucb(const ArmStats& stats, std::uint64_t n, double alpha,
                           std::uint64_t log_shift = 0);

inline constexpr double kKlClamp = 1e-12;
inline constexpr int kKlBisectionSteps = 32;

// Bernoulli KL divergence d(p, q), q clamped to [1e-12, 1 - 1e-12].
double kl_divergence(double p, double q);
// Largest q in [p, 1) with d(p, q) <= budget, by fixed-step bisection.
double klucb_index(double p, double budget);
// Exploration budget (ln n + c ln ln n) / T, with ln ln n taken as 0 for n < 3.
double klucb_budget(std::uint64_t n, std::uint64_t pulls, double c);
std::vector<double> qf_klucb(const ArmStats& stats, std::uint64_t n, double c);

// The x-th smallest of `uniforms` after a full sort (x is 1-based). Sorts in
// place and adds the sort's comparison count to *comparisons when given.
double order_statistic(std::span<double> uniforms, std::uint64_t x,
                       std::uint64_t* comparisons = nullptr);

// Beta(X, T-X+1) sample per arm: draw T uniforms, sort, take the X-th.
// Requires integer X in [1, T].
std::vector<double> qf_bts_reference(const ArmStats& stats, Mt19937& rng);
// Same construction; with a counter it sorts by comparisons and adds their
// number, otherwise it takes the radix path.
std::vector<double> qf_sbts(const ArmStats& stats, Mt19937& rng,
                            std::uint64_t* comparisons = nullptr);

// 0-based bin holding p: floor(p * L), with p >= 1 clamped into the last bin.
std::size_t bin_index(double p, std::size_t bins);
// (2l + 1) / (2L) for 0-based bin l.
double bin_midpoint(std::size_t bin, std::size_t bins);
// Smallest 0-based bin whose prefix sum reaches x. One comparison per bin
// scanned is added to *comparisons.
std::size_t quantile_bin(std::span<const std::uint64_t> column, double x,
                         std::uint64_t* comparisons = nullptr);

// Histogram of uniforms over L equal bins.
std::vector<std::uint64_t> bin_counts(std::span<const double> uniforms, std::size_t bins);
// Binned QF for one arm from an explicit uniform sample.
double binned_qf(std::span<const double> uniforms, double x, std::size_t bins);

// Fresh L-bin histogram of T[k] uniforms per arm, QF at the X[k]-th sample's bin midpoint.
std::vector<double> qf_sbts_es(const ArmStats& stats, std::size_t bins, Mt19937& rng,
                               std::uint64_t* comparisons = nullptr);

// Incremental single-draw variant over a persistent bin table.
//
// An unfilled table is filled with ones and the QFs are read straight off it
// (the first-slot path, no draws). Otherwise: one uniform is binned into the
// column of prev_arm (when given), then every arm k removes one sample from a
// uniformly chosen non-empty bin, adds one freshly drawn sample, and reads its
// QF at the bin where the column prefix sum reaches X[k].
//
// On entry each column must hold T[k] + L - 1 samples, except prev_arm's,
// which is one short. Violations throw std::logic_error.
std::vector<double> qf_sbts_essr(const ArmStats& stats, BinTable& table,
                                 std::optional<std::size_t> prev_arm, Mt19937& rng,
                                 std::uint64_t* comparisons = nullptr);

// Bring every column of `table` up to T[k] + L - 1 samples with fresh draws.
// Fills an unfilled table with ones first.
void top_up(BinTable& table, const ArmStats& stats, Mt19937& rng);

enum class PolicyKind { Ucb, KlUcb, BtsRef, Sbts, SbtsEs, SbtsEssr };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);
bool is_binned(PolicyKind kind);
bool is_thompson(PolicyKind kind);

inline constexpr double kDefaultAlpha = 2.0;
inline constexpr double kDefaultKlucbC = 0.0;
inline constexpr std::size_t kDefaultBins = 20;

struct PolicyConfig {
    PolicyKind kind = PolicyKind::SbtsEssr;
    double alpha = kDefaultAlpha;
    double klucb_c = kDefaultKlucbC;
    std::size_t bins = kDefaultBins;
    Precision precision;

    // "sbts-es", or "sbts-es:10" to override the bin count.
    static PolicyConfig parse(std::string_view token, const PolicyConfig& defaults);
    static PolicyConfig parse(std::string_view token);

    // Identifies the policy's random stream; independent of precision so a
    // word-length sweep replays the same draws.
    std::string stream_label() const;
    // stream_label() plus a precision suffix when not f64.
    std::string label() const;

    void validate() const;
};

struct PolicyCounters {
    std::uint64_t draws = 0;
    std::uint64_t retries = 0;
    std::uint64_t comparisons = 0;
};

// One arm-selection policy with its private state.
class Policy {
public:
    // Standalone policies run UCB/KL-UCB's initial round-robin over the arms
    // and use ln(n) in UCB. Candidates (inside an aggregator) skip the
    // round-robin, use ln(n + K) in UCB, and resynchronise SBTS-ESSR's bin
    // table whenever they were inactive for some slots.
    enum class Role { Standalone, Candidate };

    Policy(PolicyConfig config, std::size_t arms, Role role = Role::Standalone);

    // QF vector for slot n (1-based) after precision is applied.
    std::vector<double> quality(const ArmStats& stats, std::uint64_t n, Mt19937& rng);
    // Arm to play at slot n.
    std::size_t step(const ArmStats& stats, std::uint64_t n, Mt19937& rng);
    // Record that `arm` was played at slot n when it differs from what step()
    // returned (an aggregator may play another candidate's choice).
    void observe(std::size_t arm, std::uint64_t n);
    // SBTS sorts with a counting comparison sort only when asked to; the
    // default radix path returns the same values faster.
    void count_sort_comparisons(bool on) noexcept { count_sort_comparisons_ = on; }

    const PolicyConfig& config() const noexcept { return config_; }
    const Precision& precision() const noexcept { return precision_; }
    const PolicyCounters& counters() const noexcept { return counters_; }
    const BinTable& table() const noexcept { return table_; }
    Role role() const noexcept { return role_; }

private:
    std::vector<double> raw_quality(const ArmStats& stats, std::uint64_t n, Mt19937& rng,
                                    std::uint64_t& comparisons);
    std::vector<double> essr_quality(const ArmStats& stats, std::uint64_t n, Mt19937& rng,
                                     std::uint64_t& comparisons);

    PolicyConfig config_;
    Precision precision_;
    std::size_t arms_;
    Role role_;
    BinTable table_;
    std::optional<std::size_t> last_arm_;
    std::uint64_t last_slot_ = 0;
    PolicyCounters counters_;
    bool count_sort_comparisons_ = false;
};

}  // namespace mabsoc
