#include "mabsoc/policies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mabsoc {

std::vector<std::uint64_t> ArmStats::pulls() const {
    std::vector<std::uint64_t> out(T.size());
    for (std::size_t k = 0; k < T.size(); ++k) out[k] = T[k] - 1;
    return out;
}

void update_stats(ArmStats& stats, std::size_t arm, double reward) {
    if (arm >= stats.size()) throw std::invalid_argument("update_stats: arm index out of range");
    if (!(reward >= 0.0 && reward <= 1.0))
        throw std::invalid_argument("update_stats: reward must lie in [0,1]");
    stats.X[arm] += reward;
    stats.T[arm] += 1;
}

BinTable::BinTable(std::size_t bins, std::size_t arms, std::uint64_t fill) : bins_(bins) {
    reset(arms, fill);
}

void BinTable::reset(std::size_t arms, std::uint64_t fill) {
    if (bins_ == 0) throw std::invalid_argument("bin table: need at least one bin");
    arms_ = arms;
    cells_.assign(bins_ * arms_, fill);
}

std::uint64_t BinTable::column_sum(std::size_t arm) const {
    std::uint64_t s = 0;
    for (auto c : column(arm)) s += c;
    return s;
}

std::size_t select_arm(std::span<const double> q) {
    if (q.empty()) throw std::invalid_argument("select_arm: empty QF vector");
    std::size_t best = 0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (std::isnan(q[k])) throw std::domain_error("select_arm: NaN quality factor");
        if (q[k] > q[best]) best = k;
    }
    return best;
}

std::vector<double> qf_ucb(const ArmStats& stats, std::uint64_t n, double alpha,
                           std::uint64_t log_shift) {
    if (n == 0) throw std::invalid_argument("qf_ucb: slots are 1-based");
    const double log_term = alpha * std::log(static_cast<double>(n + log_shift));
    std::vector<double> q(stats.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        const double t = static_cast<double>(stats.T[k]);
        q[k] = stats.X[k] / t + std::sqrt(log_term / t);
    }
    return q;
}

double kl_divergence(double p, double q) {
    q = std::clamp(q, kKlClamp, 1.0 - kKlClamp);
    double d = 0.0;
    if (p > 0.0) d += p * std::log(p / q);
    if (p < 1.0) d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    return d;
}

double klucb_index(double p, double budget) {
    p = std::clamp(p, 0.0, 1.0);
    if (!(budget > 0.0)) return p;
    double lo = p;
    double hi = 1.0;
    for (int i = 0; i < kKlBisectionSteps; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kl_divergence(p, mid) <= budget)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double klucb_budget(std::uint64_t n, std::uint64_t pulls, double c) {
    const double ln_n = std::log(static_cast<double>(n));
    const double ln_ln_n = n < 3 ? 0.0 : std::log(ln_n);
    return (ln_n + c * ln_ln_n) / static_cast<double>(pulls);
}

std::vector<double> qf_klucb(const ArmStats& stats, std::uint64_t n, double c) {
    if (n == 0) throw std::invalid_argument("qf_klucb: slots are 1-based");
    std::vector<double> q(stats.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        const double mean = stats.X[k] / static_cast<double>(stats.T[k]);
        q[k] = klucb_index(mean, klucb_budget(n, stats.T[k], c));
    }
    return q;
}

double order_statistic(std::span<double> uniforms, std::uint64_t x, std::uint64_t* comparisons) {
    if (x < 1 || x > uniforms.size())
        throw std::invalid_argument("order_statistic: rank outside the sample");
    if (comparisons) {
        std::uint64_t count = 0;
        std::sort(uniforms.begin(), uniforms.end(), [&count](double a, double b) {
            ++count;
            return a < b;
        });
        *comparisons += count;
    } else {
        std::sort(uniforms.begin(), uniforms.end());
    }
    return uniforms[x - 1];
}

namespace {

std::uint64_t integer_rank(double x, std::uint64_t t) {
    const double r = std::floor(x);
    if (r != x || x < 1.0 || x > static_cast<double>(t))
        throw std::invalid_argument("order-statistic QF needs integer X in [1, T]");
    return static_cast<std::uint64_t>(r);
}

// Full LSD radix sort on the 32-bit words behind next_unit(); same order as
// sorting the doubles, without the comparison cost.
void radix_sort(std::vector<std::uint32_t>& keys, std::vector<std::uint32_t>& buffer) {
    buffer.resize(keys.size());
    for (int shift = 0; shift < 32; shift += 8) {
        std::size_t count[257] = {};
        for (auto k : keys) ++count[((k >> shift) & 0xffu) + 1];
        for (int i = 0; i < 256; ++i) count[i + 1] += count[i];
        for (auto k : keys) buffer[count[(k >> shift) & 0xffu]++] = k;
        keys.swap(buffer);
    }
}

std::vector<double> order_statistic_qf(const ArmStats& stats, Mt19937& rng,
                                       std::uint64_t* comparisons) {
    constexpr double kWord = 4294967296.0;
    thread_local std::vector<double> scratch;
    thread_local std::vector<std::uint32_t> keys, buffer;
    std::vector<double> q(stats.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        const std::uint64_t rank = integer_rank(stats.X[k], stats.T[k]);
        if (comparisons) {
            scratch.resize(stats.T[k]);
            for (double& u : scratch) u = rng.next_unit();
            q[k] = order_statistic(scratch, rank, comparisons);
        } else {
            keys.resize(stats.T[k]);
            for (auto& w : keys) w = static_cast<std::uint32_t>(rng.next_unit() * kWord);
            radix_sort(keys, buffer);
            q[k] = keys[rank - 1] / kWord;
        }
    }
    return q;
}

}  // namespace

std::vector<double> qf_bts_reference(const ArmStats& stats, Mt19937& rng) {
    return order_statistic_qf(stats, rng, nullptr);
}

std::vector<double> qf_sbts(const ArmStats& stats, Mt19937& rng, std::uint64_t* comparisons) {
    return order_statistic_qf(stats, rng, comparisons);
}

std::size_t bin_index(double p, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("bin_index: need at least one bin");
    if (!(p >= 0.0)) throw std::invalid_argument("bin_index: p must be non-negative");
    const auto l = static_cast<std::size_t>(p * static_cast<double>(bins));
    return std::min(l, bins - 1);
}

double bin_midpoint(std::size_t bin, std::size_t bins) {
    return static_cast<double>(2 * bin + 1) / static_cast<double>(2 * bins);
}

std::size_t quantile_bin(std::span<const std::uint64_t> column, double x,
                         std::uint64_t* comparisons) {
    std::uint64_t prefix = 0;
    std::uint64_t scanned = 0;
    std::size_t found = column.size() - 1;
    for (std::size_t l = 0; l < column.size(); ++l) {
        prefix += column[l];
        ++scanned;
        if (static_cast<double>(prefix) >= x) {
            found = l;
            break;
        }
    }
    if (comparisons) *comparisons += scanned;
    return found;
}

std::vector<std::uint64_t> bin_counts(std::span<const double> uniforms, std::size_t bins) {
    std::vector<std::uint64_t> counts(bins, 0);
    for (double u : uniforms) ++counts[bin_index(u, bins)];
    return counts;
}

double binned_qf(std::span<const double> uniforms, double x, std::size_t bins) {
    const auto counts = bin_counts(uniforms, bins);
    return bin_midpoint(quantile_bin(counts, x), bins);
}

std::vector<double> qf_sbts_es(const ArmStats& stats, std::size_t bins, Mt19937& rng,
                               std::uint64_t* comparisons) {
    if (bins == 0) throw std::invalid_argument("qf_sbts_es: need at least one bin");
    std::vector<std::uint64_t> counts(bins);
    std::vector<double> q(stats.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::uint64_t i = 0; i < stats.T[k]; ++i) ++counts[bin_index(rng.next_unit(), bins)];
        q[k] = bin_midpoint(quantile_bin(counts, stats.X[k], comparisons), bins);
    }
    return q;
}

namespace {

void check_table(const ArmStats& stats, const BinTable& table,
                 std::optional<std::size_t> prev_arm) {
    if (table.arms() != stats.size())
        throw std::logic_error("bin table: column count does not match arm count");
    const std::uint64_t extra = table.bins() - 1;
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const std::uint64_t expected = stats.T[k] + extra - (prev_arm == k ? 1 : 0);
        if (table.column_sum(k) != expected)
            throw std::logic_error("bin table: column sum invariant violated");
    }
}

std::vector<double> read_quality(const ArmStats& stats, const BinTable& table,
                                 std::uint64_t* comparisons) {
    std::vector<double> q(stats.size());
    for (std::size_t k = 0; k < q.size(); ++k)
        q[k] = bin_midpoint(quantile_bin(table.column(k), stats.X[k], comparisons), table.bins());
    return q;
}

}  // namespace

std::vector<double> qf_sbts_essr(const ArmStats& stats, BinTable& table,
                                 std::optional<std::size_t> prev_arm, Mt19937& rng,
                                 std::uint64_t* comparisons) {
    const std::size_t bins = table.bins();
    if (bins == 0) throw std::invalid_argument("qf_sbts_essr: need at least one bin");
    if (!table.filled()) {
        table.reset(stats.size(), 1);
        return read_quality(stats, table, comparisons);
    }
    if (prev_arm && *prev_arm >= stats.size())
        throw std::invalid_argument("qf_sbts_essr: previous arm out of range");
    check_table(stats, table, prev_arm);

    if (prev_arm) ++table.at(bin_index(rng.next_unit(), bins), *prev_arm);

    const auto last_bin = static_cast<std::int64_t>(bins) - 1;
    std::vector<double> q(stats.size());
    for (std::size_t k = 0; k < stats.size(); ++k) {
        // Removal bin: uniform over bins, redrawn until non-empty. The column
        // always holds T[k] + L - 1 >= 1 samples, so this terminates.
        auto s = static_cast<std::size_t>(rng.next_int(0, last_bin));
        while (table.at(s, k) == 0) s = static_cast<std::size_t>(rng.retry_int(0, last_bin));
        --table.at(s, k);
        ++table.at(bin_index(rng.next_unit(), bins), k);
        q[k] = bin_midpoint(quantile_bin(table.column(k), stats.X[k], comparisons), bins);
    }
    return q;
}

void top_up(BinTable& table, const ArmStats& stats, Mt19937& rng) {
    if (!table.filled()) table.reset(stats.size(), 1);
    if (table.arms() != stats.size())
        throw std::logic_error("bin table: column count does not match arm count");
    const std::uint64_t extra = table.bins() - 1;
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const std::uint64_t target = stats.T[k] + extra;
        const std::uint64_t have = table.column_sum(k);
        if (have > target) throw std::logic_error("bin table: column holds more samples than T + L - 1");
        for (std::uint64_t i = have; i < target; ++i)
            ++table.at(bin_index(rng.next_unit(), table.bins()), k);
    }
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Ucb: return "ucb";
        case PolicyKind::KlUcb: return "klucb";
        case PolicyKind::BtsRef: return "bts-ref";
        case PolicyKind::Sbts: return "sbts";
        case PolicyKind::SbtsEs: return "sbts-es";
        case PolicyKind::SbtsEssr: return "sbts-essr";
    }
    return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
    for (auto kind : {PolicyKind::Ucb, PolicyKind::KlUcb, PolicyKind::BtsRef, PolicyKind::Sbts,
                      PolicyKind::SbtsEs, PolicyKind::SbtsEssr})
        if (to_string(kind) == name) return kind;
    throw std::invalid_argument("unknown policy: " + std::string(name));
}

bool is_binned(PolicyKind kind) {
    return kind == PolicyKind::SbtsEs || kind == PolicyKind::SbtsEssr;
}

bool is_thompson(PolicyKind kind) {
    return kind == PolicyKind::BtsRef || kind == PolicyKind::Sbts || is_binned(kind);
}

PolicyConfig PolicyConfig::parse(std::string_view token) { return parse(token, PolicyConfig{}); }

PolicyConfig PolicyConfig::parse(std::string_view token, const PolicyConfig& defaults) {
    PolicyConfig cfg = defaults;
    const auto colon = token.find(':');
    cfg.kind = parse_policy_kind(token.substr(0, colon));
    if (colon != std::string_view::npos) {
        if (!is_binned(cfg.kind))
            throw std::invalid_argument("bin count override only applies to sbts-es/sbts-essr");
        const auto digits = token.substr(colon + 1);
        std::size_t bins = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), bins);
        if (ec != std::errc{} || ptr != digits.data() + digits.size())
            throw std::invalid_argument("bad bin count in policy: " + std::string(token));
        cfg.bins = bins;
    }
    cfg.validate();
    return cfg;
}

std::string PolicyConfig::stream_label() const {
    std::string s(to_string(kind));
    if (is_binned(kind)) s += ":" + std::to_string(bins);
    return s;
}

std::string PolicyConfig::label() const {
    std::string s = stream_label();
    if (precision.mode() != Precision::Mode::Float64) s += "@" + precision.to_string();
    return s;
}

void PolicyConfig::validate() const {
    if (is_binned(kind) && bins < 1) throw std::invalid_argument("bin count must be at least 1");
    if (kind == PolicyKind::Ucb && !(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (kind == PolicyKind::KlUcb && !(klucb_c >= 0.0))
        throw std::invalid_argument("KL-UCB constant must be non-negative");
}

Policy::Policy(PolicyConfig config, std::size_t arms, Role role)
    : config_(std::move(config)),
      precision_(config_.precision.resolve(config_.kind == PolicyKind::Ucb ? QfRange::Bounded
                                                                           : QfRange::Unit)),
      arms_(arms),
      role_(role),
      table_(is_binned(config_.kind) ? config_.bins : 0) {
    config_.validate();
    if (arms_ < 1) throw std::invalid_argument("policy needs at least one arm");
}

std::vector<double> Policy::essr_quality(const ArmStats& stats, std::uint64_t n, Mt19937& rng,
                                         std::uint64_t& comparisons) {
    const bool at_prior = std::all_of(stats.T.begin(), stats.T.end(),
                                      [](std::uint64_t t) { return t == 1; });
    if (!table_.filled() && at_prior) return qf_sbts_essr(stats, table_, std::nullopt, rng, &comparisons);

    std::optional<std::size_t> prev = last_arm_;
    if (!table_.filled() || last_slot_ + 1 != n) {
        // First activation after other policies moved the stats, or re-entry
        // after a gap: rebuild the columns instead of the single-slot update.
        top_up(table_, stats, rng);
        prev.reset();
    }
    return qf_sbts_essr(stats, table_, prev, rng, &comparisons);
}

std::vector<double> Policy::raw_quality(const ArmStats& stats, std::uint64_t n, Mt19937& rng,
                                        std::uint64_t& comparisons) {
    switch (config_.kind) {
        case PolicyKind::Ucb:
            return qf_ucb(stats, n, config_.alpha, role_ == Role::Candidate ? arms_ : 0);
        case PolicyKind::KlUcb: return qf_klucb(stats, n, config_.klucb_c);
        case PolicyKind::BtsRef: return qf_bts_reference(stats, rng);
        case PolicyKind::Sbts: return qf_sbts(stats, rng, count_sort_comparisons_ ? &comparisons : nullptr);
        case PolicyKind::SbtsEs: return qf_sbts_es(stats, config_.bins, rng, &comparisons);
        case PolicyKind::SbtsEssr: return essr_quality(stats, n, rng, comparisons);
    }
    throw std::logic_error("unhandled policy kind");
}

std::vector<double> Policy::quality(const ArmStats& stats, std::uint64_t n, Mt19937& rng) {
    if (stats.size() != arms_) throw std::invalid_argument("policy: arm count mismatch");
    const auto draws0 = rng.draws();
    const auto retries0 = rng.retries();
    std::uint64_t comparisons = 0;
    auto q = raw_quality(stats, n, rng, comparisons);
    counters_.draws += rng.draws() - draws0;
    counters_.retries += rng.retries() - retries0;
    counters_.comparisons += comparisons;
    quantize_vector(std::span<double>(q), precision_);
    return q;
}

std::size_t Policy::step(const ArmStats& stats, std::uint64_t n, Mt19937& rng) {
    if (n == 0) throw std::invalid_argument("policy: slots are 1-based");
    std::size_t arm = 0;
    const bool round_robin = role_ == Role::Standalone &&
                             (config_.kind == PolicyKind::Ucb || config_.kind == PolicyKind::KlUcb) &&
                             n <= arms_;
    if (round_robin) {
        arm = static_cast<std::size_t>(n - 1);
    } else {
        const auto q = quality(stats, n, rng);
        arm = select_arm(q);
    }
    last_arm_ = arm;
    last_slot_ = n;
    return arm;
}

void Policy::observe(std::size_t arm, std::uint64_t n) {
    if (arm >= arms_) throw std::invalid_argument("policy: observed arm out of range");
    last_arm_ = arm;
    last_slot_ = n;
}

}  // namespace mabsoc
