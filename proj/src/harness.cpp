#include "mabsoc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace mabsoc {

namespace {

double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("bad number in " + std::string(what) + ": " + std::string(s));
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

EnvSpec EnvSpec::random(std::size_t arms, double min_gap, RewardKind reward, double sigma) {
    EnvSpec s;
    s.source = Source::Random;
    s.arms = arms;
    s.min_gap = min_gap;
    s.reward = reward;
    s.sigma = sigma;
    return s;
}

EnvSpec EnvSpec::from_preset(std::string_view name, RewardKind reward, double sigma) {
    if (!is_preset(name)) throw std::invalid_argument("unknown preset: " + std::string(name));
    EnvSpec s;
    s.source = Source::Preset;
    s.preset = std::string(name);
    s.reward = reward;
    s.sigma = sigma;
    return s;
}

EnvSpec EnvSpec::parse(std::string_view env, std::string_view reward) {
    EnvSpec s;
    if (is_preset(env)) {
        s.source = Source::Preset;
        s.preset = std::string(env);
    } else if (env.starts_with("random:")) {
        const auto parts = split(env.substr(7), ':');
        if (parts.size() != 2) throw std::invalid_argument("expected random:K:gap, got " + std::string(env));
        s.source = Source::Random;
        s.arms = static_cast<std::size_t>(parse_double(parts[0], "arm count"));
        s.min_gap = parse_double(parts[1], "gap");
    } else if (env.starts_with("means:")) {
        s.source = Source::Explicit;
        for (auto m : split(env.substr(6), ',')) s.means.push_back(parse_double(m, "means"));
    } else {
        throw std::invalid_argument("unknown environment: " + std::string(env));
    }

    if (reward == "bernoulli") {
        s.reward = RewardKind::Bernoulli;
    } else if (reward == "gaussian") {
        s.reward = RewardKind::GaussianClipped;
    } else if (reward.starts_with("gaussian:")) {
        s.reward = RewardKind::GaussianClipped;
        s.sigma = parse_double(reward.substr(9), "sigma");
    } else {
        throw std::invalid_argument("unknown reward model: " + std::string(reward));
    }
    if (!(s.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    return s;
}

std::size_t EnvSpec::arm_count() const {
    switch (source) {
        case Source::Preset: return preset_means(preset).size();
        case Source::Random: return arms;
        case Source::Explicit: return means.size();
    }
    return 0;
}

std::string EnvSpec::env_string() const {
    switch (source) {
        case Source::Preset: return preset;
        case Source::Random: return "random:" + std::to_string(arms) + ":" + format_number(min_gap);
        case Source::Explicit: break;
    }
    std::string s = "means:";
    for (std::size_t i = 0; i < means.size(); ++i) s += (i ? "," : "") + format_number(means[i]);
    return s;
}

std::string EnvSpec::reward_string() const {
    if (reward == RewardKind::Bernoulli) return "bernoulli";
    return "gaussian:" + format_number(sigma);
}

Environment EnvSpec::build(std::uint32_t base_seed, std::uint64_t experiment) const {
    switch (source) {
        case Source::Preset: {
            const auto m = preset_means(preset);
            return Environment::from_means(m, reward, sigma);
        }
        case Source::Random: {
            Mt19937 rng(derive_seed(base_seed, experiment, kEnvironmentStream));
            return random_instance(arms, min_gap, rng, reward, sigma);
        }
        case Source::Explicit: return Environment::from_means(means, reward, sigma);
    }
    throw std::logic_error("unhandled environment source");
}

std::string algorithm_label(const Algorithm& algorithm) {
    if (const auto* p = std::get_if<PolicyConfig>(&algorithm)) return p->label();
    return std::get<AggregatorConfig>(algorithm).label();
}

std::string algorithm_stream_label(const Algorithm& algorithm) {
    if (const auto* p = std::get_if<PolicyConfig>(&algorithm)) return p->stream_label();
    return std::get<AggregatorConfig>(algorithm).mode == AggregatorMode::RiMab ? "rimab"
                                                                               : "velcro-approx";
}

void ExperimentConfig::validate() const {
    if (experiments < 1) throw std::invalid_argument("need at least one experiment");
    const std::size_t k = env.arm_count();
    if (k < 2) throw std::invalid_argument("environment needs at least 2 arms");
    if (horizon < k) throw std::invalid_argument("horizon must be at least the number of arms");
    if (const auto* p = std::get_if<PolicyConfig>(&algorithm)) {
        p->validate();
        const bool integer_only = p->kind == PolicyKind::BtsRef || p->kind == PolicyKind::Sbts;
        if (integer_only && env.reward != RewardKind::Bernoulli)
            throw std::invalid_argument("bts-ref and sbts need Bernoulli rewards");
    } else {
        std::get<AggregatorConfig>(algorithm).validate(horizon);
    }
}

RegretTrace run_policy(const PolicyConfig& config, const Environment& env, std::uint64_t horizon,
                       RewardStreams& rewards, Mt19937& rng, bool record_counters) {
    const std::size_t arms = env.size();
    Policy policy(config, arms);
    policy.count_sort_comparisons(record_counters);
    ArmStats stats(arms);

    RegretTrace trace;
    trace.means = env.means();
    trace.pulls.assign(arms, 0);
    trace.cumulative_regret.reserve(horizon);
    if (record_counters) {
        trace.draws_per_slot.reserve(horizon);
        trace.comparisons_per_slot.reserve(horizon);
    }

    double cumulative = 0.0;
    double received = 0.0;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        const PolicyCounters before = policy.counters();
        const std::size_t arm = policy.step(stats, n, rng);
        const double reward = rewards.pull(arm);
        update_stats(stats, arm, reward);
        stats.X[arm] = policy.precision().store(stats.X[arm]);

        cumulative += env.optimal_mean() - env.arm(arm).mean;
        received += reward;
        trace.cumulative_regret.push_back(cumulative);
        trace.pulls[arm] += 1;
        if (record_counters) {
            const PolicyCounters& after = policy.counters();
            trace.draws_per_slot.push_back(static_cast<std::uint32_t>(after.draws - before.draws));
            trace.comparisons_per_slot.push_back(
                static_cast<std::uint32_t>(after.comparisons - before.comparisons));
        }
    }

    trace.counters = policy.counters();
    for (std::size_t k = 0; k < arms; ++k)
        if (env.arm(k).mean == env.optimal_mean()) trace.optimal_pulls += trace.pulls[k];
    trace.realized_regret = static_cast<double>(horizon) * env.optimal_mean() - received;
    return trace;
}

RegretTrace run_experiment(const ExperimentConfig& config, std::size_t index) {
    const Environment env = config.env.build(config.base_seed, index);
    RewardStreams rewards(env, config.base_seed, index);
    const std::string stream = algorithm_stream_label(config.algorithm);
    Mt19937 rng(derive_seed(config.base_seed, index, stream_id(stream.c_str())));

    if (const auto* p = std::get_if<PolicyConfig>(&config.algorithm))
        return run_policy(*p, env, config.horizon, rewards, rng, config.record_counters);
    return rimab_run(std::get<AggregatorConfig>(config.algorithm), env, config.horizon, rewards, rng,
                     config.record_counters);
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0,1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxplotStats boxplot_stats(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("boxplot_stats: empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    BoxplotStats box;
    box.q1 = quantile_sorted(sorted, 0.25);
    box.median = quantile_sorted(sorted, 0.5);
    box.q3 = quantile_sorted(sorted, 0.75);
    const double iqr = box.q3 - box.q1;
    const double lo_fence = box.q1 - 1.5 * iqr;
    const double hi_fence = box.q3 + 1.5 * iqr;

    box.lower_whisker = box.q1;
    box.upper_whisker = box.q3;
    bool have_inlier = false;
    for (double v : sorted) {
        if (v < lo_fence || v > hi_fence) {
            box.outliers.push_back(v);
            continue;
        }
        if (!have_inlier) box.lower_whisker = v;
        box.upper_whisker = v;
        have_inlier = true;
    }
    return box;
}

BatchSummary summarize(std::span<const RegretTrace> traces, std::uint64_t horizon) {
    if (traces.empty()) throw std::invalid_argument("summarize: no traces");
    const auto count = static_cast<double>(traces.size());
    BatchSummary s;
    s.mean_regret.assign(horizon, 0.0);
    s.std_regret.assign(horizon, 0.0);

    for (const auto& t : traces) {
        if (t.cumulative_regret.size() != horizon)
            throw std::logic_error("summarize: trace length differs from horizon");
        for (std::uint64_t n = 0; n < horizon; ++n) s.mean_regret[n] += t.cumulative_regret[n];
    }
    for (double& m : s.mean_regret) m /= count;
    if (traces.size() > 1) {
        for (const auto& t : traces)
            for (std::uint64_t n = 0; n < horizon; ++n) {
                const double d = t.cumulative_regret[n] - s.mean_regret[n];
                s.std_regret[n] += d * d;
            }
        for (double& v : s.std_regret) v = std::sqrt(v / (count - 1.0));
    }

    double draws = 0.0;
    double comparisons = 0.0;
    std::size_t max_committed = 0;
    for (const auto& t : traces) {
        s.final_regrets.push_back(t.final_regret());
        s.optimal_pulls.push_back(t.optimal_pulls);
        s.mean_optimal_pulls += static_cast<double>(t.optimal_pulls) / count;
        draws += static_cast<double>(t.counters.draws);
        comparisons += static_cast<double>(t.counters.comparisons);
        if (t.committed) max_committed = std::max(max_committed, *t.committed + 1);
    }
    s.mean_final_regret = s.mean_regret.back();
    s.std_final_regret = s.std_regret.back();
    s.draws_per_slot = draws / (count * static_cast<double>(horizon));
    s.comparisons_per_slot = comparisons / (count * static_cast<double>(horizon));
    if (max_committed > 0) {
        s.committed_counts.assign(max_committed, 0);
        for (const auto& t : traces)
            if (t.committed) s.committed_counts[*t.committed] += 1;
    }
    s.boxplot = boxplot_stats(s.final_regrets);
    return s;
}

BatchResult run_batch(const ExperimentConfig& config) {
    config.validate();
    BatchResult result;
    result.config = config;
    result.traces.resize(config.experiments);

    unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.experiments));

    if (workers <= 1) {
        for (std::size_t i = 0; i < config.experiments; ++i) result.traces[i] = run_experiment(config, i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < config.experiments; i = next++)
                        result.traces[i] = run_experiment(config, i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    next = config.experiments;
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    result.summary = summarize(result.traces, config.horizon);
    return result;
}

void write_curve_csv(const std::filesystem::path& path, const BatchSummary& summary) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "slot,mean_regret,std_regret\n";
    char line[96];
    for (std::size_t n = 0; n < summary.mean_regret.size(); ++n) {
        std::snprintf(line, sizeof line, "%zu,%.6f,%.6f\n", n + 1, summary.mean_regret[n],
                      summary.std_regret[n]);
        out << line;
    }
}

namespace {

nlohmann::ordered_json algorithm_json(const Algorithm& algorithm) {
    auto policy_json = [](const PolicyConfig& p) {
        nlohmann::ordered_json j;
        j["policy"] = std::string(to_string(p.kind));
        if (p.kind == PolicyKind::Ucb) j["alpha"] = p.alpha;
        if (p.kind == PolicyKind::KlUcb) j["klucb_c"] = p.klucb_c;
        if (is_binned(p.kind)) j["beta_bins"] = p.bins;
        j["precision"] = p.precision.to_string();
        return j;
    };
    if (const auto* p = std::get_if<PolicyConfig>(&algorithm)) return policy_json(*p);
    const auto& a = std::get<AggregatorConfig>(algorithm);
    nlohmann::ordered_json j;
    j["mode"] = a.mode == AggregatorMode::RiMab ? "rimab" : "velcro-approx";
    j["nlearn"] = a.learning_slots;
    j["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : a.candidates) j["candidates"].push_back(policy_json(c));
    return j;
}

}  // namespace

nlohmann::ordered_json batch_to_json(const BatchResult& result, bool include_curves) {
    const auto& cfg = result.config;
    const auto& s = result.summary;
    nlohmann::ordered_json j;
    j["label"] = algorithm_label(cfg.algorithm);
    j["config"] = {
        {"env", cfg.env.env_string()},
        {"reward", cfg.env.reward_string()},
        {"horizon", cfg.horizon},
        {"experiments", cfg.experiments},
        {"base_seed", cfg.base_seed},
        {"algorithm", algorithm_json(cfg.algorithm)},
    };
    j["mean_final_regret"] = s.mean_final_regret;
    j["std_final_regret"] = s.std_final_regret;
    j["mean_optimal_pulls"] = s.mean_optimal_pulls;
    j["final_regret"] = s.final_regrets;
    j["optimal_pulls"] = s.optimal_pulls;
    j["draws_per_slot"] = s.draws_per_slot;
    j["comparisons_per_slot"] = s.comparisons_per_slot;
    j["boxplot"] = {
        {"q1", s.boxplot.q1},
        {"median", s.boxplot.median},
        {"q3", s.boxplot.q3},
        {"lower_whisker", s.boxplot.lower_whisker},
        {"upper_whisker", s.boxplot.upper_whisker},
        {"outliers", s.boxplot.outliers},
    };

    if (const auto* agg = std::get_if<AggregatorConfig>(&cfg.algorithm)) {
        auto committed = nlohmann::ordered_json::array();
        for (const auto& t : result.traces)
            committed.push_back(t.committed ? nlohmann::ordered_json(agg->candidates[*t.committed].label())
                                            : nlohmann::ordered_json(nullptr));
        j["committed_algorithm"] = committed;
        j["committed_counts"] = s.committed_counts;

        // Schedule and belief trajectory of the first experiment; the active
        // algorithm is run-length encoded as [first_slot, candidate] blocks.
        const auto& first = result.traces.front();
        auto blocks = nlohmann::ordered_json::array();
        for (std::size_t n = 0; n < first.active_algorithm.size(); ++n)
            if (n == 0 || first.active_algorithm[n] != first.active_algorithm[n - 1])
                blocks.push_back({n + 1, first.active_algorithm[n]});
        j["first_experiment"] = {{"active_algorithm_blocks", blocks}, {"belief", first.belief}};
    }

    if (include_curves) {
        j["mean_regret"] = s.mean_regret;
        j["std_regret"] = s.std_regret;
    }
    return j;
}

}  // namespace mabsoc
