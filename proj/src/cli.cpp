#include "mabsoc/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mabsoc/harness.hpp"
#include "mabsoc/validate.hpp"

namespace mabsoc {

namespace {

struct Options {
    std::string config;
    std::string policy = "sbts-essr";
    std::string policies = "ucb,sbts-essr";
    std::size_t arms = 0;
    std::uint64_t horizon = 10000;
    std::size_t experiments = 100;
    std::uint32_t seed = 42;
    std::string env;
    std::string reward = "bernoulli";
    double alpha = kDefaultAlpha;
    double klucb_c = kDefaultKlucbC;
    std::size_t beta_bins = kDefaultBins;
    std::string precision = "f64";
    std::uint64_t nlearn = kDefaultLearningSlots;
    std::string candidates = "ucb,sbts-essr";
    bool velcro = false;
    std::string out = "results";
    std::string format = "csv";
    unsigned threads = 0;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(',', start);
        std::string item = s.substr(start, pos - start);
        if (!item.empty()) out.push_back(item);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

// Config-file values become leading "--key value" arguments; every option
// keeps its last occurrence, so explicit flags win.
std::vector<std::string> config_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("bad config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    std::vector<std::string> args;
    for (const auto& [key, value] : j.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
            continue;
        }
        args.push_back("--" + key);
        args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    return args;
}

EnvSpec resolve_env(const Options& o) {
    std::string env = o.env;
    if (env.empty()) env = o.arms > 0 ? "random:" + std::to_string(o.arms) + ":0" : "mu1";
    EnvSpec spec = EnvSpec::parse(env, o.reward);
    if (o.arms > 0 && spec.arm_count() != o.arms)
        throw UsageError("--arms " + std::to_string(o.arms) + " disagrees with --env " + env);
    return spec;
}

PolicyConfig policy_defaults(const Options& o, bool precision_list) {
    PolicyConfig p;
    p.alpha = o.alpha;
    p.klucb_c = o.klucb_c;
    p.bins = o.beta_bins;
    if (!precision_list) p.precision = Precision::parse(o.precision);
    return p;
}

ExperimentConfig base_config(const Options& o) {
    ExperimentConfig cfg;
    cfg.env = resolve_env(o);
    cfg.horizon = o.horizon;
    cfg.experiments = o.experiments;
    cfg.base_seed = o.seed;
    cfg.threads = o.threads;
    return cfg;
}

std::string file_slug(const std::string& label) {
    std::string s;
    for (char c : label) {
        const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.';
        s += keep ? c : '_';
    }
    return s;
}

void report(std::ostream& out, const BatchResult& r) {
    char line[256];
    std::snprintf(line, sizeof line, "%-32s final regret %10.2f +- %8.2f   optimal pulls %9.1f\n",
                  algorithm_label(r.config.algorithm).c_str(), r.summary.mean_final_regret,
                  r.summary.std_final_regret, r.summary.mean_optimal_pulls);
    out << line;
    if (!r.summary.committed_counts.empty()) {
        const auto& agg = std::get<AggregatorConfig>(r.config.algorithm);
        out << "  committed:";
        for (std::size_t i = 0; i < r.summary.committed_counts.size(); ++i)
            out << " " << agg.candidates[i].label() << "=" << r.summary.committed_counts[i];
        out << "\n";
    }
}

void write_outputs(const Options& o, const std::string& command, const std::vector<BatchResult>& batches,
                   std::ostream& out) {
    namespace fs = std::filesystem;
    const fs::path dir(o.out);
    fs::create_directories(dir);
    const bool curves_in_json = o.format == "json";

    nlohmann::ordered_json summary;
    summary["command"] = command;
    summary["base_seed"] = o.seed;
    summary["batches"] = nlohmann::ordered_json::array();
    for (const auto& b : batches) {
        summary["batches"].push_back(batch_to_json(b, curves_in_json));
        if (!curves_in_json) {
            const fs::path csv = dir / (file_slug(algorithm_label(b.config.algorithm)) + ".csv");
            write_curve_csv(csv, b.summary);
            out << "wrote " << csv.string() << "\n";
        }
    }
    const fs::path json_path = dir / "summary.json";
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot write " + json_path.string());
    js << summary.dump(2) << "\n";
    out << "wrote " << json_path.string() << "\n";
}

std::vector<BatchResult> run_algorithms(const Options& o, const std::vector<Algorithm>& algorithms,
                                        std::ostream& out) {
    std::vector<BatchResult> batches;
    for (const auto& a : algorithms) {
        ExperimentConfig cfg = base_config(o);
        cfg.algorithm = a;
        batches.push_back(run_batch(cfg));
        report(out, batches.back());
    }
    return batches;
}

int dispatch(const std::string& command, const Options& o, std::ostream& out) {
    if (o.format != "csv" && o.format != "json") throw UsageError("--format must be csv or json");
    const PolicyConfig defaults = policy_defaults(o, command == "sweep-wl");

    if (command == "validate") {
        bool all = true;
        for (const auto& c : run_validation_suite(o.seed)) {
            out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
            all = all && c.passed;
        }
        return all ? kExitOk : kExitValidationFailed;
    }

    std::vector<Algorithm> algorithms;
    if (command == "run") {
        algorithms.emplace_back(PolicyConfig::parse(o.policy, defaults));
    } else if (command == "compare") {
        for (const auto& p : split_list(o.policies)) algorithms.emplace_back(PolicyConfig::parse(p, defaults));
        if (algorithms.empty()) throw UsageError("--policies is empty");
    } else if (command == "sweep-wl") {
        for (const auto& prec : split_list(o.precision)) {
            PolicyConfig p = PolicyConfig::parse(o.policy, defaults);
            p.precision = Precision::parse(prec);
            algorithms.emplace_back(p);
        }
        if (algorithms.empty()) throw UsageError("--precision list is empty");
    } else if (command == "rimab") {
        AggregatorConfig agg;
        agg.candidates.clear();
        for (const auto& c : split_list(o.candidates)) agg.candidates.push_back(PolicyConfig::parse(c, defaults));
        agg.learning_slots = o.nlearn;
        agg.mode = o.velcro ? AggregatorMode::VelcroApprox : AggregatorMode::RiMab;
        algorithms.emplace_back(agg);
    } else {
        throw UsageError("unknown command " + command);
    }

    const auto batches = run_algorithms(o, algorithms, out);
    write_outputs(o, command, batches, out);
    return kExitOk;
}

}  // namespace

int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Bandit policy simulator: UCB, KL-UCB, order-statistic Thompson sampling and RI-MAB",
                 "mabsim"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--config", o.config, "JSON file of flag values (flags override it)");
    app.add_option("--policy", o.policy, "ucb, klucb, bts-ref, sbts, sbts-es, sbts-essr (sbts-es:10 sets L)");
    app.add_option("--policies", o.policies, "comma-separated policy list for compare");
    app.add_option("--arms", o.arms, "arm count for a random environment");
    app.add_option("--horizon", o.horizon, "slots per experiment");
    app.add_option("--experiments", o.experiments, "independent experiments");
    app.add_option("--seed", o.seed, "base seed");
    app.add_option("--env", o.env, "mu1..mu4, random:K:gap or means:a,b,...");
    app.add_option("--reward", o.reward, "bernoulli or gaussian:sigma");
    app.add_option("--alpha", o.alpha, "UCB exploration factor");
    app.add_option("--klucb-c", o.klucb_c, "KL-UCB constant c");
    app.add_option("--beta-bins", o.beta_bins, "bin count L for sbts-es / sbts-essr");
    app.add_option("--precision", o.precision, "f64, f32, fixed:WL or fixed:WL:F (list for sweep-wl)");
    app.add_option("--nlearn", o.nlearn, "RI-MAB learning slots");
    app.add_option("--candidates", o.candidates, "RI-MAB candidate policies");
    app.add_flag("--velcro", o.velcro, "rimab: run the always-active belief-sampling baseline instead");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--format", o.format, "csv (curves as CSV) or json (curves inside summary.json)");
    app.add_option("--threads", o.threads, "worker threads (0: all cores)");

    std::string command;
    for (const char* name : {"run", "compare", "sweep-wl", "rimab", "validate"}) {
        app.add_subcommand(name)->callback([&command, name] { command = name; });
    }

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);

    try {
        // Locate --config ahead of the real parse so file values can be placed first.
        for (std::size_t i = args.size(); i-- > 0;) {
            std::string path;
            if (args[i] == "--config" && i > 0) path = args[i - 1];
            else if (args[i].starts_with("--config=")) path = args[i].substr(9);
            if (path.empty()) continue;
            // args is reversed: append config values so they parse first.
            auto extra = config_arguments(path);
            for (auto& e : extra) args.insert(args.end(), e);
            std::reverse(args.end() - static_cast<std::ptrdiff_t>(extra.size()), args.end());
            break;
        }
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        return dispatch(command, o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace mabsoc
