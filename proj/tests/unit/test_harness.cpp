#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mabsoc/harness.hpp"

using namespace mabsoc;

TEST_CASE("env spec parsing") {
    const auto a = EnvSpec::parse("mu3", "gaussian:0.1");
    CHECK(a.arm_count() == 8);
    CHECK(a.reward == RewardKind::GaussianClipped);
    CHECK(a.sigma == 0.1);
    const auto b = EnvSpec::parse("random:6:0.05");
    CHECK(b.arm_count() == 6);
    CHECK(b.min_gap == 0.05);
    const auto c = EnvSpec::parse("means:0.2,0.9");
    CHECK(c.build(1, 0).optimal_arm() == 1);
    CHECK(EnvSpec::parse("mu1", "gaussian").sigma == kDefaultSigma);
    CHECK_THROWS(EnvSpec::parse("random:6"));
    CHECK_THROWS(EnvSpec::parse("mu1", "poisson"));
}

TEST_CASE("random environments differ per experiment, presets do not") {
    const auto r = EnvSpec::random(6, 0.0);
    CHECK(r.build(42, 0).means() == r.build(42, 0).means());
    CHECK(r.build(42, 0).means() != r.build(42, 1).means());
    const auto p = EnvSpec::from_preset("mu2");
    CHECK(p.build(1, 0).means() == p.build(2, 5).means());
}

TEST_CASE("experiments are deterministic") {
    ExperimentConfig cfg;
    cfg.env = EnvSpec::random(4, 0.0);
    cfg.horizon = 2000;
    cfg.algorithm = PolicyConfig::parse("sbts-essr");
    const auto a = run_experiment(cfg, 3);
    const auto b = run_experiment(cfg, 3);
    CHECK(a.cumulative_regret == b.cumulative_regret);
    CHECK(a.pulls == b.pulls);
}

TEST_CASE("ucb on an easy instance has small regret") {
    ExperimentConfig cfg;
    cfg.env = EnvSpec::parse("means:0,0.99");
    cfg.horizon = 10000;
    cfg.algorithm = PolicyConfig::parse("ucb");
    CHECK(run_experiment(cfg, 0).final_regret() < 50.0);
}

TEST_CASE("thread count does not change batch results") {
    ExperimentConfig cfg;
    cfg.env = EnvSpec::random(4, 0.0);
    cfg.horizon = 500;
    cfg.experiments = 6;
    cfg.algorithm = PolicyConfig::parse("klucb");
    cfg.threads = 1;
    const auto a = run_batch(cfg);
    cfg.threads = 3;
    const auto b = run_batch(cfg);
    CHECK(a.summary.mean_regret == b.summary.mean_regret);
    CHECK(a.summary.final_regrets == b.summary.final_regrets);
}

TEST_CASE("single experiment has zero spread") {
    ExperimentConfig cfg;
    cfg.env = EnvSpec::from_preset("mu1");
    cfg.horizon = 300;
    cfg.experiments = 1;
    cfg.algorithm = PolicyConfig::parse("ucb");
    const auto r = run_batch(cfg);
    for (double s : r.summary.std_regret) CHECK(s == 0.0);
}

TEST_CASE("word-length runs share random streams") {
    ExperimentConfig cfg;
    cfg.env = EnvSpec::from_preset("mu1");
    cfg.horizon = 1000;
    auto p = PolicyConfig::parse("sbts-essr");
    cfg.algorithm = p;
    const auto a = run_experiment(cfg, 0);
    p.precision = Precision::parse("fixed:27");
    cfg.algorithm = p;
    const auto b = run_experiment(cfg, 0);
    CHECK(a.pulls == b.pulls);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.env = EnvSpec::from_preset("mu3", RewardKind::GaussianClipped);
    cfg.algorithm = PolicyConfig::parse("sbts");
    CHECK_THROWS(cfg.validate());
    cfg.algorithm = PolicyConfig::parse("ucb");
    CHECK_NOTHROW(cfg.validate());
    cfg.horizon = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("type-7 quantiles and boxplot") {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i + 1;
    CHECK(quantile_sorted(v, 0.5) == doctest::Approx(50.5));
    CHECK(quantile_sorted(v, 0.25) == doctest::Approx(25.75));
    const auto box = boxplot_stats(v);
    CHECK(box.median == doctest::Approx(50.5));
    CHECK(box.outliers.empty());

    const std::vector<double> flat(10, 3.0);
    const auto fb = boxplot_stats(flat);
    CHECK(fb.q1 == 3.0);
    CHECK(fb.q3 == 3.0);
    CHECK(fb.outliers.empty());

    std::vector<double> spike{10, 11, 9, 10, 12, 10, 9, 11, 1000};
    const auto sb = boxplot_stats(spike);
    REQUIRE(sb.outliers.size() == 1);
    CHECK(sb.outliers[0] == 1000);
    CHECK(sb.upper_whisker == 12);
}

TEST_CASE("csv and json outputs") {
    ExperimentConfig cfg;
    cfg.env = EnvSpec::from_preset("mu3", RewardKind::GaussianClipped);
    cfg.horizon = 800;
    cfg.experiments = 2;
    cfg.algorithm = AggregatorConfig{};
    const auto r = run_batch(cfg);
    const auto dir = std::filesystem::temp_directory_path() / "mabsoc_harness_test";
    std::filesystem::create_directories(dir);
    write_curve_csv(dir / "c.csv", r.summary);
    std::ifstream in(dir / "c.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "slot,mean_regret,std_regret");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 800);
    const auto j = batch_to_json(r, false);
    CHECK(j.contains("committed_counts"));
    CHECK(j.contains("first_experiment"));
    CHECK(j["first_experiment"]["belief"].size() == 500);
}
