#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mabsoc/policies.hpp"
#include "../support/oracles.hpp"

using namespace mabsoc;

namespace {

ArmStats stats_of(std::vector<double> x, std::vector<std::uint64_t> t) {
    ArmStats s(x.size());
    s.X = std::move(x);
    s.T = std::move(t);
    return s;
}

}  // namespace

TEST_CASE("update_stats") {
    ArmStats s(2);
    update_stats(s, 0, 1.0);
    CHECK(s.X == std::vector<double>{2, 1});
    CHECK(s.T == std::vector<std::uint64_t>{2, 1});
    update_stats(s, 1, 0.0);
    CHECK(s.X[1] == 1.0);
    CHECK(s.T[1] == 2);
    update_stats(s, 1, 0.37);
    CHECK(s.X[1] == 1.37);
    CHECK(s.pulls() == std::vector<std::uint64_t>{1, 2});
    CHECK_THROWS(update_stats(s, 2, 1.0));
    CHECK_THROWS(update_stats(s, 0, 1.5));
}

TEST_CASE("select_arm") {
    CHECK(select_arm(std::vector<double>{0.1, 0.9, 0.3}) == 1);
    CHECK(select_arm(std::vector<double>{0.5, 0.5}) == 0);
    CHECK(select_arm(std::vector<double>{0.3, 2.7, 0.9}) == 1);
    CHECK_THROWS(select_arm(std::vector<double>{0.1, std::nan("")}));
}

TEST_CASE("ucb quality") {
    const auto s = stats_of({2, 1, 3}, {4, 1, 9});
    const auto q1 = qf_ucb(s, 1, 2.0);
    CHECK(q1[0] == doctest::Approx(0.5));
    CHECK(q1[2] == doctest::Approx(3.0 / 9.0));
    const auto q = qf_ucb(s, 10, 2.0);
    CHECK(std::abs(q[0] - 1.5730) <= 1e-4);
    for (std::size_t k = 0; k < 3; ++k) CHECK(q[k] == doctest::Approx(oracle::ucb(s.X[k], s.T[k], 10, 2.0)));
    const auto shifted = qf_ucb(stats_of({1, 1, 1, 1}, {1, 1, 1, 1}), 1, 2.0, 4);
    CHECK(shifted[0] == doctest::Approx(1.0 + std::sqrt(2.0 * std::log(5.0))));
}

TEST_CASE("kl divergence and kl-ucb") {
    CHECK(std::abs(kl_divergence(0.5, 0.25) - 0.1438) <= 1e-4);
    CHECK(kl_divergence(0.5, 0.75) == doctest::Approx(kl_divergence(0.5, 0.25)));
    CHECK(kl_divergence(0.3, 0.3) == doctest::Approx(0.0));
    CHECK(klucb_index(0.5, 0.0) == doctest::Approx(0.5));
    CHECK(std::abs(klucb_index(0.5, 0.1438) - 0.75) <= 1e-3);
    for (double p : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        for (double y : {0.01, 0.1, 0.5}) {
            const double q = klucb_index(p, y);
            CHECK(q >= p);
            CHECK(std::abs(q - oracle::klucb(p, y)) <= 1e-8);
        }
    }
    const auto s = stats_of({2, 3}, {4, 6});
    const auto q = qf_klucb(s, 100, 0.0);
    const double y = std::log(100.0) / 4.0;
    CHECK(std::abs(q[0] - oracle::klucb(0.5, y)) <= 1e-8);
    CHECK(kl_divergence(0.5, q[0]) <= y + 1e-6);
}

TEST_CASE("order statistics") {
    std::vector<double> u{0.342, 0.012, 0.753, 0.553};
    CHECK(order_statistic(u, 2) == 0.342);
    std::vector<double> v{0.342, 0.012, 0.753, 0.553};
    CHECK(order_statistic(v, 4) == 0.753);
    std::uint64_t cmp = 0;
    std::vector<double> w{0.9, 0.1, 0.5};
    order_statistic(w, 1, &cmp);
    CHECK(cmp > 0);
}

TEST_CASE("bts reference moments") {
    Mt19937 rng(17);
    const auto s = stats_of({3}, {8});
    std::vector<double> d(100000);
    for (auto& x : d) x = qf_bts_reference(s, rng)[0];
    CHECK(std::abs(oracle::mean(d) - 1.0 / 3.0) <= 0.005);
    CHECK(std::abs(oracle::variance(d) - 18.0 / 810.0) <= 0.002);
    CHECK_THROWS(qf_bts_reference(stats_of({1.5}, {3}), rng));
}

TEST_CASE("sbts draws one uniform per count") {
    Mt19937 rng(3);
    const auto s = stats_of({1, 2, 5}, {1, 4, 9});
    const auto d0 = rng.draws();
    const auto q = qf_sbts(s, rng);
    CHECK(rng.draws() - d0 == 14);
    for (double x : q) CHECK((x >= 0.0 && x < 1.0));
}

TEST_CASE("sbts empirical cdf matches beta quadrature") {
    Mt19937 rng(23);
    const auto s = stats_of({7}, {10});
    std::vector<double> d(100000);
    for (auto& x : d) x = qf_sbts(s, rng)[0];
    std::sort(d.begin(), d.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < d.size(); i += 97) {
        const double f = oracle::beta_cdf_quadrature(7, 4, d[i], 2000);
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / d.size() - f));
    }
    CHECK(ks < 0.01);
}

TEST_CASE("bins") {
    CHECK(bin_index(0.012, 10) == 0);
    CHECK(bin_index(0.342, 10) == 3);
    CHECK(bin_index(0.0, 10) == 0);
    CHECK(bin_index(0.999999, 10) == 9);
    CHECK(bin_index(1.0, 10) == 9);
    CHECK(bin_midpoint(3, 10) == doctest::Approx(0.35));
    CHECK_THROWS(bin_index(0.5, 0));
}

TEST_CASE("sbts-es worked examples") {
    const std::vector<double> a{0.342, 0.012, 0.753, 0.553};
    CHECK(bin_counts(a, 10) == std::vector<std::uint64_t>{1, 0, 0, 1, 0, 1, 0, 1, 0, 0});
    CHECK(binned_qf(a, 2, 10) == 0.35);
    const std::vector<double> b{0.342, 0.012, 0.083, 0.553};
    CHECK(binned_qf(b, 2, 10) == 0.05);
    Mt19937 rng(1);
    for (int i = 0; i < 100; ++i) CHECK(qf_sbts_es(stats_of({3}, {7}), 1, rng)[0] == 0.5);
}

TEST_CASE("quantile bin on a hand column") {
    const std::vector<std::uint64_t> col{0, 1, 0, 0, 1, 1, 0, 0, 1, 1};
    const auto l = quantile_bin(col, 2);
    CHECK(l == 4);
    CHECK(bin_midpoint(l, 10) == doctest::Approx(0.45));
}

TEST_CASE("sbts-essr first slot reads an all-ones table") {
    BinTable table(10);
    Mt19937 rng(1);
    ArmStats s(3);
    const auto d0 = rng.draws();
    const auto q = qf_sbts_essr(s, table, std::nullopt, rng);
    CHECK(rng.draws() == d0);
    for (double x : q) CHECK(x == doctest::Approx(0.05));
    for (std::size_t k = 0; k < 3; ++k) CHECK(table.column_sum(k) == 10);
}

TEST_CASE("sbts-essr keeps the column sums and the midpoint grid") {
    const std::size_t bins = 20;
    BinTable table(bins);
    Mt19937 rng(2), reward_rng(3);
    ArmStats s(4);
    const std::vector<double> mu{0.2, 0.4, 0.6, 0.8};
    std::optional<std::size_t> prev;
    for (int n = 1; n <= 3000; ++n) {
        const auto d0 = rng.draws();
        const auto q = qf_sbts_essr(s, table, prev, rng);
        if (n > 1) REQUIRE(rng.draws() - d0 == 2 * 4 + 1);
        for (std::size_t k = 0; k < 4; ++k) {
            REQUIRE(table.column_sum(k) == s.T[k] + bins - 1);
            const double l = q[k] * 2 * bins;
            REQUIRE(std::abs(l - std::round(l)) < 1e-9);
            REQUIRE(static_cast<long>(std::round(l)) % 2 == 1);
        }
        const auto arm = select_arm(q);
        update_stats(s, arm, reward_rng.next_unit() < mu[arm] ? 1.0 : 0.0);
        prev = arm;
    }
}

TEST_CASE("sbts-essr rejects a broken table") {
    BinTable table(5, 2, 1);
    ArmStats s(2);
    s.T[0] = 4;
    Mt19937 rng(1);
    CHECK_THROWS_AS(qf_sbts_essr(s, table, 0, rng), std::logic_error);
}

TEST_CASE("top_up fills columns to T + L - 1") {
    BinTable table(10);
    ArmStats s(3);
    s.T = {5, 1, 12};
    Mt19937 rng(4);
    top_up(table, s, rng);
    for (std::size_t k = 0; k < 3; ++k) CHECK(table.column_sum(k) == s.T[k] + 9);
}

TEST_CASE("policy config parsing") {
    const auto p = PolicyConfig::parse("sbts-es:10");
    CHECK(p.kind == PolicyKind::SbtsEs);
    CHECK(p.bins == 10);
    CHECK(p.label() == "sbts-es:10");
    const auto u = PolicyConfig::parse("ucb");
    CHECK(u.stream_label() == "ucb");
    CHECK_THROWS(PolicyConfig::parse("thompson"));
    CHECK_THROWS(PolicyConfig::parse("ucb:10"));
    CHECK(parse_policy_kind("bts-ref") == PolicyKind::BtsRef);
}

TEST_CASE("standalone ucb plays each arm once first") {
    Policy p(PolicyConfig::parse("ucb"), 4);
    ArmStats s(4);
    Mt19937 rng(1);
    for (std::uint64_t n = 1; n <= 4; ++n) {
        const auto arm = p.step(s, n, rng);
        CHECK(arm == n - 1);
        update_stats(s, arm, 0.0);
    }
}

TEST_CASE("quantized ties break to the lowest index") {
    PolicyConfig cfg = PolicyConfig::parse("ucb");
    cfg.precision = Precision::parse("fixed:6:2");
    Policy p(cfg, 2);
    ArmStats s(2);
    s.X = {40.0, 41.0};
    s.T = {100, 100};
    Mt19937 rng(1);
    CHECK(p.step(s, 1000, rng) == 0);
}

TEST_CASE("sbts radix and comparison paths agree") {
    const auto s = stats_of({1, 4, 9, 2}, {3, 10, 20, 2});
    Mt19937 a(77), b(77);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t cmp = 0;
        REQUIRE(qf_sbts(s, a) == qf_sbts(s, b, &cmp));
        REQUIRE(cmp > 0);
    }
    CHECK(a.draws() == b.draws());
}
