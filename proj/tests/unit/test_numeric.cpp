#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mabsoc/numeric.hpp"
#include "mabsoc/rng.hpp"

using namespace mabsoc;

TEST_CASE("quantize hand values") {
    CHECK(quantize(0.35, FixedFormat(11, 8)) == 90.0 / 256.0);
    CHECK(quantize(0.0, FixedFormat(6, 5)) == 0.0);
    CHECK(quantize(10.0, FixedFormat(6, 5)) == 63.0 / 32.0);
    CHECK(quantize(-1.0, FixedFormat(6, 5)) == 0.0);
    CHECK(quantize(std::numeric_limits<double>::infinity(), FixedFormat(6, 5)) == 63.0 / 32.0);
    CHECK_THROWS_AS(quantize(std::nan(""), FixedFormat(6, 5)), std::domain_error);
}

TEST_CASE("quantize rounds half to even") {
    const FixedFormat f(6, 1);
    CHECK(quantize(0.25, f) == 0.0);
    CHECK(quantize(0.75, f) == 1.0);
    CHECK(quantize(1.25, f) == 1.0);
}

TEST_CASE("signed formats") {
    const FixedFormat f(8, 4, true);
    CHECK(f.min_value() == -8.0);
    CHECK(f.max_value() == 127.0 / 16.0);
    CHECK(quantize(-100.0, f) == -8.0);
    CHECK(quantize(-0.53, f) == -0.5);
}

TEST_CASE("format validation") {
    CHECK_THROWS(FixedFormat(0, 0));
    CHECK_THROWS(FixedFormat(6, 7));
    CHECK_THROWS(FixedFormat(60, 10));
}

TEST_CASE("quantize is idempotent and monotone") {
    Mt19937 rng(9);
    for (const FixedFormat f : {FixedFormat(27, 26), FixedFormat(11, 10), FixedFormat(6, 5), FixedFormat(11, 7)}) {
        double prev_x = -1.0;
        for (int i = 0; i < 20000; ++i) {
            const double x = prev_x + 0.001 * rng.next_unit();
            const double q = quantize(x, f);
            REQUIRE(quantize(q, f) == q);
            REQUIRE(q >= quantize(prev_x, f));
            const bool close = std::abs(q - x) <= f.step() / 2 + 1e-15;
            const bool saturated = q == f.max_value() || q == f.min_value();
            REQUIRE((close || saturated));
            prev_x = x;
        }
    }
}

TEST_CASE("precision parsing and defaults") {
    CHECK(Precision::parse("f64").mode() == Precision::Mode::Float64);
    CHECK(Precision::parse("float").mode() == Precision::Mode::Float32);
    const auto p = Precision::parse("fixed:11");
    CHECK_FALSE(p.has_explicit_split());
    CHECK(p.resolve(QfRange::Unit).format() == FixedFormat(11, 10));
    CHECK(p.resolve(QfRange::Bounded).format() == FixedFormat(11, 7));
    const auto q = Precision::parse("fixed:6:5");
    CHECK(q.format() == FixedFormat(6, 5));
    CHECK(q.resolve(QfRange::Bounded).format() == FixedFormat(6, 5));
    CHECK(Precision::parse(q.to_string()) == q);
    CHECK_THROWS(Precision::parse("fixed:"));
    CHECK_THROWS(Precision::parse("half"));
    CHECK_THROWS(Precision::parse("fixed:6:9"));
}

TEST_CASE("quantize_vector") {
    const std::vector<double> v{0.123456789, 0.9, 0.5};
    CHECK(quantize_vector(v, Precision::f64()) == v);
    const auto f = quantize_vector(v, Precision::f32());
    CHECK(f[0] == static_cast<double>(static_cast<float>(0.123456789)));
    const std::vector<double> same(4, 0.3);
    const auto s = quantize_vector(same, Precision::parse("fixed:6:5"));
    for (double x : s) CHECK(x == s[0]);
    // Neighbouring values can collapse onto one grid point.
    const std::vector<double> near{0.49, 0.51};
    const auto c = quantize_vector(near, Precision::parse("fixed:6:5"));
    CHECK(c[0] == c[1]);
}

TEST_CASE("stored values use the grid without saturating") {
    const auto p = Precision::parse("fixed:6:5");
    CHECK(p.store(1234.51) == 1234.5);
    CHECK(p.store(7.0) == 7.0);
    CHECK(Precision::f64().store(0.123) == 0.123);
}
