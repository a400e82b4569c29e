#include "mabsoc/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mabsoc {

FixedFormat::FixedFormat(int total, int frac, bool sign)
    : total_bits(total), frac_bits(frac), is_signed(sign) {
    if (total_bits < 1 || total_bits > 53)
        throw std::invalid_argument("fixed format: word length must be in [1, 53]");
    if (frac_bits < 1 || frac_bits > total_bits - (is_signed ? 1 : 0))
        throw std::invalid_argument("fixed format: fraction bits out of range");
}

double FixedFormat::step() const noexcept { return std::ldexp(1.0, -frac_bits); }

double FixedFormat::min_value() const noexcept {
    return is_signed ? -std::ldexp(1.0, total_bits - 1 - frac_bits) : 0.0;
}

double FixedFormat::max_value() const noexcept {
    const double top = is_signed ? std::ldexp(1.0, total_bits - 1) - 1.0
                                 : std::ldexp(1.0, total_bits) - 1.0;
    return std::ldexp(top, -frac_bits);
}

double quantize(double x, FixedFormat fmt) {
    if (std::isnan(x)) throw std::domain_error("quantize: NaN input");
    const double lo = fmt.is_signed ? -std::ldexp(1.0, fmt.total_bits - 1) : 0.0;
    const double hi = fmt.is_signed ? std::ldexp(1.0, fmt.total_bits - 1) - 1.0
                                    : std::ldexp(1.0, fmt.total_bits) - 1.0;
    // nearbyint honours the default FE_TONEAREST mode: ties go to even.
    const double code = std::clamp(std::nearbyint(std::ldexp(x, fmt.frac_bits)), lo, hi);
    return std::ldexp(code, -fmt.frac_bits);
}

Precision Precision::f32() {
    Precision p;
    p.mode_ = Mode::Float32;
    return p;
}

Precision Precision::fixed(FixedFormat fmt) {
    Precision p;
    p.mode_ = Mode::Fixed;
    p.fmt_ = fmt;
    return p;
}

Precision Precision::fixed_wl(int total_bits) {
    if (total_bits < 2 || total_bits > 53)
        throw std::invalid_argument("fixed precision: word length must be in [2, 53]");
    Precision p;
    p.mode_ = Mode::Fixed;
    p.fmt_.total_bits = total_bits;
    p.fmt_.frac_bits = -1;
    p.fmt_.is_signed = false;
    return p;
}

namespace {

int parse_int(std::string_view s, std::string_view whole) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("bad precision spec: " + std::string(whole));
    return v;
}

}  // namespace

Precision Precision::parse(std::string_view text) {
    if (text == "f64" || text == "double") return f64();
    if (text == "f32" || text == "float") return f32();
    constexpr std::string_view prefix = "fixed:";
    if (!text.starts_with(prefix)) throw std::invalid_argument("bad precision spec: " + std::string(text));
    std::string_view rest = text.substr(prefix.size());
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) return fixed_wl(parse_int(rest, text));
    const int wl = parse_int(rest.substr(0, colon), text);
    const int frac = parse_int(rest.substr(colon + 1), text);
    return fixed(FixedFormat(wl, frac));
}

std::string Precision::to_string() const {
    switch (mode_) {
        case Mode::Float64: return "f64";
        case Mode::Float32: return "f32";
        case Mode::Fixed: break;
    }
    std::string s = "fixed:" + std::to_string(fmt_.total_bits);
    if (has_explicit_split()) s += ":" + std::to_string(fmt_.frac_bits);
    return s;
}

Precision Precision::resolve(QfRange range) const {
    if (mode_ != Mode::Fixed || has_explicit_split()) return *this;
    const int integer_bits = range == QfRange::Unit ? 1 : 4;
    const int frac = std::max(1, fmt_.total_bits - integer_bits);
    return fixed(FixedFormat(fmt_.total_bits, frac));
}

double Precision::apply(double x) const {
    switch (mode_) {
        case Mode::Float64: return x;
        case Mode::Float32: return static_cast<double>(static_cast<float>(x));
        case Mode::Fixed: break;
    }
    if (!has_explicit_split()) throw std::logic_error("precision: unresolved fraction split");
    return quantize(x, fmt_);
}

double Precision::store(double x) const {
    switch (mode_) {
        case Mode::Float64: return x;
        case Mode::Float32: return static_cast<double>(static_cast<float>(x));
        case Mode::Fixed: break;
    }
    if (!has_explicit_split()) throw std::logic_error("precision: unresolved fraction split");
    if (std::isnan(x)) throw std::domain_error("store: NaN input");
    const double code = std::nearbyint(std::ldexp(x, fmt_.frac_bits));
    return std::ldexp(fmt_.is_signed ? code : std::max(code, 0.0), -fmt_.frac_bits);
}

void quantize_vector(std::span<double> q, const Precision& precision) {
    if (precision.mode() == Precision::Mode::Float64) return;
    for (double& v : q) v = precision.apply(v);
}

std::vector<double> quantize_vector(std::span<const double> q, const Precision& precision) {
    std::vector<double> out(q.begin(), q.end());
    quantize_vector(std::span<double>(out), precision);
    return out;
}

}  // namespace mabsoc
