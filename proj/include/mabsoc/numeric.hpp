#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mabsoc {

// Fixed-point layout: `total_bits` wide, `frac_bits` after the binary point.
struct FixedFormat {
    int total_bits = 32;
    int frac_bits = 31;
    bool is_signed = false;

    FixedFormat() = default;
    FixedFormat(int total, int frac, bool sign = false);

    double step() const noexcept;
    double min_value() const noexcept;
    double max_value() const noexcept;

    friend bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

// Round-to-nearest-even onto the format's grid, saturating at the range ends.
// NaN throws std::domain_error; +-inf saturate.
double quantize(double x, FixedFormat fmt);

// Which QF range a default fraction split is chosen for.
enum class QfRange {
    Unit,     // Thompson-sampling family and KL-UCB, QF in [0,1]
    Bounded,  // UCB, QF up to ~1 + sqrt(alpha ln N); four integer bits
};

// How a policy represents its QF vector (and its stored cumulative rewards).
class Precision {
public:
    enum class Mode { Float64, Float32, Fixed };

    Precision() = default;
    static Precision f64() { return Precision(); }
    static Precision f32();
    static Precision fixed(FixedFormat fmt);
    // Word length only; the fraction split is resolved per policy via
    // resolve() using the QF range defaults.
    static Precision fixed_wl(int total_bits);

    // "f64", "f32", "fixed:WL" or "fixed:WL:F".
    static Precision parse(std::string_view text);
    std::string to_string() const;

    Mode mode() const noexcept { return mode_; }
    bool has_explicit_split() const noexcept { return fmt_.frac_bits >= 0; }
    const FixedFormat& format() const noexcept { return fmt_; }

    // Fill in a missing fraction split: WL-1 for Unit, WL-4 for Bounded.
    Precision resolve(QfRange range) const;

    // Representation of one QF entry.
    double apply(double x) const;
    // Representation of a stored cumulative reward: same fraction grid as the
    // QF, but integer bits sized to the horizon, so it never saturates.
    double store(double x) const;

    friend bool operator==(const Precision&, const Precision&) = default;

private:
    Mode mode_ = Mode::Float64;
    FixedFormat fmt_{};
};

void quantize_vector(std::span<double> q, const Precision& precision);
std::vector<double> quantize_vector(std::span<const double> q, const Precision& precision);

}  // namespace mabsoc
