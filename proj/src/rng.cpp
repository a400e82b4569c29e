#include "mabsoc/rng.hpp"

#include <stdexcept>

namespace mabsoc {

namespace {
constexpr std::size_t kShift = 397;
constexpr std::uint32_t kMatrixA = 0x9908b0dfu;
constexpr std::uint32_t kUpperMask = 0x80000000u;
constexpr std::uint32_t kLowerMask = 0x7fffffffu;
}  // namespace

void Mt19937::reseed(std::uint32_t seed) {
    state_[0] = seed;
    for (std::size_t i = 1; i < kStateSize; ++i) {
        state_[i] = 1812433253u * (state_[i - 1] ^ (state_[i - 1] >> 30)) +
                    static_cast<std::uint32_t>(i);
    }
    index_ = kStateSize;
    draws_ = 0;
    retries_ = 0;
}

void Mt19937::twist() {
    auto mix = [](std::uint32_t hi, std::uint32_t lo, std::uint32_t far) {
        const std::uint32_t y = (hi & kUpperMask) | (lo & kLowerMask);
        return far ^ (y >> 1) ^ ((y & 1u) ? kMatrixA : 0u);
    };
    std::size_t i = 0;
    for (; i < kStateSize - kShift; ++i)
        state_[i] = mix(state_[i], state_[i + 1], state_[i + kShift]);
    for (; i < kStateSize - 1; ++i)
        state_[i] = mix(state_[i], state_[i + 1], state_[i + kShift - kStateSize]);
    state_[kStateSize - 1] = mix(state_[kStateSize - 1], state_[0], state_[kShift - 1]);
    index_ = 0;
}

std::uint32_t Mt19937::next_u32() {
    if (index_ >= kStateSize) twist();
    std::uint32_t y = state_[index_++];
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c5680u;
    y ^= (y << 15) & 0xefc60000u;
    y ^= y >> 18;
    return y;
}

double Mt19937::next_unit() {
    ++draws_;
    return static_cast<double>(next_u32()) * (1.0 / 4294967296.0);
}

std::int64_t Mt19937::bounded(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("next_int: lo > hi");
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range > (std::uint64_t{1} << 32))
        throw std::invalid_argument("next_int: range wider than 32 bits");
    if (range == (std::uint64_t{1} << 32)) return lo + next_u32();

    // Largest multiple of `range` that fits in 2^32; words at or above it are
    // rejected so every residue is equally likely.
    const std::uint64_t limit = (std::uint64_t{1} << 32) - ((std::uint64_t{1} << 32) % range);
    for (;;) {
        const std::uint64_t word = next_u32();
        if (word < limit) return lo + static_cast<std::int64_t>(word % range);
        ++retries_;
    }
}

std::int64_t Mt19937::next_int(std::int64_t lo, std::int64_t hi) {
    const std::int64_t v = bounded(lo, hi);
    ++draws_;
    return v;
}

std::int64_t Mt19937::retry_int(std::int64_t lo, std::int64_t hi) {
    const std::int64_t v = bounded(lo, hi);
    ++retries_;
    return v;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint32_t derive_seed(std::uint32_t base_seed, std::uint64_t experiment,
                          std::uint64_t stream) noexcept {
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ experiment);
    h = splitmix64(h ^ stream);
    return static_cast<std::uint32_t>(h >> 32);
}

std::uint64_t stream_id(const char* label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char* p = label; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace mabsoc
