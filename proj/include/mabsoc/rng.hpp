#pragma once

#include <array>
#include <cstdint>

namespace mabsoc {

// 32-bit Mersenne Twister (MT19937) with draw accounting.
//
// `draws()` counts values handed out through next_unit/next_int/retry_int.
// `retries()` counts extra work that did not produce a fresh value: 32-bit
// words rejected by next_int, plus every value requested through retry_int.
class Mt19937 {
public:
    static constexpr std::size_t kStateSize = 624;
    static constexpr std::uint32_t kDefaultSeed = 5489u;

    explicit Mt19937(std::uint32_t seed = kDefaultSeed) { reseed(seed); }

    void reseed(std::uint32_t seed);

    // Raw tempered output; does not touch the draw counters.
    std::uint32_t next_u32();

    // Uniform on [0, 1): next_u32() / 2^32.
    double next_unit();

    // Uniform on {lo, ..., hi}, unbiased by rejection.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi);

    // Same distribution as next_int, but booked as a retry instead of a draw.
    // Used when a caller resamples a value it had to throw away.
    std::int64_t retry_int(std::int64_t lo, std::int64_t hi);

    std::uint64_t draws() const noexcept { return draws_; }
    std::uint64_t retries() const noexcept { return retries_; }
    std::size_t index() const noexcept { return index_; }

private:
    void twist();
    std::int64_t bounded(std::int64_t lo, std::int64_t hi);

    std::array<std::uint32_t, kStateSize> state_{};
    std::size_t index_ = kStateSize;
    std::uint64_t draws_ = 0;
    std::uint64_t retries_ = 0;
};

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed for an independent stream, a pure function of its inputs so that batch
// results do not depend on execution order.
std::uint32_t derive_seed(std::uint32_t base_seed, std::uint64_t experiment,
                          std::uint64_t stream) noexcept;

// Stable 64-bit FNV-1a hash, used to turn policy labels into stream ids.
std::uint64_t stream_id(const char* label) noexcept;

}  // namespace mabsoc
