#pragma once

// Shared domain types, deterministic hashing and seeded randomness.
// Everything here is platform-stable by construction: the hash is XXH64
// (fixed for the lifetime of this repo, golden values in the tests) and
// the RNG is std::mt19937_64, whose raw output the standard pins bit-exactly.

#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lattice {

// Caller broke an API contract (bad arguments, invalid configuration).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input data is malformed (bad file content, inconsistent records).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using FeatureId = std::string;
using TaskId = std::string;

// Integral milliseconds everywhere; float drift in TTL/window arithmetic is not acceptable.
using TimestampMs = std::int64_t;
using DurationMs = std::int64_t;

struct Seed {
    std::uint64_t value = 0;
};

// Monotonic simulation time. No wall-clock integration anywhere in this library.
class VirtualClock {
public:
    VirtualClock() = default;
    explicit VirtualClock(TimestampMs start) : now_(start) {}

    TimestampMs now() const { return now_; }

    void advance(DurationMs delta) {
        if (delta < 0) throw UsageError("VirtualClock::advance: negative delta");
        now_ += delta;
    }

    void advance_to(TimestampMs t) {
        if (t < now_) throw UsageError("VirtualClock::advance_to: time moved backwards");
        now_ = t;
    }

private:
    TimestampMs now_ = 0;
};

namespace detail {

inline std::uint64_t rotl64(std::uint64_t x, int r) {
    return (x << r) | (x >> (64 - r));
}

inline std::uint64_t read_u64le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline std::uint32_t read_u32le(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

} // namespace detail

// XXH64. Seeded, non-cryptographic, with published test vectors; this is the
// one hash used for every deterministic assignment in the library.
inline std::uint64_t stable_hash(std::span<const std::uint8_t> data, Seed seed) {
    constexpr std::uint64_t kPrime1 = 0x9E3779B185EBCA87ULL;
    constexpr std::uint64_t kPrime2 = 0xC2B2AE3D27D4EB4FULL;
    constexpr std::uint64_t kPrime3 = 0x165667B19E3779F9ULL;
    constexpr std::uint64_t kPrime4 = 0x85EBCA77C2B2AE63ULL;
    constexpr std::uint64_t kPrime5 = 0x27D4EB2F165667C5ULL;
    using detail::rotl64;

    const std::uint8_t* p = data.data();
    const std::uint8_t* const end = p + data.size();
    std::uint64_t h;

    if (data.size() >= 32) {
        std::uint64_t v1 = seed.value + kPrime1 + kPrime2;
        std::uint64_t v2 = seed.value + kPrime2;
        std::uint64_t v3 = seed.value;
        std::uint64_t v4 = seed.value - kPrime1;
        do {
            v1 = rotl64(v1 + detail::read_u64le(p) * kPrime2, 31) * kPrime1; p += 8;
            v2 = rotl64(v2 + detail::read_u64le(p) * kPrime2, 31) * kPrime1; p += 8;
            v3 = rotl64(v3 + detail::read_u64le(p) * kPrime2, 31) * kPrime1; p += 8;
            v4 = rotl64(v4 + detail::read_u64le(p) * kPrime2, 31) * kPrime1; p += 8;
        } while (p + 32 <= end);
        h = rotl64(v1, 1) + rotl64(v2, 7) + rotl64(v3, 12) + rotl64(v4, 18);
        for (std::uint64_t v : {v1, v2, v3, v4}) {
            h ^= rotl64(v * kPrime2, 31) * kPrime1;
            h = h * kPrime1 + kPrime4;
        }
    } else {
        h = seed.value + kPrime5;
    }

    h += static_cast<std::uint64_t>(data.size());
    while (p + 8 <= end) {
        h ^= rotl64(detail::read_u64le(p) * kPrime2, 31) * kPrime1;
        h = rotl64(h, 27) * kPrime1 + kPrime4;
        p += 8;
    }
    if (p + 4 <= end) {
        h ^= static_cast<std::uint64_t>(detail::read_u32le(p)) * kPrime1;
        h = rotl64(h, 23) * kPrime2 + kPrime3;
        p += 4;
    }
    while (p < end) {
        h ^= static_cast<std::uint64_t>(*p) * kPrime5;
        h = rotl64(h, 11) * kPrime1;
        ++p;
    }

    h ^= h >> 33;
    h *= kPrime2;
    h ^= h >> 29;
    h *= kPrime3;
    h ^= h >> 32;
    return h;
}

inline std::uint64_t stable_hash(std::string_view text, Seed seed) {
    return stable_hash(std::span<const std::uint8_t>(
                           reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
                       seed);
}

// Builds the canonical byte encodings fed to stable_hash (big-endian,
// length-prefixed), so hashing input is identical on every platform.
class ByteWriter {
public:
    void u32_be(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8)
            buf_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
    }

    void u64_be(std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8)
            buf_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
    }

    void bytes(std::string_view s) {
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    void length_prefixed(std::string_view s) {
        u32_be(static_cast<std::uint32_t>(s.size()));
        bytes(s);
    }

    const std::vector<std::uint8_t>& view() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

// Seeded RNG with hand-specified derived draws. mt19937_64's raw stream is
// standard-mandated; the bounded draw and shuffle below avoid
// std::uniform_int_distribution, which is not specified bit-exactly.
class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed.value) {}

    std::uint64_t next_u64() { return engine_(); }

    // 53-bit mantissa construction; always in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n) via rejection sampling.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw UsageError("Rng::uniform_below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace lattice
