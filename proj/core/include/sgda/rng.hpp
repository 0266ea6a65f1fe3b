#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace sgda {

// Philox4x32-10 counter-based generator. Output depends only on (key, stream,
// running block index), so independent streams can be keyed by
// (seed, epoch, parent, variant) and consumed in any order with no shared state.
// Counter layout: words 0-1 hold the block index, words 2-3 the stream id.
class Philox {
public:
    explicit Philox(std::uint64_t key, std::uint64_t stream = 0) : key_(key), stream_(stream) {}

    std::uint32_t next_u32() {
        if (have_ == 0) {
            block_ = round10(block_index_);
            ++block_index_;
            have_ = 4;
        }
        return block_[4 - have_--];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; deterministic given the stream position.
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return cached_normal_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;  // avoid log(0)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

private:
    using Block = std::array<std::uint32_t, 4>;

    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    Block round10(std::uint64_t block_index) const {
        Block x{static_cast<std::uint32_t>(block_index),
                static_cast<std::uint32_t>(block_index >> 32),
                static_cast<std::uint32_t>(stream_),
                static_cast<std::uint32_t>(stream_ >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(key_);
        std::uint32_t k1 = static_cast<std::uint32_t>(key_ >> 32);
        for (int i = 0; i < 10; ++i) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, x[0], hi0, lo0);
            mulhilo(0xCD9E8D57u, x[2], hi1, lo1);
            x = Block{hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return x;
    }

    std::uint64_t key_;
    std::uint64_t stream_;
    Block block_{};
    std::uint64_t block_index_ = 0;
    int have_ = 0;
    bool have_normal_ = false;
    double cached_normal_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// Labeled seed derivation: one top-level seed fans out to per-module streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    return splitmix64(seed ^ fnv1a64(label));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    return splitmix64(derive_seed(seed, label) ^ splitmix64(index));
}

}  // namespace sgda
