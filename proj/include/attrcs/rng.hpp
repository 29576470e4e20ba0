#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace attrcs {

// splitmix64 finalizer, used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derived seeds are a pure function of (base, indices), so every bootstrap /
// subsample / round owns its own stream and results do not depend on
// scheduling or worker count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(base ^ 0x243f6a8885a308d3ULL);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    s = splitmix64(s ^ c);
    return s;
}

// mt19937_64 with hand-rolled draw helpers; std distributions are avoided so
// that byte-level reproducibility does not hinge on library internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform in (0,1]
    double uniform_pos() {
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // unbiased uniform integer in [0, n), n >= 1
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
        const std::uint64_t lim = std::numeric_limits<std::uint64_t>::max() - rem;
        std::uint64_t x = eng_();
        while (x > lim) x = eng_();
        return x % n;
    }

    // Exponential race key for weighted sampling without replacement: drawing
    // the smallest keys is an exact weighted draw. Always consumes one
    // variate, so zero-weight entries do not shift the stream.
    double race_key(double weight) {
        const double u = uniform_pos();
        if (weight <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(u) / weight;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace attrcs
