#pragma once

#include <cstdint>
#include <string_view>

// Small deterministic generator (splitmix64-style scrambler).  The
// verification suite derives one stream per (suite seed, check id, case
// index), so a report is reproducible bit-for-bit across platforms and
// standard-library versions; std::mt19937 plus the distribution adapters
// would not guarantee that.
namespace nucalc {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform draw in [lo, hi).  53 bits of the raw stream feed the mantissa.
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    // Integer in [0, n).  n is tiny here (choices among a handful of
    // alternatives), so modulo bias is negligible.
    int pick(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

// Stream seed for (seed, tag, index): FNV-1a over the tag folded with the
// other two, then one scramble round so nearby indices land far apart.
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
    std::uint64_t h = 1469598103934665603ull;
    for (const char ch : tag) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    h ^= seed * 0x2545f4914f6cdd1dull;
    h ^= index * 0xd1342543de82ef95ull;
    SplitMix64 s(h);
    return s.next();
}

}  // namespace nucalc
