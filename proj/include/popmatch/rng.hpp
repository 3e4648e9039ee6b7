#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace popmatch {

// Deterministic RNG used everywhere randomness is needed.
//
// All draws are fully specified so that outputs are reproducible across
// platforms and compilers: the engine is std::mt19937_64 (whose sequence the
// standard pins down exactly), integers are mapped by modulo, and doubles are
// built from the top 53 bits. std::uniform_*_distribution is deliberately not
// used (its mapping is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [lo, hi], inclusive. Modulo bias is acceptable here: ranges
    // are tiny relative to 2^64 and determinism is what matters.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(engine_() % span);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool next_bool(double p_true) { return next_double() < p_true; }

    // Fisher-Yates, highest index first: for i = n-1..1, j = next in [0, i].
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(next_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace popmatch
