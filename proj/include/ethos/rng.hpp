#pragma once

// Deterministic randomness. Everything that draws random numbers goes through
// Rng so results are bit-identical across platforms and across serial/parallel
// execution. std::uniform_real_distribution and friends are implementation
// defined, so draws are derived from raw mt19937_64 output by hand.

#include <cstdint>
#include <random>
#include <vector>

#include "ethos/error.hpp"

namespace ethos {

// SplitMix64 finalizer over (seed, index). Used to derive an independent
// stream per trial so that trial i is the same no matter how many trials run.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1].
    double uniform_positive() { return 1.0 - uniform01(); }

    /// Unbiased uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw Error(ErrorKind::InvalidArgument, "Rng::below requires n > 0");
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Index draw from nonnegative weights by CDF inversion.
    std::size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0))
            throw Error(ErrorKind::InvalidArgument, "categorical draw needs positive total weight");
        const double target = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (target < acc) return i;
        }
        return weights.size() - 1;  // guard against rounding at the top end
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace ethos
