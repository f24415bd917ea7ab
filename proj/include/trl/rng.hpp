#pragma once

#include <cstdint>

namespace trl {

// splitmix64 generator. The standard <random> distributions are not required
// to produce identical sequences across implementations, so everything that
// needs reproducible output draws from this instead.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). Requires n > 0.
    int uniform_int(int n) {
        int k = int(uniform01() * double(n));
        return k < n ? k : n - 1;
    }

private:
    uint64_t state_;
};

inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed. Used to give the
// network init, the agent, and each episode their own generators so that
// changing how one consumes randomness does not disturb the others.
inline uint64_t derive_seed(uint64_t root, uint64_t stream) {
    return mix64(root + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

}  // namespace trl
