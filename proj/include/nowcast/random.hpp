#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace nowcast {

// Mixes a master seed with stream identifiers (splitmix64 finalizer). Used for
// seed splitting: per-fold, per-tree and per-coalition seeds are pure functions
// of (seed, ids), so results never depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Portable RNG: mt19937_64 bits with hand-written transforms, since the
// standard distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);
    double normal();                        // standard normal (Box-Muller)
    std::size_t index(std::size_t n);       // uniform on [0, n), unbiased

    // k distinct indices from [0, n) in draw order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace nowcast
