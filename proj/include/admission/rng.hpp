#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace admission {

// splitmix64: cheap, well-mixed 64-bit hash.  Used both to derive sub-stream
// seeds from one base seed and as a counter-mode generator for draws that must
// be addressable by index rather than consumed sequentially.
inline uint64_t splitmix64(uint64_t x) {
    static constexpr uint64_t PHI = 0x9E3779B97F4A7C15ULL;
    x += PHI;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base_seed, uint64_t index) {
    static constexpr uint64_t PHI = 0x9E3779B97F4A7C15ULL;
    return splitmix64(base_seed + index * PHI);
}

// uniform double in [0,1) from 64 random bits (53-bit mantissa)
inline double bits_to_unit(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Named sub-streams carved out of one replication seed.  Keeping them separate
// lets two coupled systems share arrivals and service draws while drawing
// their exploration coins independently.
enum class Stream : uint64_t {
    arrivals = 1,
    service = 2,
    coins = 3,
    internal = 4,  // private randomness of baseline policies
};

class RandomStreams {
public:
    explicit RandomStreams(uint64_t seed) : seed_(seed) {}

    std::mt19937_64 engine(Stream which) const {
        return std::mt19937_64(derive_seed(seed_, static_cast<uint64_t>(which)));
    }

    // Service requirement of the job arriving at `arrival_index`, rate `mu`.
    // Counter-mode addressing: any holder of the same seed can look up the
    // same draw without consuming shared generator state.
    double service_time(int64_t arrival_index, double mu) const {
        uint64_t key = derive_seed(derive_seed(seed_, static_cast<uint64_t>(Stream::service)),
                                   static_cast<uint64_t>(arrival_index));
        double u = bits_to_unit(splitmix64(key));
        return -std::log1p(-u) / mu;
    }

    uint64_t seed() const { return seed_; }

private:
    uint64_t seed_;
};

}  // namespace admission
