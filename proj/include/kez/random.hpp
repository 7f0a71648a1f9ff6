#pragma once

#include <cstdint>
#include <random>

namespace kez {

std::uint64_t splitmix64(std::uint64_t& state);

// mt19937_64 with portable uniform/normal draws (the std distributions are
// implementation-defined, which would break cross-platform reproducibility).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    // Independent stream for worker / chain `index`, derived from the seed.
    Rng substream(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next() { return engine_(); }
    // [0, 1) with 53 random bits.
    double uniform();
    // (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }
    double normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kez
