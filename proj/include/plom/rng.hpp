#pragma once

// Counter-based PRNG (splitmix64 finalizer over a keyed counter).  Every
// variate in this library is a pure function of (seed, stream, counter), so
// identical seeds reproduce bit-identical samples on any platform and sample
// streams can be split across threads by partitioning counters.

#include <cstdint>

namespace plom {

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL))),
          seed_(seed),
          stream_(stream) {}

    static constexpr const char* algorithm = "splitmix64-ctr";

    std::uint64_t word(std::uint64_t counter) const {
        return mix(key_ + counter * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform draw in the open interval (0,1); safe as input to inversions.
    double uniform(std::uint64_t counter) const {
        return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace plom
