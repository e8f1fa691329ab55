#pragma once

#include <cstdint>
#include <limits>

namespace abcopt {

/// splitmix64 step. Used both as a bit mixer for key derivation and as
/// the per-stream generator, so stream setup costs a handful of adds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Roles a random stream can play. Part of the stream key, so draws for
/// different purposes never overlap even at the same counter.
enum class StreamPurpose : std::uint64_t {
    proposal = 1,
    simulate = 2,
    mh_chain = 3,
    fit = 4,
    generic = 5,
};

/// Counter-based generator: the stream is keyed by
/// (seed, iteration, counter, purpose) and is independent of how work is
/// scheduled across workers. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t iteration,
               std::uint64_t counter, StreamPurpose purpose) {
        std::uint64_t s = seed;
        splitmix64(s);
        s ^= 0xA0761D6478BD642FULL + iteration;
        splitmix64(s);
        s ^= 0xE7037ED1A0B428DBULL + counter;
        splitmix64(s);
        s ^= 0x8EBC6AF09C88C6E3ULL + static_cast<std::uint64_t>(purpose);
        splitmix64(s);
        state_ = s;
    }

    result_type operator()() { return splitmix64(state_); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

private:
    std::uint64_t state_;
};

} // namespace abcopt
