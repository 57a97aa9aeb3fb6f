#pragma once

#include <array>
#include <cstdint>

namespace tcage {

/// xoshiro256** (Blackman & Vigna, 2018). The four state words are filled from
/// the seed by successive splitmix64 outputs. `uniform()` takes the top 53 bits
/// of the next output and scales by 2^-53, giving a double in [0, 1).
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    double uniform();
    /// floor(uniform() * bound), in [0, bound)
    std::uint64_t below(std::uint64_t bound);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return next(); }

private:
    std::array<std::uint64_t, 4> state_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace tcage
