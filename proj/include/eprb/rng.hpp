#pragma once

#include <cstdint>
#include <limits>

namespace eprb {

/// Purpose tags for keyed substreams. Two draws share a stream only if
/// seed, tag and index all agree.
enum class StreamTag : std::uint64_t {
    pair = 1,
    setting = 2,
    instrument = 3,
    run = 4,
    response_table = 5,
};

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-keyed SplitMix64 stream. The starting state is a hash of
/// (seed, tag, index), so the draws for trial i never depend on how many
/// draws other trials consumed or on which worker generated them.
class Substream {
public:
    using result_type = std::uint64_t;

    constexpr Substream(std::uint64_t seed, StreamTag tag, std::uint64_t index) noexcept
        : state_(mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(tag)) ^ mix64(index + 0x632be59bd9b4e019ULL)))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n), unbiased by rejection.
    std::uint64_t below(std::uint64_t n) noexcept;

private:
    std::uint64_t state_;
};

/// Seed for the j-th independent repetition of an experiment.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run) noexcept
{
    Substream s(seed, StreamTag::run, run);
    return s();
}

} // namespace eprb
