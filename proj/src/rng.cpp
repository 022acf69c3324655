#include "eprb/rng.hpp"

namespace eprb {

std::uint64_t Substream::below(std::uint64_t n) noexcept
{
    if (n == 0)
        return 0;
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = max() - max() % n;
    for (;;) {
        const std::uint64_t x = (*this)();
        if (x < limit)
            return x % n;
    }
}

} // namespace eprb
