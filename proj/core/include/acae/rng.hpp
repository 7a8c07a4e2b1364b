#pragma once

#include <cstdint>
#include <vector>

#include "acae/matrix.hpp"

namespace acae {

/// Deterministic counter-based random stream (splitmix64). The same seed
/// yields the same draw sequence on every platform; all randomness in the
/// library flows through explicitly passed streams.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double next_double();

    /// Uniform in (0, 1]; never zero, safe under log().
    double next_double_open();

    /// Standard normal via Box-Muller, one cached spare.
    double next_gaussian();

    /// Unbiased uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Matrix with i.i.d. normal(0, std^2) entries, filled row-major.
Matrix gaussian_fill(std::size_t rows, std::size_t cols, double std_dev, RngStream& rng);

}  // namespace acae
