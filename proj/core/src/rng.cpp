#include "acae/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace acae {

std::uint64_t RngStream::next_u64() {
    // splitmix64 (Steele, Lea, Flood 2014).
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: zero bound");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

Matrix gaussian_fill(std::size_t rows, std::size_t cols, double std_dev, RngStream& rng) {
    if (std_dev < 0.0) throw std::invalid_argument("gaussian_fill: negative std");
    Matrix m(rows, cols);
    if (std_dev == 0.0) return m;
    for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = std_dev * rng.next_gaussian();
    return m;
}

}  // namespace acae
