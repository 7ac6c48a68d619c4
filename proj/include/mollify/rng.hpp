#pragma once

#include <cstdint>

namespace mollify {

/// Counter-based random stream. The i-th draw is a pure function of
/// (seed, i), so derived streams can be handed to independent work items
/// and replayed in any order.
class Stream {
public:
    explicit Stream(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t position() const { return counter_; }

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    double normal();
    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape);
    double beta(double a, double b);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Independent child stream keyed by `key`; does not advance this one.
    Stream derive(std::uint64_t key) const;

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace mollify
