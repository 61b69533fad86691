// rng.hpp: portable counter-based random numbers and random matrices
//
// Draw k of stream s is splitmix64(s + k * golden); uniform and normal
// variates are built from it by hand so every platform sees the same bits.

#pragma once

#include "davies/linalg.hpp"

#include <cstdint>

namespace davies {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed for trial t of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;                 // [0, 1)
    double uniform(double lo, double hi) noexcept;
    double normal() noexcept;                  // Box-Muller, no caching
    std::uint64_t below(std::uint64_t n) noexcept; // [0, n)
    cplx complex_normal() noexcept;            // E|z|^2 = 1

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_{0};
};

// Entries i.i.d. complex normal.
Operator random_complex(Eigen::Index n, Rng& rng);
Operator random_hermitian(Eigen::Index n, Rng& rng);
// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
Operator random_unitary(Eigen::Index n, Rng& rng);

} // namespace davies
