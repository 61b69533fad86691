// rng.cpp

#include "davies/rng.hpp"

#include <cmath>
#include <numbers>

namespace davies {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
    return splitmix64(splitmix64(seed) ^ (trial * 0xD1B54A32D192ED03ULL + 1));
}

std::uint64_t Rng::next_u64() noexcept { return splitmix64(seed_ + (counter_++) * kGolden); }

double Rng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

double Rng::normal() noexcept {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

cplx Rng::complex_normal() noexcept {
    const double re = normal();
    const double im = normal();
    return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
}

Operator random_complex(Eigen::Index n, Rng& rng) {
    Operator m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = rng.complex_normal();
    }
    return m;
}

Operator random_hermitian(Eigen::Index n, Rng& rng) {
    const Operator g = random_complex(n, rng);
    return 0.5 * (g + g.adjoint());
}

Operator random_unitary(Eigen::Index n, Rng& rng) {
    const Operator g = random_complex(n, rng);
    Eigen::HouseholderQR<Operator> qr(g);
    Operator q = qr.householderQ();
    const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx d = r(i, i);
        const double a = std::abs(d);
        if (a > 0.0) q.col(i) *= d / a;
    }
    return q;
}

} // namespace davies
