// gaps.hpp: spectral gaps of a Davies generator
//
// Gaps are smallest eigenvalues of -L restricted to KMS-orthonormal bases of
// the invariant subspaces V_omega. On V_0 the identity direction is removed
// first, so the result is the minimum of E(f) / Var(f).

#pragma once

#include "davies/generator.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace davies {

struct SubspaceBasis {
    std::size_t index{0};   // Bohr frequency index
    double omega{0.0};
    // Eigenvector pairs (a, b), element e_ab = (p_a p_b)^{-1/4} |u_a><u_b|.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    Eigen::VectorXd scales;  // (p_a p_b)^{-1/4}
    // max |<e_i, e_j>_rho - delta_ij| evaluated in the lab basis.
    double orthonormality_residual{0.0};

    std::size_t size() const noexcept { return pairs.size(); }
    Operator element(const DaviesGenerator& gen, std::size_t i) const;
};

SubspaceBasis subspace_basis(const DaviesGenerator& gen, std::size_t k);

// M_ij = -<L(e_j), e_i>_rho. Throws ReversibilityError if M is not Hermitian
// within 1e-9 * max(1, sum_S ||S||^2, max|M|).
Eigen::MatrixXcd generator_matrix(const DaviesGenerator& gen, const SubspaceBasis& basis);

// max |M - M^dag| of the raw generator matrix, no exception.
double generator_asymmetry(const DaviesGenerator& gen, const SubspaceBasis& basis);

struct GapValue {
    double value{0.0};
    bool infinite{false};          // empty (deflated) space
    bool ergodicity_suspect{false};

    bool operator<(const GapValue& o) const noexcept {
        if (infinite) return false;
        if (o.infinite) return true;
        return value < o.value;
    }
};

// Gaps below this are reported as 0 and flagged.
inline constexpr double kZeroGapTol = 1e-12;

// Smallest eigenvalue of the Hermitian matrix m on the orthogonal complement
// of `deflate` (if given, need not be normalized).
GapValue smallest_eigenvalue(const Eigen::MatrixXcd& m, const Eigen::VectorXcd* deflate = nullptr);

GapValue spectral_gap_omega(const DaviesGenerator& gen, double omega);
GapValue spectral_gap_at(const DaviesGenerator& gen, std::size_t k);

struct GapOptions {
    bool hermitian{true};
    // Dense check over all N^2 operators; skipped above this dimension.
    bool superoperator_check{true};
    Eigen::Index superoperator_max_dim{16};
};

struct GapReport {
    std::vector<double> omegas;
    std::vector<GapValue> per_omega;
    GapValue gap;          // lambda_L
    GapValue gap0;         // lambda_{L,0}
    double minimizing_omega{0.0};
    std::optional<GapValue> hermitian_gap;
    std::optional<GapValue> hermitian_gap0;
    std::optional<GapValue> superoperator_gap;
    double max_asymmetry{0.0};        // largest |M - M^dag| over all V_omega
    double orthonormality_residual{0.0};
    double tol{1e-9};
};

GapReport spectral_gap_full(const DaviesGenerator& gen, const GapOptions& opts = {});

struct RayleighValue {
    double value{0.0};
    bool infinite{false};
};

// E(f) / Var(f), +inf when Var(f) <= 1e-12 * scale(f).
RayleighValue rayleigh_quotient(const DaviesGenerator& gen, const Operator& f);

enum class HermitianSubspace { All, V0 };

// Minimum Rayleigh quotient over Hermitian observables, from the real-linear
// space of Hermitian operators (optionally restricted to V_0).
GapValue hermitian_gap(const DaviesGenerator& gen, HermitianSubspace subspace);

// Smallest nonzero-mode eigenvalue of -L over all N^2 operators, identity deflated.
GapValue superoperator_gap(const DaviesGenerator& gen);

} // namespace davies
