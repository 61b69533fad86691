// classical.hpp: the classical Markov chain embedded in a Davies generator
//
// For an orthonormal eigenbasis {u_i} of H the chain has states i, stationary
// weights pi_i = <u_i|rho|u_i> and jump rates
//   P[i -> j] = G(E_j - E_i) sum_S |<u_i|S|u_j>|^2   (i != j).

#pragma once

#include "davies/gaps.hpp"
#include "davies/generator.hpp"
#include "davies/rng.hpp"

#include <cstdint>
#include <vector>

namespace davies {

struct ClassicalChain {
    Eigen::VectorXd energies;
    Eigen::VectorXd pi;
    Eigen::MatrixXd rates;   // off-diagonal P[i -> j], diagonal -sum of the row
    Operator basis;          // columns u_i, lab frame
    // max |pi_i P_ij - pi_j P_ji|
    double reversibility_residual{0.0};
    // max |pi_i P_ij - <L(|u_j><u_j|), |u_i><u_i|>_rho| over i != j
    double crosscheck_residual{0.0};
    // H had a degenerate level, so the basis is one choice among many.
    bool basis_ambiguous{false};

    Eigen::Index size() const noexcept { return pi.size(); }
    double exit_rate(Eigen::Index i) const { return -rates(i, i); }
};

// Chain in the generator's own eigenbasis.
ClassicalChain extract_chain(const DaviesGenerator& gen);

// Chain in a caller-supplied eigenbasis (columns). Throws PreconditionError
// when the columns are not orthonormal eigenvectors of H within 1e-9.
ClassicalChain extract_chain(const DaviesGenerator& gen, const Operator& basis);

// Second-smallest eigenvalue of the pi-symmetrized negative generator.
double classical_gap(const ClassicalChain& chain);

// 1/2 sum_{i,j} (F_i - F_j)^2 pi_i P_ij
double classical_dirichlet(const ClassicalChain& chain, const Eigen::VectorXd& f);

double classical_variance(const ClassicalChain& chain, const Eigen::VectorXd& f);

// sum_i F_i |u_i><u_i|
Operator diagonal_observable(const ClassicalChain& chain, const Eigen::VectorXd& f);

enum class BottleneckMode { Exhaustive, Sweep };

struct CheegerWitness {
    std::vector<Eigen::Index> subset;
    std::uint64_t mask{0};      // bit i set when state i is in the subset
    double pi_subset{0.0};
    double flow{0.0};           // Q(S, S^c)
    double phi{0.0};            // Q(S, S^c) / pi(S)
    double lambda_max{0.0};     // largest total exit rate
    double classical_gap{0.0};
    BottleneckMode mode{BottleneckMode::Exhaustive};
    bool upper_bound{false};    // sweep mode: phi only bounds the optimum from above
    // 2 Lambda lambda_cl - phi^2
    double chain_margin{0.0};
};

inline constexpr Eigen::Index kMaxExhaustiveStates = 20;

// Exhaustive requires N <= 20 (DimensionError otherwise).
CheegerWitness bottleneck(const ClassicalChain& chain, BottleneckMode mode);

struct CheegerReport {
    CheegerWitness witness;
    Operator projection;           // sum_{i in S} |u_i><u_i|
    double idempotence_residual{0.0};
    double commutator_residual{0.0};
    double dirichlet{0.0};         // E(P)
    double variance{0.0};          // Var(P)
    int d{1};
    double lambda_l{0.0};
    double g_sup_bohr{0.0};        // max |G| over Bohr frequencies
    double g_sup_closed{0.0};      // closed-form sup (1 for glauber/metropolis)
    double jump_sum_norm{0.0};     // || sum_S S S^dag ||
    double m{0.0};                 // g_sup_bohr * jump_sum_norm
    double bound{0.0};             // 4 sqrt(D M lambda_L) Var(P)
    double margin{0.0};            // bound - E(P)
    double tol{0.0};
    bool holds{false};
};

struct CheegerOptions {
    // 0: exhaustive when N <= 16, sweep otherwise.
    int mode{0};
    double tol_scale{1.0};
};

// Throws DegenerateWitnessError when Var(P) is numerically zero.
CheegerReport cheeger_witness(const DaviesGenerator& gen, int d, double lambda_l,
                              const CheegerOptions& opts = {});
CheegerReport cheeger_witness(const DaviesGenerator& gen, int d, const CheegerOptions& opts = {});

// Eigenbasis of H with an independent Haar rotation inside every degenerate level.
Operator rotated_eigenbasis(const DaviesGenerator& gen, Rng& rng);

struct RotationScan {
    double solver_gap{0.0};   // classical gap in the eigensolver's basis
    double min_gap{0.0};
    double max_gap{0.0};
    int samples{0};
};

RotationScan scan_rotations(const DaviesGenerator& gen, int samples, std::uint64_t seed);

} // namespace davies
