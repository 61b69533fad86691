// generator.hpp: the Davies generator in the Heisenberg picture
//
//   L(f) = sum_{omega, S} G(omega) ( S(omega)^dag f S(omega) - 1/2 {S(omega)^dag S(omega), f} )
//   S(omega) = sum_{l1 - l2 = omega} Pi_l1 S Pi_l2
//
// together with the KMS inner product <A, B>_rho = tr(rho^1/2 A rho^1/2 B^dag),
// variance, Dirichlet form (definitional and divergence routes), and the
// hermitianization pair (g, h) of an observable in V_omega.
//
// Internally everything is kept in the eigenbasis of H, where rho is diagonal
// and each S(omega) is the subset of entries of U^dag S U whose level pair has
// Bohr frequency omega.

#pragma once

#include "davies/linalg.hpp"
#include "davies/operators.hpp"
#include "davies/spectral.hpp"

#include <span>
#include <utility>
#include <vector>

namespace davies {

enum class RateKind { Glauber, Metropolis, Table };

class RateFunction {
public:
    // 1 / (1 + e^{beta omega})
    static RateFunction glauber(double beta);
    // min(1, e^{-beta omega})
    static RateFunction metropolis(double beta);
    // Values at tabulated frequencies; lookups match the nearest entry within 1e-9.
    static RateFunction table(double beta, std::vector<std::pair<double, double>> entries);

    double operator()(double omega) const;

    RateKind kind() const noexcept { return kind_; }
    double beta() const noexcept { return beta_; }
    const std::vector<std::pair<double, double>>& entries() const noexcept { return table_; }

    // max over omegas of |G(w) - G(-w) e^{-beta w}| / max(|G(w)|, |G(-w) e^{-beta w}|)
    double detailed_balance_residual(std::span<const double> omegas) const;

    // sup_omega |G(omega)| when known in closed form (1 for glauber/metropolis),
    // the table maximum otherwise.
    double sup_bound() const;

private:
    RateFunction(RateKind k, double beta) : kind_(k), beta_(beta) {}
    RateKind kind_;
    double beta_;
    std::vector<std::pair<double, double>> table_; // sorted by omega
};

double transition_rate(const RateFunction& rf, double omega);

struct GeneratorOptions {
    double level_tol{0.0};  // 0: default_level_tol
    double bohr_tol{0.0};   // 0: same as level tolerance
    // Throw ValidationError at construction when G breaks detailed balance on
    // the Bohr frequencies of H beyond detailed_balance_tol (relative).
    bool require_detailed_balance{true};
    double detailed_balance_tol{1e-10};
};

class DaviesGenerator {
public:
    // The jump set is closed under adjoints: S^dag is appended for every S that
    // has no partner within 1e-12 (max norm).
    DaviesGenerator(HermitianOperator h, double beta, RateFunction rate, std::vector<Operator> jumps,
                    GeneratorOptions opts = {});

    const HermitianOperator& hamiltonian() const noexcept { return h_; }
    const Levels& levels() const noexcept { return levels_; }
    const BohrData& bohr() const noexcept { return bohr_; }
    const GibbsState& gibbs() const noexcept { return gibbs_; }
    const RateFunction& rate() const noexcept { return rate_; }
    double beta() const noexcept { return beta_; }
    Eigen::Index dim() const noexcept { return levels_.dim(); }

    const std::vector<Operator>& jumps() const noexcept { return jumps_; }
    std::size_t adjoints_added() const noexcept { return added_; }

    double rate_at(std::size_t k) const { return rates_.at(k); }
    // G~(omega) = G(omega) e^{beta omega / 2}
    double rate_tilde_at(std::size_t k) const { return rates_tilde_.at(k); }
    double detailed_balance_residual() const noexcept { return db_residual_; }

    // S_s(omega_k) in the lab basis.
    Operator jump_component(std::size_t s, std::size_t k) const;

    Operator apply(const Operator& f) const;
    Operator apply_eigen(const Operator& fe) const;

    // L(|u_c><u_d|) evaluated at entry (a, b), all in the eigenbasis.
    cplx matrix_element(Eigen::Index a, Eigen::Index b, Eigen::Index c, Eigen::Index d) const;

    // Frequency index of each eigenvector pair.
    const Eigen::MatrixXi& pair_index() const noexcept { return pair_index_; }
    const Operator& jump_eigen(std::size_t s) const { return jumps_eig_.at(s); }

    // sum_{S, omega} G(omega) S(omega)^dag S(omega), eigenbasis.
    const Operator& dissipation_eigen() const noexcept { return k_eig_; }

    // (1/2) sum G~(omega) ||[S(omega), f]||_rho^2 from eigenbasis data.
    double divergence_dirichlet(const Operator& f) const;

    // sum_S ||S||^2 (spectral norm)
    double jump_norm_sq_sum() const noexcept { return jump_norm_sq_; }

    // Tolerance normalizer max(1, ||f||_F^2, sum_S ||S||^2).
    double scale(const Operator& f) const;

private:
    struct Entry {
        Eigen::Index row, col;
        cplx value;
    };

    HermitianOperator h_;
    double beta_;
    RateFunction rate_;
    std::vector<Operator> jumps_;
    std::size_t added_{0};
    Levels levels_;
    BohrData bohr_;
    GibbsState gibbs_;
    Eigen::MatrixXi pair_index_;
    std::vector<double> rates_;
    std::vector<double> rates_tilde_;
    double db_residual_{0.0};
    std::vector<Operator> jumps_eig_;
    std::vector<std::vector<std::vector<Entry>>> blocks_; // [jump][frequency] -> entries
    Operator k_eig_;
    double jump_norm_sq_{0.0};
};

// Jump operators for single-site X_i, Y_i, Z_i on n qubits (self-adjoint set).
std::vector<Operator> default_jumps(int n);

// S(omega) for an arbitrary operator S (same as project_component).
Operator jump_component(const Operator& s, double omega, const Levels& levels, const BohrData& bohr);

Operator apply_davies(const DaviesGenerator& gen, const Operator& f);

cplx kms_inner(const GibbsState& rho, const Operator& a, const Operator& b);

double variance(const GibbsState& rho, const Operator& f);

enum class DirichletMethod { Definitional, Divergence };

double dirichlet_form(const DaviesGenerator& gen, const Operator& f,
                      DirichletMethod method = DirichletMethod::Definitional);

struct HermitianPair {
    Operator g;
    Operator h;
    double omega{0.0};     // representative Bohr frequency used
    double distance{0.0};  // ||f - f(omega)||_F
};

// g = e^{beta omega/4} (f f^dag)^{1/2}, h = e^{-beta omega/4} (f^dag f)^{1/2}.
// Throws PreconditionError if f is not in V_omega within 1e-9 max(1, ||f||_F).
HermitianPair hermitianize_pair(const DaviesGenerator& gen, const Operator& f, double omega);

// (f f^dag)^{1/2} and (f^dag f)^{1/2} from one SVD of f.
std::pair<Operator, Operator> polar_moduli(const Operator& f);

// tr(A g A^dag g) + tr(B h B^dag h) - tr(A f B^dag f^dag) - tr(B f^dag A^dag f),
// g = (f f^dag)^{1/2}, h = (f^dag f)^{1/2}. Nonnegative up to rounding.
double trace_inequality_residual(const Operator& a, const Operator& b, const Operator& f);

struct CoherentCheck {
    double magnitude{0.0};   // |<[H, f], f>_rho|, zero for Hermitian f
    cplx overlap;            // <i[H, f], f>_rho, purely imaginary for every f
};

CoherentCheck coherent_term_check(const DaviesGenerator& gen, const Operator& f);

} // namespace davies
