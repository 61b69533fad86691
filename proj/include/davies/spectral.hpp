// spectral.hpp: eigendecomposition, degenerate-level clustering, Bohr
// frequencies, V_omega projections, Gibbs states and arithmetic progressions

#pragma once

#include "davies/linalg.hpp"
#include "davies/operators.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace davies {

struct SpectralData {
    Eigen::VectorXd values; // ascending
    Operator vectors;       // orthonormal columns

    Eigen::Index dim() const noexcept { return values.size(); }
};

// Throws NumericalError if the solver fails or the reconstruction residual
// exceeds 1e-10 * max(1, max|H|).
SpectralData eigendecompose(const HermitianOperator& h);

// Distinct eigenvalues of H. Consecutive eigenvalues within `tol` share a
// level (transitive chaining over the sorted spectrum); the level value is the
// multiplicity-weighted mean.
struct Levels {
    SpectralData spectrum;
    std::vector<double> values;                       // ascending
    std::vector<int> multiplicity;
    std::vector<std::vector<Eigen::Index>> members;   // eigenvector columns per level
    std::vector<int> level_of;                        // level index per column
    double tol{0.0};

    std::size_t size() const noexcept { return values.size(); }
    Eigen::Index dim() const noexcept { return spectrum.dim(); }

    // Spectral projector Pi_lambda for level k, built on demand.
    Operator projector(std::size_t k) const;

    // H reassembled as sum_lambda lambda Pi_lambda.
    Operator clustered_hamiltonian() const;

    const Operator& basis() const noexcept { return spectrum.vectors; }
    Operator to_eigen(const Operator& lab) const;
    Operator to_lab(const Operator& eig) const;
};

// 1e-9 * max(1, max |eigenvalue|)
double default_level_tol(const SpectralData& sd);

Levels cluster_levels(const SpectralData& sd, double tol);

struct BohrData {
    std::vector<double> omegas;                            // ascending, symmetric about 0
    std::vector<std::vector<std::pair<int, int>>> pairs;   // level pairs (l1, l2), l1 - l2 = omega
    Eigen::MatrixXi index;                                 // level pair -> omega index
    double tol{0.0};

    std::size_t size() const noexcept { return omegas.size(); }
    std::size_t zero_index() const noexcept { return omegas.size() / 2; }

    // Index of the frequency group matching omega within tol, if any.
    std::optional<std::size_t> find(double omega) const;

    // Index of the mirrored frequency -omega.
    std::size_t mirror(std::size_t k) const noexcept { return omegas.size() - 1 - k; }

private:
    friend BohrData bohr_frequencies(const Levels&, double);
    std::vector<std::pair<double, double>> spans_; // raw difference range per group
};

// All pairwise level differences, grouped by transitive chaining at `tol`.
BohrData bohr_frequencies(const Levels& levels, double tol);

// Per-eigenvector-pair frequency index: out(a, b) = index(level_of[a], level_of[b]).
Eigen::MatrixXi pair_frequency_index(const Levels& levels, const BohrData& bohr);

struct Component {
    Operator value;
    bool matched{false};      // omega was a Bohr frequency within tolerance
    std::size_t index{0};
    double omega{0.0};        // representative frequency used
};

// f(omega) = sum_{l1 - l2 = omega} Pi_l1 f Pi_l2. Returns the zero operator
// with matched = false when omega is not a Bohr frequency.
Component project_component(const Operator& f, double omega, const Levels& levels,
                            const BohrData& bohr);

Operator project_component_at(const Operator& f, std::size_t k, const Levels& levels,
                              const BohrData& bohr);

// Every component f(omega), indexed like bohr.omegas.
std::vector<Operator> decompose(const Operator& f, const Levels& levels, const BohrData& bohr);

struct GibbsState {
    double beta{0.0};
    Operator rho;                 // lab basis
    Eigen::VectorXd weights;      // rho eigenvalue per eigenvector column
    std::vector<double> level_weights; // rho eigenvalue per level
    Operator vectors;             // eigenbasis the weights refer to

    Operator power(double m) const;
    const Operator& sqrt_rho() const noexcept { return sqrt_; }
    Eigen::Index dim() const noexcept { return weights.size(); }

private:
    friend GibbsState gibbs_state(const Levels&, double);
    Operator sqrt_;
};

// rho = sum_lambda e^{-beta lambda} Pi_lambda / Z, evaluated with a max shift.
GibbsState gibbs_state(const Levels& levels, double beta);

// --------------------------------------------------------------------------
// Arithmetic progressions

struct APReport {
    int length{0};
    double a{0.0};
    double b{0.0};        // 0 when length < 2 (no proper progression)
    double value_tol{0.0};
    double sep_tol{0.0};

    bool has_witness() const noexcept { return length >= 2; }
};

struct APTolerances {
    double value_tol{0.0};
    double sep_tol{0.0};
};

// value_tol = 1e-9 * range, sep_tol = 1e-7 * range (range = 1 for a flat spectrum).
APTolerances default_ap_tolerances(std::span<const double> spectrum);

// Sorted distinct values, merging by transitive chaining at tol.
std::vector<double> distinct_values(std::span<const double> spectrum, double tol);

bool has_repeated_values(std::span<const double> spectrum, double tol);

// Longest proper progression a, a+b, ..., a+(L-1)b with |b| > sep_tol inside
// the distinct values of `spectrum`. max_len <= 0 means no cap. A spectrum with
// one distinct value reports length 1.
APReport find_proper_ap(std::span<const double> spectrum, int max_len, double value_tol,
                        double sep_tol);

// Longest run v, v + |omega|, v + 2|omega|, ... inside the distinct values.
int longest_ap_with_difference(std::span<const double> spectrum, double omega, double value_tol);

} // namespace davies
