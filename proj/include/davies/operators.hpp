// operators.hpp: Hamiltonians and jump operators: Pauli strings, field
// perturbations, and the periodic XY+Z ring with its closed-form spectrum.
//
// Tensor ordering: site 1 is the most significant qubit, so the basis index of
// |b_1 b_2 ... b_n> is sum_i b_i 2^(n-i).

#pragma once

#include "davies/linalg.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace davies {

class PauliString {
public:
    // Letters from {I, X, Y, Z}; one per site.
    explicit PauliString(std::string_view letters);

    // Single-site operator P_site on n qubits (site is 1-based).
    static PauliString single(int n, int site, char letter);

    int qubits() const noexcept { return static_cast<int>(letters_.size()); }
    const std::string& letters() const noexcept { return letters_; }
    char at(int site) const { return letters_.at(static_cast<std::size_t>(site - 1)); }

    Operator matrix() const;

    friend bool operator==(const PauliString&, const PauliString&) = default;

private:
    std::string letters_;
};

// 2x2 Pauli matrix for 'I', 'X', 'Y' or 'Z'.
Operator pauli_matrix(char letter);

class HermitianOperator {
public:
    // Throws ValidationError if not Hermitian within rel_tol * max|entry| or
    // if any entry is non-finite.
    explicit HermitianOperator(Operator m, double rel_tol = 1e-12);

    const Operator& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

    // n such that dim == 2^n, or nullopt.
    std::optional<int> qubits() const noexcept;

private:
    Operator m_;
};

struct PauliTerm {
    double coeff{0.0};
    PauliString string;
};

HermitianOperator build_pauli_hamiltonian(std::span<const PauliTerm> terms, int n);

struct FieldPerturbation {
    HermitianOperator hamiltonian;
    // P is a real multiple of the identity; the field then only shifts the
    // spectrum and the genericity argument does not apply.
    bool field_is_scalar{false};
};

// H0 + sum_i h_i P_i with P_i = I^{(i-1)} (x) P (x) I^{(n-i)}.
FieldPerturbation build_field_perturbation(const HermitianOperator& h0,
                                           const HermitianOperator& p,
                                           const Eigen::VectorXd& h);

// J sum_i X_i Y_{i+1} + h sum_i Z_i with Y_{n+1} = Y_1.
HermitianOperator build_xyz_ring(double j, double h, int n);

// Closed-form spectrum of build_xyz_ring, ascending. Valid for odd n and h != 0;
// uses H(J, h) = h * H(J/h, 1).
std::vector<double> xyz_ring_spectrum(double j, double h, int n);

// --------------------------------------------------------------------------
// Model specifications (parsed from JSON by io.hpp)

enum class ModelKind { PauliSum, Dense, FieldPerturbed, XyzRing };

struct FieldSpec {
    char axis{'X'};
    Eigen::VectorXd h;
};

struct ModelSpec {
    ModelKind kind{ModelKind::PauliSum};
    int n{1};
    std::vector<PauliTerm> terms;   // pauli-sum, and base H0 for field-perturbed
    std::optional<Operator> matrix; // dense
    std::optional<FieldSpec> field; // field-perturbed
    double xyz_j{0.0};
    double xyz_h{1.0};
};

HermitianOperator build_model(const ModelSpec& spec);

} // namespace davies
