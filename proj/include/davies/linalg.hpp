// linalg.hpp: dense complex matrix helpers used across the library

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace davies {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;

// Largest |entry|; 0 for an empty matrix.
double max_abs(const Operator& a);

// max |A - A^dagger| <= rel_tol * max(max|A|, tiny)
bool is_hermitian(const Operator& a, double rel_tol = 1e-12);

bool all_finite(const Operator& a);

// Spectral (2-)norm.
double spectral_norm(const Operator& a);

// Principal square root of a Hermitian PSD matrix. Negative eigenvalues down to
// -clamp_rel * max eigenvalue are treated as rounding and set to zero.
Operator psd_sqrt(const Operator& a, double clamp_rel = 1e-12);

Operator commutator(const Operator& a, const Operator& b);

Operator kron(const Operator& a, const Operator& b);

inline Operator identity(Eigen::Index n) { return Operator::Identity(n, n); }

} // namespace davies
