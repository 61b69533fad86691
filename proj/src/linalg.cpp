// linalg.cpp: dense complex matrix helpers

#include "davies/linalg.hpp"

#include "davies/errors.hpp"

#include <algorithm>
#include <cmath>

namespace davies {

double max_abs(const Operator& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Operator& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(max_abs(a), 1e-300);
    return max_abs(a - a.adjoint()) <= rel_tol * scale;
}

bool all_finite(const Operator& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
        }
    }
    return true;
}

double spectral_norm(const Operator& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Operator> svd(a);
    return svd.singularValues()(0);
}

Operator psd_sqrt(const Operator& a, double clamp_rel) {
    if (a.rows() != a.cols()) throw DimensionError("psd_sqrt: matrix must be square");
    if (a.size() == 0) return a;
    const Operator sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es(sym);
    if (es.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigensolver did not converge");
    Eigen::VectorXd w = es.eigenvalues();
    const double top = std::max(w.maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) < -clamp_rel * top - 1e-300) {
            throw NumericalError("psd_sqrt: matrix has a significantly negative eigenvalue");
        }
        w(i) = std::sqrt(std::max(w(i), 0.0));
    }
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

} // namespace davies
