// gaps.cpp: restricted generator matrices and spectral gaps

#include "davies/gaps.hpp"

#include "davies/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace davies {

namespace {

// Columns are vec(rho^{1/4} X rho^{1/4}) so that <A, B>_rho = col(B)^dag col(A).
Eigen::MatrixXcd kms_columns(const Operator& quarter, const std::vector<Operator>& ops) {
    const auto n = quarter.rows();
    Eigen::MatrixXcd out(n * n, static_cast<Eigen::Index>(ops.size()));
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const Operator x = quarter * ops[i] * quarter;
        out.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXcd>(x.data(), n * n);
    }
    return out;
}

Operator outer(const Operator& basis, Eigen::Index a, Eigen::Index b) {
    return basis.col(a) * basis.col(b).adjoint();
}

double hermitian_tolerance(const DaviesGenerator& gen, double max_entry) {
    return 1e-9 * std::max({1.0, gen.jump_norm_sq_sum(), max_entry});
}

Eigen::MatrixXcd raw_generator_matrix(const DaviesGenerator& gen, const SubspaceBasis& basis) {
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto [c, dd] = basis.pairs[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < d; ++i) {
            const auto [a, b] = basis.pairs[static_cast<std::size_t>(i)];
            m(i, j) = -(basis.scales(j) / basis.scales(i)) * gen.matrix_element(a, b, c, dd);
        }
    }
    return m;
}

} // namespace

Operator SubspaceBasis::element(const DaviesGenerator& gen, std::size_t i) const {
    const auto [a, b] = pairs.at(i);
    return scales(static_cast<Eigen::Index>(i)) * outer(gen.levels().basis(), a, b);
}

SubspaceBasis subspace_basis(const DaviesGenerator& gen, std::size_t k) {
    if (k >= gen.bohr().size()) throw UnknownFrequencyError("subspace_basis: frequency index out of range");
    SubspaceBasis sb;
    sb.index = k;
    sb.omega = gen.bohr().omegas[k];
    const auto& idx = gen.pair_index();
    const auto n = gen.dim();
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            if (idx(a, b) == static_cast<int>(k)) sb.pairs.emplace_back(a, b);
        }
    }
    const auto& p = gen.gibbs().weights;
    sb.scales.resize(static_cast<Eigen::Index>(sb.pairs.size()));
    std::vector<Operator> ops;
    ops.reserve(sb.pairs.size());
    for (std::size_t i = 0; i < sb.pairs.size(); ++i) {
        const auto [a, b] = sb.pairs[i];
        sb.scales(static_cast<Eigen::Index>(i)) = std::pow(p(a) * p(b), -0.25);
        ops.push_back(sb.element(gen, i));
    }
    if (!ops.empty()) {
        const auto cols = kms_columns(gen.gibbs().power(0.25), ops);
        const Eigen::MatrixXcd gram = cols.adjoint() * cols;
        sb.orthonormality_residual =
            (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    }
    return sb;
}

double generator_asymmetry(const DaviesGenerator& gen, const SubspaceBasis& basis) {
    if (basis.size() == 0) return 0.0;
    const auto m = raw_generator_matrix(gen, basis);
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd generator_matrix(const DaviesGenerator& gen, const SubspaceBasis& basis) {
    Eigen::MatrixXcd m = raw_generator_matrix(gen, basis);
    if (m.size() == 0) return m;
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    const double tol = hermitian_tolerance(gen, m.cwiseAbs().maxCoeff());
    if (asym > tol) {
        throw ReversibilityError("generator matrix on V_omega (omega = " + std::to_string(basis.omega) +
                                 ") is not Hermitian: max |M - M^dag| = " + std::to_string(asym));
    }
    return 0.5 * (m + m.adjoint());
}

GapValue smallest_eigenvalue(const Eigen::MatrixXcd& m, const Eigen::VectorXcd* deflate) {
    GapValue out;
    Eigen::MatrixXcd work;
    if (deflate != nullptr) {
        if (deflate->size() != m.rows()) throw DimensionError("smallest_eigenvalue: deflation vector size");
        const double nrm = deflate->norm();
        if (!(nrm > 0.0)) throw ValidationError("smallest_eigenvalue: zero deflation vector");
        if (m.rows() <= 1) {
            out.infinite = true;
            return out;
        }
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(*deflate / nrm);
        const Eigen::MatrixXcd q = qr.householderQ();
        const Eigen::MatrixXcd comp = q.rightCols(m.rows() - 1);
        work = comp.adjoint() * m * comp;
    } else {
        if (m.rows() == 0) {
            out.infinite = true;
            return out;
        }
        work = m;
    }
    work = 0.5 * (work + work.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(work, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("smallest_eigenvalue: solver did not converge");
    out.value = es.eigenvalues()(0);
    const double floor = kZeroGapTol * std::max(1.0, m.cwiseAbs().maxCoeff());
    if (out.value < floor && out.value > -floor) {
        out.value = 0.0;
        out.ergodicity_suspect = true;
    }
    return out;
}

GapValue spectral_gap_at(const DaviesGenerator& gen, std::size_t k) {
    const auto basis = subspace_basis(gen, k);
    const auto m = generator_matrix(gen, basis);
    if (k != gen.bohr().zero_index()) return smallest_eigenvalue(m);
    Eigen::VectorXcd ident = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    const auto& p = gen.gibbs().weights;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto [a, b] = basis.pairs[i];
        if (a == b) ident(static_cast<Eigen::Index>(i)) = std::sqrt(p(a));
    }
    return smallest_eigenvalue(m, &ident);
}

GapValue spectral_gap_omega(const DaviesGenerator& gen, double omega) {
    const auto k = gen.bohr().find(omega);
    if (!k) throw UnknownFrequencyError("spectral_gap_omega: " + std::to_string(omega) + " is not a Bohr frequency");
    return spectral_gap_at(gen, *k);
}

GapReport spectral_gap_full(const DaviesGenerator& gen, const GapOptions& opts) {
    GapReport rep;
    const auto& bohr = gen.bohr();
    rep.omegas = bohr.omegas;
    rep.gap.infinite = true;
    const auto& p = gen.gibbs().weights;
    for (std::size_t k = 0; k < bohr.size(); ++k) {
        const auto basis = subspace_basis(gen, k);
        rep.orthonormality_residual = std::max(rep.orthonormality_residual, basis.orthonormality_residual);
        rep.max_asymmetry = std::max(rep.max_asymmetry, generator_asymmetry(gen, basis));
        const auto m = generator_matrix(gen, basis);
        GapValue g;
        if (k == bohr.zero_index()) {
            Eigen::VectorXcd ident = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
            for (std::size_t i = 0; i < basis.size(); ++i) {
                const auto [a, b] = basis.pairs[i];
                if (a == b) ident(static_cast<Eigen::Index>(i)) = std::sqrt(p(a));
            }
            g = smallest_eigenvalue(m, &ident);
            rep.gap0 = g;
        } else {
            g = smallest_eigenvalue(m);
        }
        rep.per_omega.push_back(g);
        if (g < rep.gap) {
            rep.gap = g;
            rep.minimizing_omega = bohr.omegas[k];
        }
    }
    if (opts.hermitian) {
        rep.hermitian_gap = hermitian_gap(gen, HermitianSubspace::All);
        rep.hermitian_gap0 = hermitian_gap(gen, HermitianSubspace::V0);
    }
    if (opts.superoperator_check && gen.dim() <= opts.superoperator_max_dim) {
        rep.superoperator_gap = superoperator_gap(gen);
    }
    return rep;
}

RayleighValue rayleigh_quotient(const DaviesGenerator& gen, const Operator& f) {
    const double var = variance(gen.gibbs(), f);
    if (var <= 1e-12 * gen.scale(f)) return RayleighValue{0.0, true};
    return RayleighValue{dirichlet_form(gen, f) / var, false};
}

GapValue hermitian_gap(const DaviesGenerator& gen, HermitianSubspace subspace) {
    const auto n = gen.dim();
    const auto& u = gen.levels().basis();
    const auto& p = gen.gibbs().weights;
    const auto& idx = gen.pair_index();
    const int zero = static_cast<int>(gen.bohr().zero_index());
    const double r2 = 1.0 / std::sqrt(2.0);

    std::vector<Operator> basis;
    for (Eigen::Index a = 0; a < n; ++a) {
        basis.push_back(outer(u, a, a) / std::sqrt(p(a)));
        for (Eigen::Index b = a + 1; b < n; ++b) {
            if (subspace == HermitianSubspace::V0 && idx(a, b) != zero) continue;
            const double s = std::pow(p(a) * p(b), -0.25) * r2;
            const Operator ab = outer(u, a, b);
            basis.push_back(s * (ab + ab.adjoint()));
            basis.push_back(cplx(0.0, s) * (ab - ab.adjoint()));
        }
    }
    std::vector<Operator> images;
    images.reserve(basis.size());
    for (const auto& e : basis) images.push_back(gen.apply(e));

    const Operator quarter = gen.gibbs().power(0.25);
    const auto x = kms_columns(quarter, basis);
    const auto y = kms_columns(quarter, images);
    const Eigen::MatrixXd m = -(x.adjoint() * y).real();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > hermitian_tolerance(gen, m.cwiseAbs().maxCoeff())) {
        throw ReversibilityError("hermitian_gap: restricted generator is not symmetric (" +
                                 std::to_string(asym) + ")");
    }
    Eigen::VectorXcd ident(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        ident(static_cast<Eigen::Index>(i)) = (gen.gibbs().rho * basis[i]).trace().real();
    }
    const Eigen::MatrixXcd mc = m.cast<cplx>();
    return smallest_eigenvalue(mc, &ident);
}

GapValue superoperator_gap(const DaviesGenerator& gen) {
    const auto n = gen.dim();
    const auto& u = gen.levels().basis();
    const auto& p = gen.gibbs().weights;
    std::vector<Operator> basis;
    basis.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) basis.push_back(std::pow(p(a) * p(b), -0.25) * outer(u, a, b));
    }
    std::vector<Operator> images;
    images.reserve(basis.size());
    for (const auto& e : basis) images.push_back(gen.apply(e));
    const Operator quarter = gen.gibbs().power(0.25);
    const auto x = kms_columns(quarter, basis);
    const auto y = kms_columns(quarter, images);
    const Eigen::MatrixXcd m = -(x.adjoint() * y);
    Eigen::VectorXcd ident(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        ident(static_cast<Eigen::Index>(i)) = std::conj((gen.gibbs().rho * basis[i]).trace());
    }
    return smallest_eigenvalue(m, &ident);
}

} // namespace davies
