// operators.cpp: Pauli strings and Hamiltonian builders

#include "davies/operators.hpp"

#include "davies/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace davies {

namespace {

constexpr int kMaxQubits = 12;

void check_qubits(int n, const char* where) {
    if (n < 1 || n > kMaxQubits) {
        throw ValidationError(std::string(where) + ": qubit count must be in [1, 12], got " +
                              std::to_string(n));
    }
}

} // namespace

Operator pauli_matrix(char letter) {
    Operator m = Operator::Zero(2, 2);
    switch (letter) {
    case 'I':
        m(0, 0) = 1.0;
        m(1, 1) = 1.0;
        break;
    case 'X':
        m(0, 1) = 1.0;
        m(1, 0) = 1.0;
        break;
    case 'Y':
        m(0, 1) = cplx(0.0, -1.0);
        m(1, 0) = cplx(0.0, 1.0);
        break;
    case 'Z':
        m(0, 0) = 1.0;
        m(1, 1) = -1.0;
        break;
    default:
        throw ValidationError(std::string("unknown Pauli letter '") + letter + "'");
    }
    return m;
}

PauliString::PauliString(std::string_view letters) : letters_(letters) {
    check_qubits(static_cast<int>(letters_.size()), "PauliString");
    for (char c : letters_) {
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
            throw ValidationError("PauliString: invalid letter '" + std::string(1, c) + "' in \"" +
                                  letters_ + "\"");
        }
    }
}

PauliString PauliString::single(int n, int site, char letter) {
    check_qubits(n, "PauliString::single");
    if (site < 1 || site > n) {
        throw ValidationError("PauliString::single: site " + std::to_string(site) +
                              " out of range for n = " + std::to_string(n));
    }
    std::string s(static_cast<std::size_t>(n), 'I');
    s[static_cast<std::size_t>(site - 1)] = letter;
    return PauliString(s);
}

Operator PauliString::matrix() const {
    // Pauli strings are monomial: one nonzero per row. Build that directly
    // rather than through repeated Kronecker products.
    const int n = qubits();
    const Eigen::Index dim = Eigen::Index{1} << n;
    Operator m = Operator::Zero(dim, dim);
    for (Eigen::Index row = 0; row < dim; ++row) {
        Eigen::Index col = row;
        cplx phase{1.0, 0.0};
        for (int site = 1; site <= n; ++site) {
            const int shift = n - site;
            const int bit = static_cast<int>((row >> shift) & 1);
            switch (letters_[static_cast<std::size_t>(site - 1)]) {
            case 'X':
                col ^= (Eigen::Index{1} << shift);
                break;
            case 'Y':
                // <0|Y|1> = -i, <1|Y|0> = i
                col ^= (Eigen::Index{1} << shift);
                phase *= (bit == 0) ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
                break;
            case 'Z':
                if (bit == 1) phase = -phase;
                break;
            default:
                break;
            }
        }
        m(row, col) = phase;
    }
    return m;
}

HermitianOperator::HermitianOperator(Operator m, double rel_tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw DimensionError("HermitianOperator: matrix is " + std::to_string(m_.rows()) + "x" +
                             std::to_string(m_.cols()));
    }
    if (m_.rows() == 0) throw DimensionError("HermitianOperator: empty matrix");
    if (!all_finite(m_)) throw ValidationError("HermitianOperator: non-finite entry");
    if (!is_hermitian(m_, rel_tol)) {
        throw ValidationError("HermitianOperator: matrix is not Hermitian (max |A - A^dag| = " +
                              std::to_string(max_abs(m_ - m_.adjoint())) + ")");
    }
}

std::optional<int> HermitianOperator::qubits() const noexcept {
    const auto d = dim();
    if (d <= 0 || (d & (d - 1)) != 0) return std::nullopt;
    int n = 0;
    while ((Eigen::Index{1} << n) < d) ++n;
    return n;
}

HermitianOperator build_pauli_hamiltonian(std::span<const PauliTerm> terms, int n) {
    check_qubits(n, "build_pauli_hamiltonian");
    const Eigen::Index dim = Eigen::Index{1} << n;
    Operator h = Operator::Zero(dim, dim);
    for (const auto& t : terms) {
        if (t.string.qubits() != n) {
            throw DimensionError("build_pauli_hamiltonian: term \"" + t.string.letters() +
                                 "\" has " + std::to_string(t.string.qubits()) +
                                 " sites, expected " + std::to_string(n));
        }
        if (!std::isfinite(t.coeff)) {
            throw ValidationError("build_pauli_hamiltonian: non-finite coefficient for \"" +
                                  t.string.letters() + "\"");
        }
        h += t.coeff * t.string.matrix();
    }
    return HermitianOperator(std::move(h));
}

FieldPerturbation build_field_perturbation(const HermitianOperator& h0,
                                           const HermitianOperator& p,
                                           const Eigen::VectorXd& h) {
    if (p.dim() != 2) throw DimensionError("build_field_perturbation: P must be 2x2");
    const auto n = static_cast<int>(h.size());
    check_qubits(n, "build_field_perturbation");
    if (h0.dim() != (Eigen::Index{1} << n)) {
        throw DimensionError("build_field_perturbation: dim(H0) = " + std::to_string(h0.dim()) +
                             " but len(h) = " + std::to_string(n));
    }
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (!std::isfinite(h(i))) throw ValidationError("build_field_perturbation: non-finite h");
    }

    const Operator& pm = p.matrix();
    const cplx mean = 0.5 * (pm(0, 0) + pm(1, 1));
    const bool scalar = max_abs(pm - mean * Operator::Identity(2, 2)) <=
                        1e-12 * std::max(1.0, max_abs(pm));

    Operator out = h0.matrix();
    for (int site = 1; site <= n; ++site) {
        const double hi = h(site - 1);
        if (hi == 0.0) continue;
        const Operator left = Operator::Identity(Eigen::Index{1} << (site - 1),
                                                 Eigen::Index{1} << (site - 1));
        const Operator right = Operator::Identity(Eigen::Index{1} << (n - site),
                                                  Eigen::Index{1} << (n - site));
        out += hi * kron(kron(left, pm), right);
    }
    return FieldPerturbation{HermitianOperator(std::move(out)), scalar};
}

HermitianOperator build_xyz_ring(double j, double h, int n) {
    if (n < 2) throw ValidationError("build_xyz_ring: n must be >= 2, got " + std::to_string(n));
    check_qubits(n, "build_xyz_ring");
    if (!std::isfinite(j) || !std::isfinite(h)) throw ValidationError("build_xyz_ring: non-finite coupling");
    std::vector<PauliTerm> terms;
    for (int i = 1; i <= n; ++i) {
        const int next = (i % n) + 1;
        std::string s(static_cast<std::size_t>(n), 'I');
        s[static_cast<std::size_t>(i - 1)] = 'X';
        s[static_cast<std::size_t>(next - 1)] = 'Y';
        terms.push_back({j, PauliString(s)});
        terms.push_back({h, PauliString::single(n, i, 'Z')});
    }
    return build_pauli_hamiltonian(terms, n);
}

std::vector<double> xyz_ring_spectrum(double j, double h, int n) {
    if (n < 2) throw ValidationError("xyz_ring_spectrum: n must be >= 2");
    check_qubits(n, "xyz_ring_spectrum");
    if (h == 0.0) {
        throw UnsupportedError("xyz_ring_spectrum: h = 0 cannot be normalized; "
                               "use eigendecompose(build_xyz_ring(J, 0, n))");
    }
    if (n % 2 == 0) {
        throw UnsupportedError("xyz_ring_spectrum: closed form holds for odd n only; "
                               "use eigendecompose(build_xyz_ring(J, h, n))");
    }
    const double jr = j / h;
    std::vector<double> m(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        // k = n gives sin(2 pi) = 0 exactly.
        const double mu = (k == n) ? 0.0 : std::sin(2.0 * std::numbers::pi * k / n);
        m[static_cast<std::size_t>(k - 1)] = jr * mu - std::sqrt(jr * jr * mu * mu + 1.0);
    }
    const std::size_t count = std::size_t{1} << n;
    std::vector<double> out(count);
    for (std::size_t z = 0; z < count; ++z) {
        double e = 0.0;
        for (int k = 0; k < n; ++k) {
            e += ((z >> k) & 1U) ? -m[static_cast<std::size_t>(k)] : m[static_cast<std::size_t>(k)];
        }
        out[z] = h * e;
    }
    std::sort(out.begin(), out.end());
    return out;
}

HermitianOperator build_model(const ModelSpec& spec) {
    switch (spec.kind) {
    case ModelKind::PauliSum:
        return build_pauli_hamiltonian(spec.terms, spec.n);
    case ModelKind::Dense: {
        if (!spec.matrix) throw ValidationError("dense model requires a matrix");
        HermitianOperator h(*spec.matrix);
        if (h.dim() != (Eigen::Index{1} << spec.n)) {
            throw DimensionError("dense model: matrix dimension does not equal 2^n");
        }
        return h;
    }
    case ModelKind::FieldPerturbed: {
        if (!spec.field) throw ValidationError("field-perturbed model requires a field");
        const auto base = build_pauli_hamiltonian(spec.terms, spec.n);
        return build_field_perturbation(base, HermitianOperator(pauli_matrix(spec.field->axis)),
                                        spec.field->h)
            .hamiltonian;
    }
    case ModelKind::XyzRing:
        return build_xyz_ring(spec.xyz_j, spec.xyz_h, spec.n);
    }
    throw ValidationError("unknown model kind");
}

} // namespace davies
