// classical.cpp: embedded classical chain, bottleneck ratio, Cheeger witness

#include "davies/classical.hpp"

#include "davies/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace davies {

ClassicalChain extract_chain(const DaviesGenerator& gen) { return extract_chain(gen, gen.levels().basis()); }

ClassicalChain extract_chain(const DaviesGenerator& gen, const Operator& basis) {
    const auto n = gen.dim();
    if (basis.rows() != n || basis.cols() != n) throw DimensionError("extract_chain: basis has wrong shape");
    const Operator& h = gen.hamiltonian().matrix();
    const double ortho = max_abs(basis.adjoint() * basis - identity(n));
    if (ortho > 1e-9) {
        throw PreconditionError("extract_chain: basis is not orthonormal (residual " + std::to_string(ortho) + ")");
    }
    ClassicalChain ch;
    ch.basis = basis;
    ch.energies.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) ch.energies(i) = (basis.col(i).adjoint() * h * basis.col(i))(0, 0).real();
    const double resid = max_abs(h * basis - basis * ch.energies.cast<cplx>().asDiagonal());
    if (resid > 1e-9 * std::max(1.0, max_abs(h))) {
        throw PreconditionError("extract_chain: basis is not an eigenbasis of H (residual " +
                                std::to_string(resid) + ")");
    }

    Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(n, n);
    for (const auto& s : gen.jumps()) weight += (basis.adjoint() * s * basis).cwiseAbs2();

    ch.rates = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = ch.energies(j) - ch.energies(i);
            const auto k = gen.bohr().find(w);
            if (!k) throw NumericalError("extract_chain: energy difference " + std::to_string(w) +
                                         " is not a Bohr frequency");
            ch.rates(i, j) = gen.rate_at(*k) * weight(i, j);
        }
        ch.rates(i, i) = -ch.rates.row(i).sum();
    }

    const Operator& rho = gen.gibbs().rho;
    ch.pi.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) ch.pi(i) = (basis.col(i).adjoint() * rho * basis.col(i))(0, 0).real();

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            ch.reversibility_residual = std::max(
                ch.reversibility_residual, std::abs(ch.pi(i) * ch.rates(i, j) - ch.pi(j) * ch.rates(j, i)));
        }
    }

    // <L(|u_j><u_j|), |u_i><u_i|>_rho = <u_i| rho^1/2 L(P_j) rho^1/2 |u_i>
    const Operator& sq = gen.gibbs().sqrt_rho();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Operator pj = basis.col(j) * basis.col(j).adjoint();
        const Operator img = sq * gen.apply(pj) * sq;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) continue;
            const cplx v = (basis.col(i).adjoint() * img * basis.col(i))(0, 0);
            ch.crosscheck_residual = std::max(ch.crosscheck_residual, std::abs(v - ch.pi(i) * ch.rates(i, j)));
        }
    }

    ch.basis_ambiguous = std::any_of(gen.levels().multiplicity.begin(), gen.levels().multiplicity.end(),
                                     [](int m) { return m > 1; });
    return ch;
}

namespace {

// -(Pi^{1/2} Q Pi^{-1/2}), symmetrized.
Eigen::MatrixXd symmetrized_generator(const ClassicalChain& ch) {
    const auto n = ch.size();
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = -std::sqrt(ch.pi(i) / ch.pi(j)) * ch.rates(i, j);
    }
    return 0.5 * (a + a.transpose());
}

double cut_flow(const ClassicalChain& ch, std::uint64_t mask) {
    double q = 0.0;
    for (Eigen::Index i = 0; i < ch.size(); ++i) {
        if (!((mask >> i) & 1U)) continue;
        for (Eigen::Index j = 0; j < ch.size(); ++j) {
            if ((mask >> j) & 1U) continue;
            q += ch.pi(i) * ch.rates(i, j);
        }
    }
    return q;
}

void fill_witness(const ClassicalChain& ch, std::uint64_t mask, CheegerWitness& w) {
    w.mask = mask;
    w.subset.clear();
    w.pi_subset = 0.0;
    for (Eigen::Index i = 0; i < ch.size(); ++i) {
        if ((mask >> i) & 1U) {
            w.subset.push_back(i);
            w.pi_subset += ch.pi(i);
        }
    }
    w.flow = cut_flow(ch, mask);
    w.phi = w.flow / w.pi_subset;
}

} // namespace

double classical_gap(const ClassicalChain& chain) {
    const auto n = chain.size();
    if (n <= 1) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXcd a = symmetrized_generator(chain).cast<cplx>();
    Eigen::VectorXcd root(n);
    for (Eigen::Index i = 0; i < n; ++i) root(i) = std::sqrt(chain.pi(i));
    return smallest_eigenvalue(a, &root).value;
}

double classical_dirichlet(const ClassicalChain& chain, const Eigen::VectorXd& f) {
    if (f.size() != chain.size()) throw DimensionError("classical_dirichlet: F has wrong length");
    double e = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        for (Eigen::Index j = 0; j < f.size(); ++j) {
            if (i == j) continue;
            const double d = f(i) - f(j);
            e += d * d * chain.pi(i) * chain.rates(i, j);
        }
    }
    return 0.5 * e;
}

double classical_variance(const ClassicalChain& chain, const Eigen::VectorXd& f) {
    if (f.size() != chain.size()) throw DimensionError("classical_variance: F has wrong length");
    const double mean = chain.pi.dot(f);
    return chain.pi.dot(f.cwiseAbs2()) - mean * mean;
}

Operator diagonal_observable(const ClassicalChain& chain, const Eigen::VectorXd& f) {
    if (f.size() != chain.size()) throw DimensionError("diagonal_observable: F has wrong length");
    return chain.basis * f.cast<cplx>().asDiagonal() * chain.basis.adjoint();
}

CheegerWitness bottleneck(const ClassicalChain& chain, BottleneckMode mode) {
    const auto n = chain.size();
    if (n < 2) throw DegenerateWitnessError("bottleneck: chain has fewer than two states");
    CheegerWitness w;
    w.mode = mode;
    w.lambda_max = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) w.lambda_max = std::max(w.lambda_max, chain.exit_rate(i));
    w.classical_gap = classical_gap(chain);
    const double half = 0.5 + 1e-12;

    std::uint64_t best_mask = 0;
    double best = std::numeric_limits<double>::infinity();

    if (mode == BottleneckMode::Exhaustive) {
        if (n > kMaxExhaustiveStates) {
            throw DimensionError("bottleneck: exhaustive mode supports at most 20 states, got " + std::to_string(n));
        }
        std::vector<char> in(static_cast<std::size_t>(n), 0);
        double q = 0.0;
        double mass = 0.0;
        const std::uint64_t total = std::uint64_t{1} << n;
        std::uint64_t gray = 0;
        for (std::uint64_t g = 1; g < total; ++g) {
            const auto k = static_cast<Eigen::Index>(std::countr_zero(g));
            gray ^= std::uint64_t{1} << k;
            const bool adding = !in[static_cast<std::size_t>(k)];
            double out_k = 0.0;
            double in_k = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == k) continue;
                if (in[static_cast<std::size_t>(j)]) {
                    in_k += chain.pi(j) * chain.rates(j, k);
                } else {
                    out_k += chain.pi(k) * chain.rates(k, j);
                }
            }
            if (adding) {
                q += out_k - in_k;
                mass += chain.pi(k);
            } else {
                q -= out_k - in_k;
                mass -= chain.pi(k);
            }
            in[static_cast<std::size_t>(k)] = adding ? 1 : 0;
            if (mass <= half && mass > 0.0) {
                const double phi = q / mass;
                if (phi < best) {
                    best = phi;
                    best_mask = gray;
                }
            }
        }
    } else {
        w.upper_bound = true;
        const Eigen::MatrixXd a = symmetrized_generator(chain);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        if (es.info() != Eigen::Success) throw NumericalError("bottleneck: eigensolver failed");
        // Second eigenvector: the lowest one orthogonal to sqrt(pi).
        Eigen::VectorXd root = chain.pi.cwiseSqrt();
        Eigen::Index pick = 0;
        double best_overlap = -1.0;
        for (Eigen::Index c = 0; c < std::min<Eigen::Index>(2, n); ++c) {
            const double ov = std::abs(es.eigenvectors().col(c).dot(root));
            if (ov > best_overlap) {
                best_overlap = ov;
                pick = c;
            }
        }
        const Eigen::Index second = pick == 0 ? 1 : 0;
        Eigen::VectorXd f = es.eigenvectors().col(second).cwiseQuotient(root);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return f(x) < f(y); });
        std::uint64_t prefix = 0;
        const std::uint64_t all = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            prefix |= std::uint64_t{1} << order[static_cast<std::size_t>(k)];
            for (std::uint64_t mask : {prefix, all & ~prefix}) {
                double mass = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if ((mask >> i) & 1U) mass += chain.pi(i);
                }
                if (mass > half || mass <= 0.0) continue;
                const double phi = cut_flow(chain, mask) / mass;
                if (phi < best) {
                    best = phi;
                    best_mask = mask;
                }
            }
        }
    }
    if (best_mask == 0) throw DegenerateWitnessError("bottleneck: no subset with pi(S) <= 1/2");
    fill_witness(chain, best_mask, w);
    w.chain_margin = 2.0 * w.lambda_max * w.classical_gap - w.phi * w.phi;
    return w;
}

CheegerReport cheeger_witness(const DaviesGenerator& gen, int d, const CheegerOptions& opts) {
    const auto rep = spectral_gap_full(gen, GapOptions{false, false, 0});
    if (rep.gap.infinite) throw DegenerateWitnessError("cheeger_witness: generator has no nontrivial modes");
    return cheeger_witness(gen, d, rep.gap.value, opts);
}

CheegerReport cheeger_witness(const DaviesGenerator& gen, int d, double lambda_l, const CheegerOptions& opts) {
    if (d < 1) throw ValidationError("cheeger_witness: D must be >= 1");
    const auto chain = extract_chain(gen);
    BottleneckMode mode = BottleneckMode::Exhaustive;
    if (opts.mode == 2 || (opts.mode == 0 && chain.size() > 16)) mode = BottleneckMode::Sweep;

    CheegerReport rep;
    rep.witness = bottleneck(chain, mode);
    rep.d = d;
    rep.lambda_l = lambda_l;
    const auto n = gen.dim();
    rep.projection = Operator::Zero(n, n);
    for (auto i : rep.witness.subset) rep.projection += chain.basis.col(i) * chain.basis.col(i).adjoint();
    const Operator& p = rep.projection;
    rep.idempotence_residual = max_abs(p * p - p);
    rep.commutator_residual = max_abs(commutator(p, gen.hamiltonian().matrix()));
    rep.dirichlet = dirichlet_form(gen, p);
    rep.variance = variance(gen.gibbs(), p);
    if (rep.variance <= 1e-12) {
        throw DegenerateWitnessError("cheeger_witness: Var(P) = " + std::to_string(rep.variance));
    }

    for (std::size_t k = 0; k < gen.bohr().size(); ++k) rep.g_sup_bohr = std::max(rep.g_sup_bohr, gen.rate_at(k));
    rep.g_sup_closed = gen.rate().sup_bound();
    Operator ssd = Operator::Zero(n, n);
    for (const auto& s : gen.jumps()) ssd += s * s.adjoint();
    rep.jump_sum_norm = spectral_norm(ssd);
    rep.m = rep.g_sup_bohr * rep.jump_sum_norm;
    rep.bound = 4.0 * std::sqrt(static_cast<double>(d) * rep.m * std::max(lambda_l, 0.0)) * rep.variance;
    rep.margin = rep.bound - rep.dirichlet;
    rep.tol = 1e-9 * gen.scale(p) * opts.tol_scale;
    rep.holds = rep.margin >= -rep.tol;
    return rep;
}

Operator rotated_eigenbasis(const DaviesGenerator& gen, Rng& rng) {
    Operator basis = gen.levels().basis();
    for (const auto& members : gen.levels().members) {
        const auto m = static_cast<Eigen::Index>(members.size());
        if (m < 2) continue;
        Operator block(basis.rows(), m);
        for (Eigen::Index c = 0; c < m; ++c) block.col(c) = basis.col(members[static_cast<std::size_t>(c)]);
        const Operator rotated = block * random_unitary(m, rng);
        for (Eigen::Index c = 0; c < m; ++c) basis.col(members[static_cast<std::size_t>(c)]) = rotated.col(c);
    }
    return basis;
}

RotationScan scan_rotations(const DaviesGenerator& gen, int samples, std::uint64_t seed) {
    RotationScan out;
    out.solver_gap = classical_gap(extract_chain(gen));
    out.min_gap = out.max_gap = out.solver_gap;
    for (int s = 0; s < samples; ++s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        const double g = classical_gap(extract_chain(gen, rotated_eigenbasis(gen, rng)));
        out.min_gap = std::min(out.min_gap, g);
        out.max_gap = std::max(out.max_gap, g);
        ++out.samples;
    }
    return out;
}

} // namespace davies
