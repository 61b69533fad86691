// generator.cpp: Davies generator, KMS geometry, hermitianization

#include "davies/generator.hpp"

#include "davies/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace davies {

// --------------------------------------------------------------------------
// Rate functions

RateFunction RateFunction::glauber(double beta) {
    if (!std::isfinite(beta)) throw ValidationError("glauber: beta must be finite");
    return RateFunction(RateKind::Glauber, beta);
}

RateFunction RateFunction::metropolis(double beta) {
    if (!std::isfinite(beta)) throw ValidationError("metropolis: beta must be finite");
    return RateFunction(RateKind::Metropolis, beta);
}

RateFunction RateFunction::table(double beta, std::vector<std::pair<double, double>> entries) {
    if (!std::isfinite(beta)) throw ValidationError("table: beta must be finite");
    for (const auto& [w, g] : entries) {
        if (!std::isfinite(w) || !std::isfinite(g)) throw ValidationError("table: non-finite entry");
        if (g < 0.0) throw ValidationError("table: negative rate at omega = " + std::to_string(w));
    }
    std::sort(entries.begin(), entries.end());
    RateFunction rf(RateKind::Table, beta);
    rf.table_ = std::move(entries);
    return rf;
}

double RateFunction::operator()(double omega) const {
    switch (kind_) {
    case RateKind::Glauber: {
        const double x = beta_ * omega;
        if (x > 0.0) {
            const double e = std::exp(-x);
            return e / (1.0 + e);
        }
        return 1.0 / (1.0 + std::exp(x));
    }
    case RateKind::Metropolis:
        return std::min(1.0, std::exp(-beta_ * omega));
    case RateKind::Table: {
        auto it = std::lower_bound(table_.begin(), table_.end(), std::make_pair(omega, -1.0));
        double best = std::numeric_limits<double>::infinity();
        double value = 0.0;
        for (auto cand : {it, it == table_.begin() ? it : std::prev(it)}) {
            if (cand == table_.end()) continue;
            const double d = std::abs(cand->first - omega);
            if (d < best) {
                best = d;
                value = cand->second;
            }
        }
        if (best > 1e-9) {
            throw UnknownFrequencyError("rate table has no entry for omega = " + std::to_string(omega));
        }
        return value;
    }
    }
    return 0.0;
}

double RateFunction::detailed_balance_residual(std::span<const double> omegas) const {
    double worst = 0.0;
    for (double w : omegas) {
        const double lhs = (*this)(w);
        const double rhs = (*this)(-w) * std::exp(-beta_ * w);
        const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
    return worst;
}

double RateFunction::sup_bound() const {
    if (kind_ != RateKind::Table) return 1.0;
    double m = 0.0;
    for (const auto& e : table_) m = std::max(m, std::abs(e.second));
    return m;
}

double transition_rate(const RateFunction& rf, double omega) {
    if (!std::isfinite(omega)) throw ValidationError("transition_rate: omega must be finite");
    return rf(omega);
}

// --------------------------------------------------------------------------
// Generator

namespace {

Levels make_levels(const HermitianOperator& h, const GeneratorOptions& opts) {
    const auto sd = eigendecompose(h);
    const double tol = opts.level_tol > 0.0 ? opts.level_tol : default_level_tol(sd);
    return cluster_levels(sd, tol);
}

} // namespace

DaviesGenerator::DaviesGenerator(HermitianOperator h, double beta, RateFunction rate,
                                 std::vector<Operator> jumps, GeneratorOptions opts)
    : h_(std::move(h)),
      beta_(beta),
      rate_(std::move(rate)),
      levels_(make_levels(h_, opts)),
      bohr_(bohr_frequencies(levels_, opts.bohr_tol > 0.0 ? opts.bohr_tol : levels_.tol)),
      gibbs_(gibbs_state(levels_, beta)) {
    if (!std::isfinite(beta)) throw ValidationError("DaviesGenerator: beta must be finite");
    if (rate_.beta() != beta) {
        throw ValidationError("DaviesGenerator: rate function beta differs from generator beta");
    }
    const auto n = dim();

    const std::size_t original = jumps.size();
    for (std::size_t s = 0; s < original; ++s) {
        if (jumps[s].rows() != n || jumps[s].cols() != n) {
            throw DimensionError("DaviesGenerator: jump operator " + std::to_string(s) +
                                 " has wrong dimension");
        }
        if (!all_finite(jumps[s])) throw ValidationError("DaviesGenerator: non-finite jump entry");
    }
    jumps_ = std::move(jumps);
    for (std::size_t s = 0; s < original; ++s) {
        const Operator adj = jumps_[s].adjoint();
        const bool present = std::any_of(jumps_.begin(), jumps_.end(), [&](const Operator& t) {
            return max_abs(t - adj) <= 1e-12;
        });
        if (!present) {
            jumps_.push_back(adj);
            ++added_;
        }
    }

    rates_.resize(bohr_.size());
    rates_tilde_.resize(bohr_.size());
    for (std::size_t k = 0; k < bohr_.size(); ++k) {
        const double w = bohr_.omegas[k];
        rates_[k] = rate_(w);
        if (rates_[k] < 0.0) throw ValidationError("DaviesGenerator: negative rate at a Bohr frequency");
        rates_tilde_[k] = rates_[k] * std::exp(0.5 * beta_ * w);
    }
    db_residual_ = rate_.detailed_balance_residual(bohr_.omegas);
    if (opts.require_detailed_balance && db_residual_ > opts.detailed_balance_tol) {
        throw ValidationError("DaviesGenerator: rate function violates detailed balance (residual " +
                              std::to_string(db_residual_) + ")");
    }

    pair_index_ = pair_frequency_index(levels_, bohr_);
    jumps_eig_.reserve(jumps_.size());
    blocks_.resize(jumps_.size());
    for (std::size_t s = 0; s < jumps_.size(); ++s) {
        jumps_eig_.push_back(levels_.to_eigen(jumps_[s]));
        const Operator& se = jumps_eig_.back();
        auto& per_freq = blocks_[s];
        per_freq.resize(bohr_.size());
        for (Eigen::Index b = 0; b < n; ++b) {
            for (Eigen::Index a = 0; a < n; ++a) {
                if (se(a, b) == cplx(0.0, 0.0)) continue;
                per_freq[static_cast<std::size_t>(pair_index_(a, b))].push_back({a, b, se(a, b)});
            }
        }
        const double nrm = spectral_norm(jumps_[s]);
        jump_norm_sq_ += nrm * nrm;
    }

    // K_xy = sum_s sum_c G(omega_cx) [omega_cx == omega_cy] conj(S_cx) S_cy
    k_eig_ = Operator::Zero(n, n);
    for (const auto& se : jumps_eig_) {
        for (Eigen::Index x = 0; x < n; ++x) {
            for (Eigen::Index y = 0; y < n; ++y) {
                cplx acc{0.0, 0.0};
                for (Eigen::Index c = 0; c < n; ++c) {
                    const int kx = pair_index_(c, x);
                    if (kx != pair_index_(c, y)) continue;
                    acc += rates_[static_cast<std::size_t>(kx)] * std::conj(se(c, x)) * se(c, y);
                }
                k_eig_(x, y) += acc;
            }
        }
    }
}

Operator DaviesGenerator::jump_component(std::size_t s, std::size_t k) const {
    Operator out = Operator::Zero(dim(), dim());
    for (const auto& e : blocks_.at(s).at(k)) out(e.row, e.col) = e.value;
    return levels_.to_lab(out);
}

Operator DaviesGenerator::apply_eigen(const Operator& fe) const {
    const auto n = dim();
    if (fe.rows() != n || fe.cols() != n) throw DimensionError("apply: dimension mismatch");
    Operator out = -0.5 * (k_eig_ * fe + fe * k_eig_);

    // sum_k G_k S_k^dag (f S_k), with S_k sparse.
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
    std::vector<Eigen::Index> cols;
    Operator w;
    for (const auto& per_freq : blocks_) {
        for (std::size_t k = 0; k < per_freq.size(); ++k) {
            const auto& entries = per_freq[k];
            const double g = rates_[k];
            if (entries.empty() || g == 0.0) continue;
            cols.clear();
            for (const auto& e : entries) {
                auto& sl = slot[static_cast<std::size_t>(e.col)];
                if (sl < 0) {
                    sl = static_cast<Eigen::Index>(cols.size());
                    cols.push_back(e.col);
                }
            }
            w.setZero(n, static_cast<Eigen::Index>(cols.size()));
            for (const auto& e : entries) {
                w.col(slot[static_cast<std::size_t>(e.col)]) += fe.col(e.row) * e.value;
            }
            // (S^dag W)(i, :) += conj(S(a, i)) W(a, :)
            for (const auto& e : entries) {
                const cplx c = g * std::conj(e.value);
                for (std::size_t j = 0; j < cols.size(); ++j) {
                    out(e.col, cols[j]) += c * w(e.row, static_cast<Eigen::Index>(j));
                }
            }
            for (auto c : cols) slot[static_cast<std::size_t>(c)] = -1;
        }
    }
    return out;
}

Operator DaviesGenerator::apply(const Operator& f) const {
    return levels_.to_lab(apply_eigen(levels_.to_eigen(f)));
}

cplx DaviesGenerator::matrix_element(Eigen::Index a, Eigen::Index b, Eigen::Index c,
                                     Eigen::Index d) const {
    cplx acc{0.0, 0.0};
    const int k = pair_index_(c, a);
    if (k == pair_index_(d, b)) {
        const double g = rates_[static_cast<std::size_t>(k)];
        if (g != 0.0) {
            cplx sum{0.0, 0.0};
            for (const auto& se : jumps_eig_) sum += std::conj(se(c, a)) * se(d, b);
            acc += g * sum;
        }
    }
    if (b == d) acc -= 0.5 * k_eig_(a, c);
    if (a == c) acc -= 0.5 * k_eig_(d, b);
    return acc;
}

double DaviesGenerator::divergence_dirichlet(const Operator& f) const {
    const auto n = dim();
    if (f.rows() != n || f.cols() != n) throw DimensionError("dirichlet_form: dimension mismatch");
    const Operator fe = levels_.to_eigen(f);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = std::sqrt(gibbs_.weights(i));
    const Eigen::MatrixXd weight = w * w.transpose();

    double total = 0.0;
    Operator c(n, n);
    for (const auto& per_freq : blocks_) {
        for (std::size_t k = 0; k < per_freq.size(); ++k) {
            const auto& entries = per_freq[k];
            if (entries.empty() || rates_tilde_[k] == 0.0) continue;
            c.setZero();
            for (const auto& e : entries) {
                c.row(e.row) += e.value * fe.row(e.col);
                c.col(e.col) -= fe.col(e.row) * e.value;
            }
            total += rates_tilde_[k] * (weight.array() * c.cwiseAbs2().array()).sum();
        }
    }
    return 0.5 * total;
}

double DaviesGenerator::scale(const Operator& f) const {
    return std::max({1.0, f.squaredNorm(), jump_norm_sq_});
}

// --------------------------------------------------------------------------

std::vector<Operator> default_jumps(int n) {
    std::vector<Operator> out;
    for (int site = 1; site <= n; ++site) {
        for (char p : {'X', 'Y', 'Z'}) out.push_back(PauliString::single(n, site, p).matrix());
    }
    return out;
}

Operator jump_component(const Operator& s, double omega, const Levels& levels, const BohrData& bohr) {
    return project_component(s, omega, levels, bohr).value;
}

Operator apply_davies(const DaviesGenerator& gen, const Operator& f) { return gen.apply(f); }

cplx kms_inner(const GibbsState& rho, const Operator& a, const Operator& b) {
    if (a.rows() != rho.dim() || b.rows() != rho.dim() || a.cols() != rho.dim() ||
        b.cols() != rho.dim()) {
        throw DimensionError("kms_inner: dimension mismatch");
    }
    const Operator& s = rho.sqrt_rho();
    // tr(s A s B^dag) = sum_ij (s A s)_ij conj(B_ij)
    const Operator sas = s * a * s;
    return (sas.array() * b.conjugate().array()).sum();
}

double variance(const GibbsState& rho, const Operator& f) {
    const cplx ff = kms_inner(rho, f, f);
    const cplx mean = (rho.rho * f).trace();
    const cplx mean_adj = (rho.rho * f.adjoint()).trace();
    return (ff - mean * mean_adj).real();
}

double dirichlet_form(const DaviesGenerator& gen, const Operator& f, DirichletMethod method) {
    if (f.rows() != gen.dim() || f.cols() != gen.dim()) {
        throw DimensionError("dirichlet_form: dimension mismatch");
    }
    if (method == DirichletMethod::Divergence) return gen.divergence_dirichlet(f);
    return -kms_inner(gen.gibbs(), gen.apply(f), f).real();
}

std::pair<Operator, Operator> polar_moduli(const Operator& f) {
    if (f.rows() != f.cols()) throw DimensionError("polar_moduli: matrix must be square");
    Eigen::JacobiSVD<Operator> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Operator left = svd.matrixU() * sv.asDiagonal() * svd.matrixU().adjoint();
    Operator right = svd.matrixV() * sv.asDiagonal() * svd.matrixV().adjoint();
    return {0.5 * (left + left.adjoint()), 0.5 * (right + right.adjoint())};
}

HermitianPair hermitianize_pair(const DaviesGenerator& gen, const Operator& f, double omega) {
    if (f.rows() != gen.dim() || f.cols() != gen.dim()) {
        throw DimensionError("hermitianize_pair: dimension mismatch");
    }
    const auto k = gen.bohr().find(omega);
    if (!k) {
        throw PreconditionError("hermitianize_pair: " + std::to_string(omega) +
                                " is not a Bohr frequency");
    }
    const Operator proj = project_component_at(f, *k, gen.levels(), gen.bohr());
    const double dist = (f - proj).norm();
    if (dist > 1e-9 * std::max(1.0, f.norm())) {
        throw PreconditionError("hermitianize_pair: f is not in V_omega (distance " +
                                std::to_string(dist) + ")");
    }
    const double w = gen.bohr().omegas[*k];
    auto [left, right] = polar_moduli(f);
    return HermitianPair{std::exp(0.25 * gen.beta() * w) * left,
                         std::exp(-0.25 * gen.beta() * w) * right, w, dist};
}

double trace_inequality_residual(const Operator& a, const Operator& b, const Operator& f) {
    const auto n = f.rows();
    if (f.cols() != n || a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n) {
        throw DimensionError("trace_inequality_residual: operands must be square of equal size");
    }
    const auto [g, h] = polar_moduli(f);
    const cplx t1 = (a * g * a.adjoint() * g).trace();
    const cplx t2 = (b * h * b.adjoint() * h).trace();
    const cplx t3 = (a * f * b.adjoint() * f.adjoint()).trace();
    const cplx t4 = (b * f.adjoint() * a.adjoint() * f).trace();
    return (t1 + t2 - t3 - t4).real();
}

CoherentCheck coherent_term_check(const DaviesGenerator& gen, const Operator& f) {
    const Operator c = commutator(gen.hamiltonian().matrix(), f);
    const cplx v = kms_inner(gen.gibbs(), c, f);
    return CoherentCheck{std::abs(v), cplx(0.0, 1.0) * v};
}

} // namespace davies
