// spectral.cpp: eigendecomposition, levels, Bohr frequencies, Gibbs states, APs

#include "davies/spectral.hpp"

#include "davies/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace davies {

SpectralData eigendecompose(const HermitianOperator& h) {
    const Operator& m = h.matrix();
    Eigen::SelfAdjointEigenSolver<Operator> es(m);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigendecompose: solver did not converge (dim " +
                             std::to_string(m.rows()) + ", max|H| " + std::to_string(max_abs(m)) +
                             ")");
    }
    SpectralData sd{es.eigenvalues(), es.eigenvectors()};
    const Operator rebuilt = sd.vectors * sd.values.asDiagonal() * sd.vectors.adjoint();
    const double resid = max_abs(rebuilt - m);
    if (resid > 1e-10 * std::max(1.0, max_abs(m))) {
        throw NumericalError("eigendecompose: reconstruction residual " + std::to_string(resid));
    }
    return sd;
}

double default_level_tol(const SpectralData& sd) {
    const double top = sd.values.size() ? sd.values.cwiseAbs().maxCoeff() : 0.0;
    return 1e-9 * std::max(1.0, top);
}

Levels cluster_levels(const SpectralData& sd, double tol) {
    if (!(tol > 0.0)) throw ValidationError("cluster_levels: tol must be positive");
    Levels lv;
    lv.spectrum = sd;
    lv.tol = tol;
    lv.level_of.assign(static_cast<std::size_t>(sd.dim()), 0);
    for (Eigen::Index i = 0; i < sd.dim(); ++i) {
        if (i == 0 || sd.values(i) - sd.values(i - 1) > tol) {
            lv.members.emplace_back();
        }
        lv.members.back().push_back(i);
        lv.level_of[static_cast<std::size_t>(i)] = static_cast<int>(lv.members.size()) - 1;
    }
    for (const auto& group : lv.members) {
        double sum = 0.0;
        for (auto i : group) sum += sd.values(i);
        lv.values.push_back(sum / static_cast<double>(group.size()));
        lv.multiplicity.push_back(static_cast<int>(group.size()));
    }
    return lv;
}

Operator Levels::projector(std::size_t k) const {
    const auto& v = spectrum.vectors;
    Operator p = Operator::Zero(dim(), dim());
    for (auto col : members.at(k)) p += v.col(col) * v.col(col).adjoint();
    return p;
}

Operator Levels::clustered_hamiltonian() const {
    Eigen::VectorXd diag(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) diag(i) = values[static_cast<std::size_t>(level_of[static_cast<std::size_t>(i)])];
    return spectrum.vectors * diag.asDiagonal() * spectrum.vectors.adjoint();
}

Operator Levels::to_eigen(const Operator& lab) const {
    if (lab.rows() != dim() || lab.cols() != dim()) throw DimensionError("to_eigen: dimension mismatch");
    return spectrum.vectors.adjoint() * lab * spectrum.vectors;
}

Operator Levels::to_lab(const Operator& eig) const {
    if (eig.rows() != dim() || eig.cols() != dim()) throw DimensionError("to_lab: dimension mismatch");
    return spectrum.vectors * eig * spectrum.vectors.adjoint();
}

// --------------------------------------------------------------------------

std::optional<std::size_t> BohrData::find(double omega) const {
    if (omegas.empty()) return std::nullopt;
    auto it = std::lower_bound(omegas.begin(), omegas.end(), omega);
    std::optional<std::size_t> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (auto cand : {it, it == omegas.begin() ? it : std::prev(it)}) {
        if (cand == omegas.end()) continue;
        const auto k = static_cast<std::size_t>(cand - omegas.begin());
        const auto [lo, hi] = spans_[k];
        if (omega < lo - tol || omega > hi + tol) continue;
        const double d = std::abs(*cand - omega);
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return best;
}

BohrData bohr_frequencies(const Levels& levels, double tol) {
    if (!(tol > 0.0)) throw ValidationError("bohr_frequencies: tol must be positive");
    struct Diff {
        double value;
        int l1, l2;
    };
    const auto nl = static_cast<int>(levels.size());
    std::vector<Diff> diffs;
    diffs.reserve(static_cast<std::size_t>(nl) * static_cast<std::size_t>(nl));
    for (int a = 0; a < nl; ++a) {
        for (int b = 0; b < nl; ++b) {
            diffs.push_back({levels.values[static_cast<std::size_t>(a)] - levels.values[static_cast<std::size_t>(b)], a, b});
        }
    }
    std::sort(diffs.begin(), diffs.end(), [](const Diff& x, const Diff& y) {
        if (x.value != y.value) return x.value < y.value;
        if (x.l1 != y.l1) return x.l1 < y.l1;
        return x.l2 < y.l2;
    });

    BohrData bd;
    bd.tol = tol;
    bd.index.resize(nl, nl);
    std::vector<double> sums;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (i == 0 || diffs[i].value - diffs[i - 1].value > tol) {
            bd.pairs.emplace_back();
            bd.spans_.emplace_back(diffs[i].value, diffs[i].value);
            sums.push_back(0.0);
        }
        bd.pairs.back().emplace_back(diffs[i].l1, diffs[i].l2);
        bd.spans_.back().second = diffs[i].value;
        sums.back() += diffs[i].value;
        bd.index(diffs[i].l1, diffs[i].l2) = static_cast<int>(bd.pairs.size()) - 1;
    }

    // The difference multiset is exactly antisymmetric, so groups mirror each
    // other; pin representatives so that omega_k = -omega_{G-1-k} and the
    // middle group is exactly 0.
    const std::size_t g = bd.pairs.size();
    bd.omegas.assign(g, 0.0);
    for (std::size_t k = g / 2 + 1; k < g; ++k) {
        bd.omegas[k] = sums[k] / static_cast<double>(bd.pairs[k].size());
        bd.omegas[g - 1 - k] = -bd.omegas[k];
    }
    bd.omegas[g / 2] = 0.0;
    return bd;
}

Eigen::MatrixXi pair_frequency_index(const Levels& levels, const BohrData& bohr) {
    const auto n = levels.dim();
    Eigen::MatrixXi out(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            out(a, b) = bohr.index(levels.level_of[static_cast<std::size_t>(a)],
                                   levels.level_of[static_cast<std::size_t>(b)]);
        }
    }
    return out;
}

Operator project_component_at(const Operator& f, std::size_t k, const Levels& levels,
                              const BohrData& bohr) {
    const Operator fe = levels.to_eigen(f);
    Operator masked = Operator::Zero(fe.rows(), fe.cols());
    for (const auto& [l1, l2] : bohr.pairs.at(k)) {
        for (auto a : levels.members[static_cast<std::size_t>(l1)]) {
            for (auto b : levels.members[static_cast<std::size_t>(l2)]) masked(a, b) = fe(a, b);
        }
    }
    return levels.to_lab(masked);
}

Component project_component(const Operator& f, double omega, const Levels& levels,
                            const BohrData& bohr) {
    if (f.rows() != levels.dim() || f.cols() != levels.dim()) {
        throw DimensionError("project_component: dimension mismatch");
    }
    const auto k = bohr.find(omega);
    if (!k) return Component{Operator::Zero(f.rows(), f.cols()), false, 0, omega};
    return Component{project_component_at(f, *k, levels, bohr), true, *k, bohr.omegas[*k]};
}

std::vector<Operator> decompose(const Operator& f, const Levels& levels, const BohrData& bohr) {
    const Operator fe = levels.to_eigen(f);
    const Eigen::MatrixXi idx = pair_frequency_index(levels, bohr);
    std::vector<Operator> masked(bohr.size(), Operator::Zero(fe.rows(), fe.cols()));
    for (Eigen::Index a = 0; a < fe.rows(); ++a) {
        for (Eigen::Index b = 0; b < fe.cols(); ++b) {
            masked[static_cast<std::size_t>(idx(a, b))](a, b) = fe(a, b);
        }
    }
    for (auto& m : masked) m = levels.to_lab(m);
    return masked;
}

// --------------------------------------------------------------------------

Operator GibbsState::power(double m) const {
    Eigen::VectorXd w(weights.size());
    for (Eigen::Index i = 0; i < weights.size(); ++i) w(i) = std::pow(weights(i), m);
    return vectors * w.asDiagonal() * vectors.adjoint();
}

GibbsState gibbs_state(const Levels& levels, double beta) {
    if (!std::isfinite(beta)) throw ValidationError("gibbs_state: beta must be finite");
    const std::size_t nl = levels.size();
    std::vector<double> expo(nl);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nl; ++k) {
        expo[k] = -beta * levels.values[k];
        top = std::max(top, expo[k]);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < nl; ++k) z += levels.multiplicity[k] * std::exp(expo[k] - top);

    GibbsState gs;
    gs.beta = beta;
    gs.level_weights.resize(nl);
    for (std::size_t k = 0; k < nl; ++k) gs.level_weights[k] = std::exp(expo[k] - top) / z;
    gs.weights.resize(levels.dim());
    for (Eigen::Index i = 0; i < levels.dim(); ++i) {
        gs.weights(i) = gs.level_weights[static_cast<std::size_t>(levels.level_of[static_cast<std::size_t>(i)])];
    }
    gs.vectors = levels.basis();
    gs.rho = gs.vectors * gs.weights.asDiagonal() * gs.vectors.adjoint();
    gs.sqrt_ = gs.power(0.5);
    return gs;
}

// --------------------------------------------------------------------------

APTolerances default_ap_tolerances(std::span<const double> spectrum) {
    double range = 0.0;
    if (!spectrum.empty()) {
        const auto [lo, hi] = std::minmax_element(spectrum.begin(), spectrum.end());
        range = *hi - *lo;
    }
    if (!(range > 0.0)) range = 1.0;
    return {1e-9 * range, 1e-7 * range};
}

std::vector<double> distinct_values(std::span<const double> spectrum, double tol) {
    std::vector<double> sorted(spectrum.begin(), spectrum.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    std::vector<int> count;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i == 0 || sorted[i] - sorted[i - 1] > tol) {
            out.push_back(0.0);
            count.push_back(0);
        }
        out.back() += sorted[i];
        ++count.back();
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k] /= count[k];
    return out;
}

bool has_repeated_values(std::span<const double> spectrum, double tol) {
    return distinct_values(spectrum, tol).size() < spectrum.size();
}

namespace {

bool contains(const std::vector<double>& sorted, double target, double tol) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), target - tol);
    return it != sorted.end() && *it <= target + tol;
}

} // namespace

APReport find_proper_ap(std::span<const double> spectrum, int max_len, double value_tol,
                        double sep_tol) {
    if (!(value_tol > 0.0) || !(sep_tol > 0.0)) {
        throw ValidationError("find_proper_ap: tolerances must be positive");
    }
    const auto vals = distinct_values(spectrum, value_tol);
    APReport rep;
    rep.value_tol = value_tol;
    rep.sep_tol = sep_tol;
    if (vals.empty()) return rep;
    rep.length = 1;
    rep.a = vals.front();
    const int cap = max_len > 0 ? max_len : std::numeric_limits<int>::max();

    // Every proper progression is determined by its two smallest terms.
    for (std::size_t i = 0; i < vals.size() && rep.length < cap; ++i) {
        for (std::size_t j = i + 1; j < vals.size(); ++j) {
            const double b = vals[j] - vals[i];
            if (b <= sep_tol) continue;
            int len = 2;
            while (len < cap && contains(vals, vals[i] + len * b, value_tol)) ++len;
            if (len > rep.length) {
                rep.length = len;
                rep.a = vals[i];
                rep.b = b;
            }
        }
    }
    return rep;
}

int longest_ap_with_difference(std::span<const double> spectrum, double omega, double value_tol) {
    const auto vals = distinct_values(spectrum, value_tol);
    const double step = std::abs(omega);
    if (vals.empty()) return 0;
    if (!(step > value_tol)) return 1;
    int best = 1;
    for (double v : vals) {
        int len = 1;
        while (contains(vals, v + len * step, value_tol)) ++len;
        best = std::max(best, len);
    }
    return best;
}

} // namespace davies
