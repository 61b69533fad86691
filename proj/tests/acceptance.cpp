// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "davies/classical.hpp"
#include "davies/errors.hpp"
#include "davies/gaps.hpp"
#include "davies/generator.hpp"
#include "davies/harness.hpp"
#include "davies/spectral.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace davies;

namespace {

struct Outcome {
    bool ok{true};
    std::string detail;
};

// Tracks the worst margin against a tolerance.
struct Tally {
    int checks{0};
    int failures{0};
    double worst{0.0};   // largest excess / tol
    std::string first;

    void check(double excess, double tol, const std::string& what) {
        ++checks;
        const double ratio = excess / tol;
        if (ratio > worst || !std::isfinite(ratio)) worst = std::isfinite(ratio) ? ratio : 1e300;
        if (!(excess <= tol)) {
            if (failures++ == 0) first = what;
        }
    }
    Outcome outcome(const std::string& extra = "") const {
        std::ostringstream os;
        os << checks << " checks, worst excess/tol " << worst;
        if (!extra.empty()) os << ", " << extra;
        if (failures) os << ", " << failures << " failures (first: " << first << ")";
        return {failures == 0, os.str()};
    }
};

int failed = 0;

void run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        o.ok = false;
        o.detail += ", over the " + std::to_string(budget_s) + " s budget";
    }
    std::printf("%s  %2d %-34s %7.2fs  %s\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
}

// Random instance for the property criteria: n in {1,2,3}, beta in [0,2],
// glauber on even draws and metropolis on odd ones.
DaviesGenerator random_generator(Rng& rng, int i) {
    const int n = 1 + i % 3;
    const double beta = rng.uniform(0.0, 2.0);
    const auto h = testutil::zz_field(n, 'X', rng);
    auto rate = i % 2 ? RateFunction::metropolis(beta) : RateFunction::glauber(beta);
    return DaviesGenerator(h, beta, rate, default_jumps(n));
}

std::vector<double> spectrum_of(const DaviesGenerator& gen) {
    const auto& v = gen.levels().spectrum.values;
    return {v.data(), v.data() + v.size()};
}

bool simple(const DaviesGenerator& gen) {
    const auto& m = gen.levels().multiplicity;
    return std::all_of(m.begin(), m.end(), [](int k) { return k == 1; });
}

ExperimentConfig sandwich_config() {
    ExperimentConfig c = config_from_json(json::parse(R"({
        "random_model": {"background": "zz", "field": "X", "amplitude": 1.0},
        "generator": {"rate": {"kind": "glauber"}},
        "qubits": [2, 3, 4],
        "betas": [0.0, 0.5, 1.0, 2.0],
        "trials": 100,
        "seed": 20240601
    })"));
    return c;
}

// Shared by criteria 6, 7 and 10.
const std::vector<ComparisonRow>& sandwich_rows() {
    static const std::vector<ComparisonRow> rows = run_comparison(sandwich_config());
    return rows;
}

Outcome divergence_identity() {
    Rng rng(101);
    Tally t;
    for (int i = 0; i < 200; ++i) {
        const auto gen = random_generator(rng, i);
        const Operator f = random_complex(gen.dim(), rng);
        const double a = dirichlet_form(gen, f, DirichletMethod::Definitional);
        const double b = dirichlet_form(gen, f, DirichletMethod::Divergence);
        t.check(std::abs(a - b), 1e-9 * gen.scale(f), "instance " + std::to_string(i));
    }
    return t.outcome();
}

Outcome kms_and_invariance() {
    Rng rng(202);
    Tally sym, inv;
    for (int i = 0; i < 200; ++i) {
        const auto gen = random_generator(rng, i);
        const Operator f = random_complex(gen.dim(), rng);
        const Operator g = random_complex(gen.dim(), rng);
        const cplx lhs = kms_inner(gen.gibbs(), gen.apply(f), g);
        const cplx rhs = kms_inner(gen.gibbs(), f, gen.apply(g));
        sym.check(std::abs(lhs - rhs), 1e-9, "symmetry, instance " + std::to_string(i));
        const auto k = static_cast<std::size_t>(rng.below(gen.bohr().size()));
        const Operator fw = project_component_at(f, k, gen.levels(), gen.bohr());
        const Operator lf = gen.apply(fw);
        const Operator back = project_component_at(lf, k, gen.levels(), gen.bohr());
        inv.check(max_abs(lf - back), 1e-10, "invariance, instance " + std::to_string(i));
    }
    auto a = sym.outcome();
    auto b = inv.outcome();
    return {a.ok && b.ok, "symmetry: " + a.detail + "; invariance: " + b.detail};
}

Outcome trace_inequality() {
    Rng rng(303);
    Tally t;
    const int sizes[] = {2, 4, 8};
    double smallest = 1e300;
    for (int i = 0; i < 500; ++i) {
        const int n = sizes[i % 3];
        const Operator a = random_complex(n, rng);
        const Operator b = random_complex(n, rng);
        const Operator f = random_complex(n, rng);
        const double r = trace_inequality_residual(a, b, f);
        smallest = std::min(smallest, r);
        const double scale = std::max({1.0, f.squaredNorm(), std::pow(spectral_norm(a), 2) + std::pow(spectral_norm(b), 2)});
        t.check(-r, 1e-10 * scale, "triple " + std::to_string(i));
    }
    return t.outcome("min residual " + std::to_string(smallest));
}

// f in V_omega for every Bohr frequency of successive random instances, 200 in all.
template <typename Fn>
void omega_corpus(std::uint64_t seed, Fn&& fn) {
    Rng rng(seed);
    int done = 0;
    for (int i = 0; done < 200; ++i) {
        const auto gen = random_generator(rng, i);
        for (std::size_t k = 0; k < gen.bohr().size() && done < 200; ++k) {
            const Operator f = project_component_at(random_complex(gen.dim(), rng), k, gen.levels(), gen.bohr());
            if (f.norm() < 1e-12) continue;
            fn(gen, k, f);
            ++done;
        }
    }
}

Outcome dirichlet_comparison() {
    Tally t;
    omega_corpus(404, [&](const DaviesGenerator& gen, std::size_t k, const Operator& f) {
        const auto p = hermitianize_pair(gen, f, gen.bohr().omegas[k]);
        const double excess = dirichlet_form(gen, p.g) + dirichlet_form(gen, p.h) - 2.0 * dirichlet_form(gen, f);
        t.check(excess, 1e-9 * gen.scale(f), "omega " + std::to_string(p.omega));
    });
    return t.outcome();
}

Outcome variance_comparison() {
    Tally t;
    int skipped = 0;
    omega_corpus(404, [&](const DaviesGenerator& gen, std::size_t k, const Operator& f) {
        if (k == gen.bohr().zero_index()) {
            ++skipped;
            return;
        }
        const double w = gen.bohr().omegas[k];
        const auto s = spectrum_of(gen);
        const int d = std::max(1, longest_ap_with_difference(s, w, default_ap_tolerances(s).value_tol));
        const auto p = hermitianize_pair(gen, f, w);
        const double c = std::max(1.0 / d, 1.0 - std::exp(-std::abs(gen.beta() * w)));
        const double excess = c * variance(gen.gibbs(), f) - variance(gen.gibbs(), p.g) - variance(gen.gibbs(), p.h);
        t.check(excess, 1e-9 * gen.scale(f), "omega " + std::to_string(w));
    });
    return t.outcome(std::to_string(skipped) + " omega = 0 samples skipped");
}

Outcome sandwich() {
    const auto& rows = sandwich_rows();
    Tally t;
    int d2 = 0, ergodic = 0;
    double min_ratio = 1e300, max_ratio = 0.0;
    for (const auto& r : rows) {
        d2 += r.d == 2;
        if (!r.ergodic) continue;
        ++ergodic;
        const std::string id = "seed " + std::to_string(r.instance.seed);
        t.check(r.gap.value - r.gap0.value, 1e-9, id + " lambda_L <= lambda_L0");
        t.check(r.gap0.value / (2.0 * r.d) - r.gap.value, 1e-9, id + " lambda_L >= lambda_L0 / 2D");
        min_ratio = std::min(min_ratio, r.ratio);
        max_ratio = std::max(max_ratio, r.ratio);
    }
    auto o = t.outcome(std::to_string(ergodic) + "/" + std::to_string(rows.size()) + " ergodic, D = 2 on " +
                       std::to_string(d2) + ", lambda_L/lambda_L0 in [" + std::to_string(min_ratio) + ", " +
                       std::to_string(max_ratio) + "]");
    if (d2 != static_cast<int>(rows.size())) o.ok = false;
    return o;
}

Outcome classical_equivalence() {
    const auto& rows = sandwich_rows();
    const auto cfg = sandwich_config();
    Tally gaps, forms;
    int simple_rows = 0;
    Rng rng(707);
    for (const auto& r : rows) {
        if (!r.simple_spectrum) continue;
        ++simple_rows;
        gaps.check(r.classical_residual, 1e-9 * std::max(1.0, r.lambda_cl), "seed " + std::to_string(r.instance.seed));
    }
    for (std::size_t i = 0; i < 100; ++i) {
        const auto& inst = rows[i % rows.size()].instance;
        const auto gen = build_generator(cfg, inst);
        const auto chain = extract_chain(gen);
        Eigen::VectorXd f(gen.dim());
        for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = rng.normal();
        const Operator op = diagonal_observable(chain, f);
        forms.check(std::abs(dirichlet_form(gen, op) - classical_dirichlet(chain, f)), 1e-9, "dirichlet");
        forms.check(std::abs(variance(gen.gibbs(), op) - classical_variance(chain, f)), 1e-9, "variance");
    }
    auto a = gaps.outcome(std::to_string(simple_rows) + " simple-spectrum instances");
    auto b = forms.outcome();
    return {a.ok && b.ok, "gaps: " + a.detail + "; diagonal forms: " + b.detail};
}

Outcome exact_small_cases() {
    const HermitianOperator h0(Operator::Zero(2, 2));
    const std::vector<Operator> xz{pauli_matrix('X'), pauli_matrix('Z')};
    DaviesGenerator gen(h0, 0.0, RateFunction::glauber(0.0), xz);
    const auto r = spectral_gap_full(gen);
    oracle::NaiveDavies naive(Operator::Zero(2, 2), 0.0, [](double w) { return oracle::glauber(0.0, w); }, xz);
    const double oracle_gap = oracle::second_smallest(oracle::superoperator_spectrum(naive, 2));

    DaviesGenerator gx(h0, 0.0, RateFunction::glauber(0.0), {pauli_matrix('X')});
    const auto rx = spectral_gap_full(gx);

    const bool ok = std::abs(r.gap.value - 1.0) <= 1e-10 && std::abs(oracle_gap - 1.0) <= 1e-10 &&
                    !r.gap.ergodicity_suspect && rx.gap.value == 0.0 && rx.gap.ergodicity_suspect;
    std::ostringstream os;
    os.precision(15);
    os << "{X, Z}: lambda_L = " << r.gap.value << " (oracle " << oracle_gap << "); {X}: lambda_L = " << rx.gap.value
       << (rx.gap.ergodicity_suspect ? " flagged non-ergodic" : " NOT flagged");
    return {ok, os.str()};
}

Outcome xyz_ring() {
    Rng rng(909);
    Tally spec;
    for (int n : {3, 5, 7}) {
        for (int i = 0; i < 50; ++i) {
            const double j = rng.uniform(-2.0, 2.0);
            const double h = rng.uniform(0.1, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            const auto closed = xyz_ring_spectrum(j, h, n);
            const auto dense = eigendecompose(build_xyz_ring(j, h, n));
            double err = 0.0;
            for (std::size_t k = 0; k < closed.size(); ++k) err = std::max(err, std::abs(closed[k] - dense.values(static_cast<Eigen::Index>(k))));
            spec.check(err, 1e-9, "n = " + std::to_string(n));
        }
    }
    int ap3 = 0, repeats = 0;
    for (int i = 0; i < 100; ++i) {
        const double j = rng.uniform(-2.0, 2.0);
        const double h = rng.uniform(0.1, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        const auto s = xyz_ring_spectrum(j, h, 5);
        ap3 += find_proper_ap(s, 3, 1e-9, 1e-7).length >= 3;
        repeats += has_repeated_values(s, 1e-9);
    }
    auto o = spec.outcome("n = 5 scan: " + std::to_string(ap3) + " with a 3-AP, " + std::to_string(repeats) +
                          " with repeated eigenvalues over 100 draws");
    if (ap3 || repeats) o.ok = false;
    return o;
}

Outcome cheeger() {
    const auto& rows = sandwich_rows();
    const auto cfg = sandwich_config();
    Tally proj, bound, chain;
    int checked = 0, skipped_degenerate = 0;
    for (const auto& r : rows) {
        if (!r.ergodic) continue;
        const auto gen = build_generator(cfg, r.instance);
        CheegerOptions opts;
        opts.mode = 1;
        const auto w = cheeger_witness(gen, r.d, r.gap.value, opts);
        const std::string id = "seed " + std::to_string(r.instance.seed);
        proj.check(w.idempotence_residual, 1e-10, id + " P^2 = P");
        proj.check(w.commutator_residual, 1e-10, id + " [P, H] = 0");
        chain.check(-w.witness.chain_margin, 1e-9, id + " Phi^2 <= 2 Lambda lambda_cl");
        if (!simple(gen)) {
            ++skipped_degenerate;
            continue;
        }
        bound.check(w.dirichlet - w.bound, 1e-9 * gen.scale(w.projection), id + " E(P) <= 4 sqrt(D M lambda_L) Var(P)");
        ++checked;
    }
    auto a = proj.outcome();
    auto b = bound.outcome(std::to_string(checked) + " instances, " + std::to_string(skipped_degenerate) +
                           " degenerate skipped");
    auto c = chain.outcome();
    return {a.ok && b.ok && c.ok, "projection: " + a.detail + "; quantum bound: " + b.detail + "; chain: " + c.detail};
}

// Simple spectrum and every nonzero Bohr frequency realized by one ordered pair.
bool simple_bohr(const DaviesGenerator& gen) {
    if (!simple(gen)) return false;
    const auto& idx = gen.pair_index();
    std::vector<int> count(gen.bohr().size(), 0);
    for (Eigen::Index a = 0; a < idx.rows(); ++a)
        for (Eigen::Index b = 0; b < idx.cols(); ++b) ++count[static_cast<std::size_t>(idx(a, b))];
    for (std::size_t k = 0; k < count.size(); ++k)
        if (k != gen.bohr().zero_index() && count[k] != 1) return false;
    return true;
}

Outcome orbit_bound() {
    Rng rng(1111);
    Tally t;
    int found = 0, tried = 0;
    double min_ratio = 1e300;
    while (found < 20 && tried < 500) {
        ++tried;
        const int n = 2 + tried % 2;
        const double beta = rng.uniform(0.0, 2.0);
        RandomModelSpec spec;
        const auto h = build_model(random_field_model(spec, n, rng));
        DaviesGenerator gen(h, beta, RateFunction::glauber(beta), default_jumps(n));
        if (!simple_bohr(gen)) continue;
        ++found;
        const double l = spectral_gap_full(gen).gap.value;
        const double lcl = classical_gap(extract_chain(gen));
        min_ratio = std::min(min_ratio, l / lcl);
        t.check(0.5 * lcl - l, 1e-9, "instance " + std::to_string(tried));
    }
    auto o = t.outcome(std::to_string(found) + " qualifying instances from " + std::to_string(tried) +
                       ", min lambda_L/lambda_cl " + std::to_string(min_ratio));
    if (found < 20) o.ok = false;
    return o;
}

Outcome coherent() {
    Rng rng(1212);
    Tally t;
    for (int i = 0; i < 200; ++i) {
        const auto gen = random_generator(rng, i);
        const Operator f = random_hermitian(gen.dim(), rng);
        t.check(coherent_term_check(gen, f).magnitude, 1e-10 * gen.scale(f), "instance " + std::to_string(i));
    }
    return t.outcome();
}

} // namespace

int main() {
    run(1, "divergence-form identity", 30, divergence_identity);
    run(2, "KMS reversibility + invariance", 30, kms_and_invariance);
    run(3, "trace inequality", 20, trace_inequality);
    run(4, "Dirichlet comparison", 60, dirichlet_comparison);
    run(5, "variance comparison", 60, variance_comparison);
    run(6, "sandwich theorem", 300, sandwich);
    run(7, "classical equivalence", 300, classical_equivalence);
    run(8, "exact small cases", 1, exact_small_cases);
    run(9, "XY+Z ring spectrum", 60, xyz_ring);
    run(10, "Cheeger witness", 300, cheeger);
    run(11, "dimension-1 orbit bound", 60, orbit_bound);
    run(12, "coherent-term irrelevance", 60, coherent);
    std::printf("%d of 12 criteria failed\n", failed);
    return failed ? 1 : 0;
}
