#include "davies/classical.hpp"
#include "davies/errors.hpp"
#include "davies/gaps.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace davies;

TEST_CASE("two-state chain") {
    const double hz = 0.7, beta = 1.3;
    std::vector<PauliTerm> t{{hz, PauliString("Z")}};
    const auto h = build_pauli_hamiltonian(t, 1);
    DaviesGenerator gen(h, beta, RateFunction::glauber(beta), {pauli_matrix('X')});
    const auto c = extract_chain(gen);
    REQUIRE(c.size() == 2);
    // state 0 is the ground state E = -hz
    const double up = oracle::glauber(beta, 2 * hz);
    const double down = oracle::glauber(beta, -2 * hz);
    CHECK(c.rates(0, 1) == doctest::Approx(up));
    CHECK(c.rates(1, 0) == doctest::Approx(down));
    CHECK(classical_gap(c) == doctest::Approx(up + down));
    CHECK(c.pi(0) == doctest::Approx(1.0 / (1.0 + std::exp(-2 * beta * hz))));
    CHECK(c.reversibility_residual < 1e-14);
    CHECK(c.crosscheck_residual < 1e-12);
    CHECK(spectral_gap_full(gen).gap0.value == doctest::Approx(up + down));
}

TEST_CASE("diagonal observables carry the classical forms") {
    Rng rng(31);
    const auto h = testutil::zz_field(3, 'X', rng);
    const auto gen = testutil::glauber_gen(h, 1.0, 3);
    const auto c = extract_chain(gen);
    for (int i = 0; i < 10; ++i) {
        Eigen::VectorXd f(8);
        for (int k = 0; k < 8; ++k) f(k) = rng.normal();
        const Operator op = diagonal_observable(c, f);
        CHECK(std::abs(dirichlet_form(gen, op) - classical_dirichlet(c, f)) < 1e-10);
        CHECK(std::abs(variance(gen.gibbs(), op) - classical_variance(c, f)) < 1e-10);
    }
}

TEST_CASE("classical gap equals the V_0 gap on a simple spectrum") {
    Rng rng(32);
    for (int t = 0; t < 5; ++t) {
        const auto h = testutil::zz_field(2 + t % 2, 'X', rng);
        const auto gen = testutil::glauber_gen(h, rng.uniform(0.0, 2.0), 2 + t % 2);
        const auto c = extract_chain(gen);
        REQUIRE_FALSE(c.basis_ambiguous);
        CHECK(std::abs(classical_gap(c) - spectral_gap_full(gen).gap0.value) < 1e-9);
    }
}

TEST_CASE("exhaustive bottleneck matches brute-force conductance") {
    Rng rng(33);
    for (int t = 0; t < 5; ++t) {
        const int n = 2 + t % 2;
        const auto h = testutil::zz_field(n, 'X', rng);
        const auto gen = testutil::glauber_gen(h, 2.0, n);
        const auto c = extract_chain(gen);
        Eigen::MatrixXd p = c.rates;
        for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, i) = 0.0;
        const auto w = bottleneck(c, BottleneckMode::Exhaustive);
        CHECK(w.phi == doctest::Approx(oracle::conductance(c.pi, p)).epsilon(1e-10));
        CHECK(w.pi_subset <= 0.5 + 1e-12);
        CHECK(w.phi * w.phi <= 2 * w.lambda_max * w.classical_gap + 1e-9);
        const auto s = bottleneck(c, BottleneckMode::Sweep);
        CHECK(s.upper_bound);
        CHECK(s.phi >= w.phi - 1e-12);
    }
}

TEST_CASE("four-cycle with a weak edge pair") {
    // Hand-built 4-state chain embedded as a 2-qubit diagonal problem:
    // uniform pi, strong 0-1 and 2-3 links, weak 1-2 and 3-0 links.
    ClassicalChain c;
    c.pi = Eigen::VectorXd::Constant(4, 0.25);
    c.energies = Eigen::VectorXd::Zero(4);
    c.rates = Eigen::MatrixXd::Zero(4, 4);
    auto link = [&](int i, int j, double r) { c.rates(i, j) = c.rates(j, i) = r; };
    link(0, 1, 1.0);
    link(2, 3, 1.0);
    link(1, 2, 0.01);
    link(3, 0, 0.01);
    for (int i = 0; i < 4; ++i) c.rates(i, i) = -c.rates.row(i).sum();
    const auto w = bottleneck(c, BottleneckMode::Exhaustive);
    CHECK(w.phi == doctest::Approx(0.02 * 0.25 / 0.5));
    CHECK((w.mask == 0b0011 || w.mask == 0b1100));
    CHECK(w.classical_gap == doctest::Approx(0.02));
}

TEST_CASE("cheeger witness on a random instance") {
    Rng rng(34);
    const auto h = testutil::zz_field(3, 'X', rng);
    const auto gen = testutil::glauber_gen(h, 1.0, 3);
    const auto r = cheeger_witness(gen, 2);
    const Operator& p = r.projection;
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(commutator(p, h.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.holds);
    CHECK(r.dirichlet <= r.bound + r.tol);
    CHECK(r.lambda_l == doctest::Approx(spectral_gap_full(gen).gap.value));
}

TEST_CASE("rotated eigenbases leave simple spectra unchanged") {
    Rng rng(35);
    const auto h = testutil::zz_field(2, 'X', rng);
    const auto gen = testutil::glauber_gen(h, 1.0, 2);
    const auto scan = scan_rotations(gen, 5, 9);
    CHECK(std::abs(scan.max_gap - scan.min_gap) < 1e-10);
    Rng r2(1);
    CHECK_THROWS_AS(extract_chain(gen, random_unitary(4, r2)), PreconditionError);
}

TEST_CASE("exhaustive mode size limit") {
    ClassicalChain c;
    c.pi = Eigen::VectorXd::Constant(21, 1.0 / 21);
    c.rates = Eigen::MatrixXd::Zero(21, 21);
    c.energies = Eigen::VectorXd::Zero(21);
    CHECK_THROWS_AS(bottleneck(c, BottleneckMode::Exhaustive), DimensionError);
}
