#include "davies/errors.hpp"
#include "davies/spectral.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace davies;
using testutil::max_diff;

namespace {

Levels levels_of(const HermitianOperator& h) {
    const auto sd = eigendecompose(h);
    return cluster_levels(sd, default_level_tol(sd));
}

} // namespace

TEST_CASE("eigendecomposition reconstructs H") {
    Rng rng(1);
    const auto h = HermitianOperator(random_hermitian(6, rng));
    const auto sd = eigendecompose(h);
    const Operator back = sd.vectors * sd.values.cast<cplx>().asDiagonal() * sd.vectors.adjoint();
    CHECK(max_diff(back, h.matrix()) < 1e-12);
    for (Eigen::Index i = 1; i < sd.dim(); ++i) CHECK(sd.values(i) >= sd.values(i - 1));
}

TEST_CASE("degenerate levels cluster") {
    // sum Z_i on 3 qubits: levels -3, -1, 1, 3 with multiplicities 1, 3, 3, 1
    std::vector<PauliTerm> t;
    for (int i = 1; i <= 3; ++i) t.push_back({1.0, PauliString::single(3, i, 'Z')});
    const auto lv = levels_of(build_pauli_hamiltonian(t, 3));
    REQUIRE(lv.size() == 4);
    CHECK(lv.multiplicity == std::vector<int>{1, 3, 3, 1});
    CHECK(lv.values[1] == doctest::Approx(-1.0));
    Operator sum = Operator::Zero(8, 8);
    for (std::size_t k = 0; k < lv.size(); ++k) {
        const Operator p = lv.projector(k);
        CHECK(max_diff(p * p, p) < 1e-12);
        sum += p;
    }
    CHECK(max_diff(sum, identity(8)) < 1e-12);
    CHECK(max_diff(lv.clustered_hamiltonian(), build_pauli_hamiltonian(t, 3).matrix()) < 1e-12);
}

TEST_CASE("bohr frequencies match the naive pairwise list") {
    Rng rng(5);
    const auto h = testutil::zz_field(3, 'X', rng);
    const auto lv = levels_of(h);
    const auto bohr = bohr_frequencies(lv, lv.tol);
    const auto nb = oracle::naive_bohr(oracle::naive_levels(h.matrix()));
    REQUIRE(bohr.size() == nb.omegas.size());
    for (std::size_t k = 0; k < bohr.size(); ++k) CHECK(std::abs(bohr.omegas[k] - nb.omegas[k]) < 1e-9);
    CHECK(bohr.omegas[bohr.zero_index()] == doctest::Approx(0.0));
    for (std::size_t k = 0; k < bohr.size(); ++k) CHECK(bohr.omegas[bohr.mirror(k)] == doctest::Approx(-bohr.omegas[k]));
    CHECK(bohr.find(bohr.omegas[2] + 1e-12).value() == 2);
    CHECK_FALSE(bohr.find(123.0).has_value());
}

TEST_CASE("components sum back and live in V_omega") {
    Rng rng(8);
    const auto h = testutil::zz_field(2, 'X', rng);
    const auto lv = levels_of(h);
    const auto bohr = bohr_frequencies(lv, lv.tol);
    const Operator f = random_complex(4, rng);
    const auto parts = decompose(f, lv, bohr);
    Operator sum = Operator::Zero(4, 4);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        sum += parts[k];
        // [H, f(w)] = w f(w)
        CHECK(max_diff(commutator(h.matrix(), parts[k]), bohr.omegas[k] * parts[k]) < 1e-10);
    }
    CHECK(max_diff(sum, f) < 1e-12);
    const auto miss = project_component(f, 1234.5, lv, bohr);
    CHECK_FALSE(miss.matched);
    CHECK(miss.value.norm() == 0.0);
}

TEST_CASE("gibbs state matches expm") {
    Rng rng(2);
    const auto h = testutil::zz_field(3, 'X', rng);
    const auto lv = levels_of(h);
    for (double beta : {0.0, 0.7, 3.0}) {
        const auto g = gibbs_state(lv, beta);
        CHECK(max_diff(g.rho, oracle::gibbs_expm(h.matrix(), beta)) < 1e-12);
        CHECK(max_diff(g.sqrt_rho() * g.sqrt_rho(), g.rho) < 1e-12);
        CHECK(max_diff(g.power(0.25) * g.power(0.75), g.rho) < 1e-12);
    }
    // large beta stays finite thanks to the shift
    const auto cold = gibbs_state(lv, 500.0);
    CHECK(std::abs(cold.rho.trace().real() - 1.0) < 1e-12);
    CHECK(all_finite(cold.rho));
}

TEST_CASE("ap detection agrees with brute force") {
    Rng rng(99);
    for (int t = 0; t < 200; ++t) {
        const int n = 3 + static_cast<int>(rng.below(6));
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(static_cast<double>(rng.below(12)) * 0.5);
        const auto r = find_proper_ap(v, 0, 1e-9, 1e-7);
        CHECK(r.length == oracle::longest_ap(v, 1e-9, 1e-7));
        CHECK((r.length >= 3) == oracle::has_three_ap(v, 1e-9, 1e-7));
        if (r.length >= 2) {
            for (int k = 0; k < r.length; ++k) {
                const double target = r.a + k * r.b;
                CHECK(std::any_of(v.begin(), v.end(), [&](double x) { return std::abs(x - target) < 1e-9; }));
            }
        }
    }
}

TEST_CASE("ap edge cases") {
    std::vector<double> flat{1.0, 1.0, 1.0};
    CHECK(find_proper_ap(flat, 0, 1e-9, 1e-7).length == 1);
    CHECK(has_repeated_values(flat, 1e-9));
    std::vector<double> line{0.0, 1.0, 2.0, 3.0, 5.0};
    CHECK(find_proper_ap(line, 0, 1e-9, 1e-7).length == 4);
    CHECK(find_proper_ap(line, 3, 1e-9, 1e-7).length == 3);
    CHECK(longest_ap_with_difference(line, -1.0, 1e-9) == 4);
    CHECK(longest_ap_with_difference(line, 2.0, 1e-9) == 3);
    CHECK(distinct_values(std::vector<double>{0.0, 1e-12, 1.0}, 1e-9).size() == 2);
    const auto tol = default_ap_tolerances(line);
    CHECK(tol.value_tol == doctest::Approx(5e-9));
    CHECK(tol.sep_tol == doctest::Approx(5e-7));
}
