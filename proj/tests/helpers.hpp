// Small constructors shared by the unit tests.
#pragma once

#include "davies/generator.hpp"
#include "davies/operators.hpp"
#include "davies/rng.hpp"

#include <vector>

namespace testutil {

using namespace davies;

// ZZ on every pair plus a field on `axis`, coefficients from rng.
inline HermitianOperator zz_field(int n, char axis, Rng& rng) {
    std::vector<PauliTerm> terms;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            std::string s(static_cast<std::size_t>(n), 'I');
            s[i - 1] = 'Z';
            s[j - 1] = 'Z';
            terms.push_back({rng.uniform(-1.0, 1.0), PauliString(s)});
        }
    for (int i = 1; i <= n; ++i) terms.push_back({rng.uniform(-1.0, 1.0), PauliString::single(n, i, axis)});
    return build_pauli_hamiltonian(terms, n);
}

inline DaviesGenerator glauber_gen(const HermitianOperator& h, double beta, int n) {
    return DaviesGenerator(h, beta, RateFunction::glauber(beta), default_jumps(n));
}

inline double max_diff(const Operator& a, const Operator& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace testutil
