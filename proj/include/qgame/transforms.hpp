#pragma once

#include "qgame/games.hpp"
#include "qgame/linalg.hpp"

namespace qgame {

// Finite relabeling of a spectrum, f: sigma(X) -> R.
using SpectrumFunction = RealMap;

// <psi, X, P> -> <psi, f(X), P'> with P'(f(x)) = P(x). Requires P to factor
// through f: eigenvalues that f merges must already share a payoff, otherwise
// NonInjective. Weight map is invariant.
Game payoff_equivalence(const Game& g, const SpectrumFunction& f);

// <psi, X, P> -> <U psi, X', P'>. Checks the intertwining relation UX = X'U
// within 1e-9 (IntertwinerViolation) and that P' agrees with P on sigma(X)
// (PayoffMismatch). Weight map is invariant.
Game measurement_equivalence(const Game& g, const Isometry& u,
                             const HermitianOperator& x_prime,
                             const PayoffFunction& p_prime);

// Unitary implementing the spectrum reflection f(x) = -x + x1 + x2. Requires
// sigma(X) invariant under f and X non-degenerate. Maps the eigenvector of x
// to the eigenvector of f(x); fixes (|l1> + |l2>)/sqrt(2).
Isometry reflection_unitary(const HermitianOperator& x, double x1, double x2);

// 2 -> (a1+a2) isometry: e1 -> (1/sqrt(a1)) sum of first a1 basis vectors,
// e2 -> (1/sqrt(a2)) sum of the rest.
Isometry splitting_isometry(int a1, int a2);

// Isometry from a k-dim space onto span{e_{indices[0]}, ..., e_{indices[k-1]}}.
Isometry embed_subspace(const std::vector<int>& basis_indices, int dim);

}  // namespace qgame
