#include "qgame/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "qgame/errors.hpp"

namespace qgame {

Game payoff_equivalence(const Game& g, const SpectrumFunction& f) {
  const SpectralDecomposition spec = spectral_decompose(g.observable());

  // New payoff P' on the image spectrum: P'(y) = P(x) for every x with f(x)=y.
  // If f collapses eigenvalues with different payoffs, no such P' exists.
  std::vector<std::pair<double, double>> image;  // y -> cash
  for (double x : spec.eigenvalues) {
    const double y = f.at(x, kPayoffTol, "DomainError");
    const double cash = g.payoff().at(x, kPayoffTol, "PayoffUndefined");
    const auto it = std::find_if(image.begin(), image.end(), [y](const auto& e) {
      return std::abs(e.first - y) <= kPayoffTol;
    });
    if (it == image.end()) {
      image.emplace_back(y, cash);
    } else if (std::abs(it->second - cash) > kPayoffTol) {
      throw ValidationError("NonInjective",
                            "f merges eigenvalues with distinct payoffs at f(x) = " +
                                std::to_string(y));
    }
  }
  return Game(g.state(), apply_function(g.observable(), f),
              PayoffFunction(std::move(image)));
}

Game measurement_equivalence(const Game& g, const Isometry& u,
                             const HermitianOperator& x_prime,
                             const PayoffFunction& p_prime) {
  if (u.dim_in() != g.dim() || u.dim_out() != x_prime.dim())
    throw ValidationError("DimMismatch", "isometry dims do not match the games");
  const double dev =
      (u.mat() * g.observable().mat() - x_prime.mat() * u.mat()).cwiseAbs().maxCoeff();
  if (dev > 1e-9)
    throw ValidationError("IntertwinerViolation",
                          "max |UX - X'U| entry = " + std::to_string(dev));
  for (double x : spectral_decompose(g.observable()).eigenvalues) {
    const double before = g.payoff().at(x, kPayoffTol, "PayoffUndefined");
    if (!p_prime.contains(x) ||
        std::abs(p_prime.at(x) - before) > kPayoffTol)
      throw ValidationError("PayoffMismatch",
                            "payoffs disagree on eigenvalue " + std::to_string(x));
  }
  return Game(u.apply(g.state()), x_prime, p_prime);
}

Isometry reflection_unitary(const HermitianOperator& x, double x1, double x2) {
  const SpectralDecomposition spec = spectral_decompose(x);
  for (std::size_t k = 0; k < spec.count(); ++k)
    if (spec.multiplicity(k) != 1)
      throw ValidationError("Degenerate",
                            "reflection needs a non-degenerate spectrum");

  const double s = x1 + x2;
  const double match_tol = 1e-9 * std::max(1.0, std::abs(s));
  std::vector<int> pair(spec.count());
  for (std::size_t i = 0; i < spec.count(); ++i) {
    const double target = -spec.eigenvalues[i] + s;
    int found = -1;
    for (std::size_t j = 0; j < spec.count(); ++j)
      if (std::abs(spec.eigenvalues[j] - target) <= match_tol) {
        found = static_cast<int>(j);
        break;
      }
    if (found < 0)
      throw ValidationError("SpectrumNotInvariant",
                            "f(x) = -x + x1 + x2 maps eigenvalue " +
                                std::to_string(spec.eigenvalues[i]) +
                                " outside the spectrum");
    pair[i] = found;
  }

  Matrix u = Matrix::Zero(x.dim(), x.dim());
  for (std::size_t i = 0; i < spec.count(); ++i)
    u += spec.bases[pair[i]] * spec.bases[i].adjoint();
  return Isometry(std::move(u));
}

Isometry splitting_isometry(int a1, int a2) {
  if (a1 < 1 || a2 < 1)
    throw ValidationError("BadValue", "splitting needs a1, a2 >= 1");
  const int n = a1 + a2;
  Matrix v = Matrix::Zero(n, 2);
  for (int i = 0; i < a1; ++i) v(i, 0) = 1.0 / std::sqrt(double(a1));
  for (int i = a1; i < n; ++i) v(i, 1) = 1.0 / std::sqrt(double(a2));
  return Isometry(std::move(v));
}

Isometry embed_subspace(const std::vector<int>& basis_indices, int dim) {
  if (basis_indices.empty())
    throw ValidationError("BadValue", "need at least one basis index");
  Matrix u = Matrix::Zero(dim, basis_indices.size());
  std::vector<bool> seen(dim, false);
  for (std::size_t j = 0; j < basis_indices.size(); ++j) {
    const int idx = basis_indices[j];
    if (idx < 0 || idx >= dim)
      throw ValidationError("IndexOutOfRange",
                            "index " + std::to_string(idx) + " outside [0, " +
                                std::to_string(dim) + ")");
    if (seen[idx])
      throw ValidationError("DuplicateIndex", "index " + std::to_string(idx));
    seen[idx] = true;
    u(idx, j) = 1.0;
  }
  return Isometry(std::move(u));
}

}  // namespace qgame
