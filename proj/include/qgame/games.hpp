#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "qgame/linalg.hpp"
#include "qgame/real_map.hpp"

namespace qgame {

// Eigenvalue -> cash. Must cover the spectrum of the attached observable.
using PayoffFunction = RealMap;

// One-shot bet on a quantum measurement: state, observable, payoff.
class Game {
 public:
  Game(StateVector state, HermitianOperator observable, PayoffFunction payoff);

  const StateVector& state() const { return state_; }
  const HermitianOperator& observable() const { return observable_; }
  const PayoffFunction& payoff() const { return payoff_; }
  int dim() const { return state_.dim(); }

 private:
  StateVector state_;
  HermitianOperator observable_;
  PayoffFunction payoff_;
};

// Payoff value -> total branch weight. Entries sorted by payoff ascending,
// weights positive, sum 1; payoffs within kPayoffTol merged.
class WeightMap {
 public:
  static WeightMap from_raw(std::vector<std::pair<double, double>> raw);

  const std::vector<std::pair<double, double>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double weight_of(double payoff, double tol = kPayoffTol) const;  // 0 when absent
  double expected_value() const;                                   // sum c * w

  // Keys matched within kPayoffTol, weights within value_tol; an entry missing
  // on one side counts as weight 0 there.
  bool same_distribution(const WeightMap& other, double value_tol = kValueTol) const;

 private:
  WeightMap() = default;
  std::vector<std::pair<double, double>> entries_;
};

WeightMap weight_map(const Game& g);

// Max absolute weight difference over the union of payoff values.
double distribution_distance(const WeightMap& a, const WeightMap& b);

// Equivalence Theorem part 3: games are equivalent iff their weight maps agree.
bool equivalent(const Game& a, const Game& b, double value_tol = kValueTol);

// Canonical form: n distinct payoffs c_1 < ... < c_n with weights w_i become
// the game <sum sqrt(w_i) e_i, diag(1..n), {i -> c_i}>. Complete invariant.
Game canonicalize(const Game& g);

// Structural equality of two games as canonical forms: same dim, payoff tables
// equal within kPayoffTol, amplitudes within amp_tol.
bool same_canonical_form(const Game& a, const Game& b, double amp_tol = kValueTol);

// Game whose payoffs may themselves be games; rank = nesting depth.
class CompoundGame {
 public:
  using Outcome = std::variant<double, std::shared_ptr<const CompoundGame>>;

  CompoundGame(StateVector state, HermitianOperator observable,
               std::vector<std::pair<double, Outcome>> outcomes);
  static CompoundGame from_game(const Game& g);  // rank 0
  static Outcome sub(CompoundGame g);

  int rank() const { return rank_; }
  const StateVector& state() const { return state_; }
  const HermitianOperator& observable() const { return observable_; }
  const std::vector<std::pair<double, Outcome>>& outcomes() const { return outcomes_; }

 private:
  StateVector state_;
  HermitianOperator observable_;
  std::vector<std::pair<double, Outcome>> outcomes_;  // keyed by eigenvalue
  int rank_ = 0;
};

// Path-product weight distribution, realized as a game. Rank-0 compounds come
// back unchanged; anything deeper is returned in canonical form.
Game flatten(const CompoundGame& c);

}  // namespace qgame
