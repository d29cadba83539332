#include "qgame/games.hpp"

#include <algorithm>
#include <cmath>

#include "qgame/errors.hpp"

namespace qgame {

namespace {

// Canonical game for a given distribution: <sum sqrt(w_i) e_i, diag(1..n), {i -> c_i}>.
Game canonical_game_from(const WeightMap& wm) {
  const int n = static_cast<int>(wm.size());
  Vector amps(n);
  std::vector<double> eigenvalues(n);
  std::vector<std::pair<double, double>> payoff;
  payoff.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto& [cash, w] = wm.entries()[i];
    amps(i) = std::sqrt(w);
    eigenvalues[i] = i + 1;
    payoff.emplace_back(i + 1, cash);
  }
  return Game(StateVector(std::move(amps)), HermitianOperator::diagonal(eigenvalues),
              PayoffFunction(std::move(payoff)));
}

}  // namespace

Game::Game(StateVector state, HermitianOperator observable, PayoffFunction payoff)
    : state_(std::move(state)),
      observable_(std::move(observable)),
      payoff_(std::move(payoff)) {
  if (state_.dim() != observable_.dim())
    throw ValidationError("DimMismatch", "state dim " + std::to_string(state_.dim()) +
                                             " vs observable dim " +
                                             std::to_string(observable_.dim()));
  for (double x : spectral_decompose(observable_).eigenvalues)
    if (!payoff_.contains(x))
      throw ValidationError("PayoffUndefined",
                            "payoff lacks eigenvalue " + std::to_string(x));
}

WeightMap WeightMap::from_raw(std::vector<std::pair<double, double>> raw) {
  for (auto& [c, w] : raw) {
    if (w < -1e-9) throw Error("NegativeWeight", "weight " + std::to_string(w));
    if (w < 0) w = 0;
  }
  std::sort(raw.begin(), raw.end());

  WeightMap out;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i + 1;
    double wsum = raw[i].second;
    double csum = raw[i].first * raw[i].second;
    while (j < raw.size() && raw[j].first - raw[j - 1].first <= kPayoffTol) {
      wsum += raw[j].second;
      csum += raw[j].first * raw[j].second;
      ++j;
    }
    if (wsum >= kWeightEps)  // zero-weight payoffs are dropped
      out.entries_.emplace_back(j == i + 1 ? raw[i].first : csum / wsum, wsum);
    i = j;
  }

  if (out.entries_.empty())
    throw ValidationError("DegenerateGame", "every payoff weight is zero");
  double total = 0.0;
  for (const auto& e : out.entries_) total += e.second;
  if (std::abs(total - 1.0) > 1e-9)
    throw Error("WeightSum", "weights total " + std::to_string(total));
  return out;
}

double WeightMap::weight_of(double payoff, double tol) const {
  for (const auto& [c, w] : entries_)
    if (std::abs(c - payoff) <= tol) return w;
  return 0.0;
}

double WeightMap::expected_value() const {
  double v = 0.0;
  for (const auto& [c, w] : entries_) v += c * w;
  return v;
}

bool WeightMap::same_distribution(const WeightMap& other, double value_tol) const {
  std::size_t i = 0, j = 0;
  while (i < entries_.size() || j < other.entries_.size()) {
    const bool left = i < entries_.size();
    const bool right = j < other.entries_.size();
    if (left && right &&
        std::abs(entries_[i].first - other.entries_[j].first) <= kPayoffTol) {
      if (std::abs(entries_[i].second - other.entries_[j].second) > value_tol)
        return false;
      ++i, ++j;
    } else if (right && (!left || entries_[i].first > other.entries_[j].first)) {
      if (other.entries_[j].second > value_tol) return false;  // unmatched entry
      ++j;
    } else {
      if (entries_[i].second > value_tol) return false;
      ++i;
    }
  }
  return true;
}

double distribution_distance(const WeightMap& a, const WeightMap& b) {
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  double dist = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ea.size() || j < eb.size()) {
    const bool left = i < ea.size();
    const bool right = j < eb.size();
    if (left && right && std::abs(ea[i].first - eb[j].first) <= kPayoffTol) {
      dist = std::max(dist, std::abs(ea[i].second - eb[j].second));
      ++i, ++j;
    } else if (right && (!left || ea[i].first > eb[j].first)) {
      dist = std::max(dist, eb[j].second);
      ++j;
    } else {
      dist = std::max(dist, ea[i].second);
      ++i;
    }
  }
  return dist;
}

WeightMap weight_map(const Game& g) {
  const SpectralDecomposition spec = spectral_decompose(g.observable());
  std::vector<std::pair<double, double>> raw;
  raw.reserve(spec.count());
  for (std::size_t k = 0; k < spec.count(); ++k) {
    const double w =
        (g.state().vec().adjoint() * spec.projectors[k] * g.state().vec())(0).real();
    const double cash = g.payoff().at(spec.eigenvalues[k], kPayoffTol, "PayoffUndefined");
    raw.emplace_back(cash, w);
  }
  return WeightMap::from_raw(std::move(raw));
}

bool equivalent(const Game& a, const Game& b, double value_tol) {
  return weight_map(a).same_distribution(weight_map(b), value_tol);
}

Game canonicalize(const Game& g) { return canonical_game_from(weight_map(g)); }

bool same_canonical_form(const Game& a, const Game& b, double amp_tol) {
  const Game ca = canonicalize(a);
  const Game cb = canonicalize(b);
  if (ca.dim() != cb.dim()) return false;
  if (!ca.payoff().same_table(cb.payoff())) return false;
  return (ca.state().vec() - cb.state().vec()).cwiseAbs().maxCoeff() <= amp_tol;
}

CompoundGame::CompoundGame(StateVector state, HermitianOperator observable,
                           std::vector<std::pair<double, Outcome>> outcomes)
    : state_(std::move(state)),
      observable_(std::move(observable)),
      outcomes_(std::move(outcomes)) {
  if (state_.dim() != observable_.dim())
    throw ValidationError("DimMismatch", "state dim vs observable dim");
  std::sort(outcomes_.begin(), outcomes_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < outcomes_.size(); ++i)
    if (outcomes_[i].first - outcomes_[i - 1].first <= kPayoffTol)
      throw ValidationError("DuplicateKey", "duplicate outcome eigenvalue");
  for (double x : spectral_decompose(observable_).eigenvalues) {
    const bool covered = std::any_of(
        outcomes_.begin(), outcomes_.end(),
        [x](const auto& o) { return std::abs(o.first - x) <= kPayoffTol; });
    if (!covered)
      throw ValidationError("PayoffUndefined",
                            "outcome map lacks eigenvalue " + std::to_string(x));
  }
  rank_ = 0;
  for (const auto& [x, o] : outcomes_)
    if (const auto* sub = std::get_if<std::shared_ptr<const CompoundGame>>(&o))
      rank_ = std::max(rank_, (*sub)->rank() + 1);
}

CompoundGame CompoundGame::from_game(const Game& g) {
  std::vector<std::pair<double, Outcome>> outcomes;
  for (const auto& [x, cash] : g.payoff().entries()) outcomes.emplace_back(x, cash);
  return CompoundGame(g.state(), g.observable(), std::move(outcomes));
}

CompoundGame::Outcome CompoundGame::sub(CompoundGame g) {
  return std::make_shared<const CompoundGame>(std::move(g));
}

namespace {

void accumulate_paths(const CompoundGame& c, double path_weight,
                      std::vector<std::pair<double, double>>& out) {
  const SpectralDecomposition spec = spectral_decompose(c.observable());
  for (std::size_t k = 0; k < spec.count(); ++k) {
    const double x = spec.eigenvalues[k];
    const double w =
        path_weight *
        (c.state().vec().adjoint() * spec.projectors[k] * c.state().vec())(0).real();
    const auto it = std::find_if(
        c.outcomes().begin(), c.outcomes().end(),
        [x](const auto& o) { return std::abs(o.first - x) <= kPayoffTol; });
    if (it == c.outcomes().end())
      throw ValidationError("PayoffUndefined", "outcome map lacks eigenvalue");
    if (const auto* cash = std::get_if<double>(&it->second))
      out.emplace_back(*cash, w);
    else
      accumulate_paths(*std::get<std::shared_ptr<const CompoundGame>>(it->second),
                       w, out);
  }
}

}  // namespace

Game flatten(const CompoundGame& c) {
  if (c.rank() == 0) {
    std::vector<std::pair<double, double>> payoff;
    for (const auto& [x, o] : c.outcomes())
      payoff.emplace_back(x, std::get<double>(o));
    return Game(c.state(), c.observable(), PayoffFunction(std::move(payoff)));
  }
  std::vector<std::pair<double, double>> raw;
  accumulate_paths(c, 1.0, raw);
  return canonical_game_from(WeightMap::from_raw(std::move(raw)));
}

}  // namespace qgame
