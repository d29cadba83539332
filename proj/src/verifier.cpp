#include "qgame/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "qgame/errors.hpp"
#include "qgame/transforms.hpp"

namespace qgame {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const ValueFunction& born_vf() {
  static const ValueFunction vf = ValueFunction::born();
  return vf;
}

// Seeded state with every component bounded away from zero.
StateVector seeded_state(std::uint64_t seed, std::uint64_t stream, int dim) {
  Rng rng(seed, stream);
  Vector amps(dim);
  for (int i = 0; i < dim; ++i) {
    const double r = 0.3 + 0.7 * rng.uniform();
    const double ph = 2.0 * M_PI * rng.uniform();
    amps(i) = Complex(r * std::cos(ph), r * std::sin(ph));
  }
  return StateVector::normalized(amps);
}

std::vector<double> ramp(int n) {
  std::vector<double> xs(n);
  std::iota(xs.begin(), xs.end(), 1.0);
  return xs;
}

// ---- S1: reflection symmetry pins the equal superposition to the midpoint ----

StageReport stage_s1(const StageParams& p, std::uint64_t) {
  StageReport r;
  r.stage = "S1";
  r.params = {{"x1", fmt(p.x1)}, {"x2", fmt(p.x2)}};
  const double x1 = p.x1, x2 = p.x2;

  const HermitianOperator x = HermitianOperator::diagonal({x1, x2});
  const PayoffFunction id = RealMap::identity_on({x1, x2});
  const Game g(StateVector::uniform(2), x, id);

  const Isometry u = reflection_unitary(x, x1, x2);
  r.add(close_check("reflection fixes the equal superposition",
                    (u.mat() * g.state().vec() - g.state().vec()).cwiseAbs().maxCoeff(),
                    0.0));

  const HermitianOperator fx =
      apply_function(x, [&](double v) { return -v + x1 + x2; });
  const Game g1 = measurement_equivalence(g, u, fx, id);
  r.add(close_check("rotating into the reflected frame preserves the value",
                    born_value(g1), born_value(g)));

  const RealMap reflect =
      RealMap::tabulate({x1, x2}, [&](double v) { return -v + x1 + x2; });
  const Game g2 = payoff_equivalence(g1, reflect);
  r.add(close_check("relabeling the spectrum back preserves the value",
                    born_value(g2), born_value(g1)));
  r.add(close_check("reflected payoff values to the payoff sum minus the original",
                    born_value(g2), (x1 + x2) - born_value(g)));
  r.add(close_check("the symmetric game values to the midpoint", born_value(g),
                    0.5 * (x1 + x2)));

  // Degenerate case: the same game living inside a larger space.
  const double x3 = std::max(x1, x2) + 3.5;
  const Game g_emb = measurement_equivalence(
      g, embed_subspace({0, 1}, 3), HermitianOperator::diagonal({x1, x2, x3}),
      RealMap::identity_on({x1, x2, x3}));
  r.add(close_check("embedding into a larger space preserves the weight map",
                    distribution_distance(weight_map(g_emb), weight_map(g)), 0.0));
  r.add(close_check("embedded game keeps the midpoint value", born_value(g_emb),
                    0.5 * (x1 + x2)));

  // Negative control: the symmetry argument needs equal amplitudes.
  Vector skew(2);
  skew << std::sqrt(0.3), std::sqrt(0.7);
  const Game g_skew(StateVector(skew), x, id);
  r.add(apart_check("unequal amplitudes are not fixed by the reflection",
                    (u.mat() * skew - skew).cwiseAbs().maxCoeff(), 0.0));
  r.add(apart_check("unequal amplitudes escape the midpoint conclusion",
                    born_value(g_skew), 0.5 * (x1 + x2)));
  return r;
}

// ---- S2: doubling compositions value uniform games at the average ----

SequentialPlay doubling_tree(const std::vector<double>& xs) {
  if (xs.size() == 1) return SequentialPlay::cash(xs[0]);
  const std::size_t half = xs.size() / 2;
  const std::vector<double> lo(xs.begin(), xs.begin() + half);
  const std::vector<double> hi(xs.begin() + half, xs.end());
  const HermitianOperator y = HermitianOperator::diagonal({1.0, 2.0});
  std::vector<std::pair<double, SequentialPlay>> conts;
  conts.emplace_back(1.0, doubling_tree(lo));
  conts.emplace_back(2.0, doubling_tree(hi));
  return SequentialPlay::measure(StateVector::uniform(2),
                                 MeasurementProcedure::standard(y), std::move(conts));
}

StageReport stage_s2(const StageParams& p, std::uint64_t) {
  StageReport r;
  r.stage = "S2";
  r.params = {{"n_max", std::to_string(p.n_max)}};
  for (int n = 1; n <= p.n_max; ++n) {
    const int count = 1 << n;
    const std::vector<double> xs = ramp(count);
    const double mean = 0.5 * (count + 1);
    const Game flat(StateVector::uniform(count), HermitianOperator::diagonal(xs),
                    RealMap::identity_on(xs));
    const BranchSet composite = enumerate_branches(doubling_tree(xs));
    const std::string tag = "N=" + std::to_string(count) + ": ";
    r.add(close_check(tag + "doubling composition reproduces the flat weight map",
                      distribution_distance(composite.aggregate(), weight_map(flat)),
                      0.0));
    r.add(close_check(tag + "composite value is the uniform average",
                      evaluate(born_vf(), composite), mean));
    r.add(close_check(tag + "flat value is the uniform average", born_value(flat),
                      mean));
  }
  return r;
}

// ---- S3: splitting a two-branch game into an equal superposition ----

StageReport stage_s3(const StageParams& p, std::uint64_t) {
  StageReport r;
  r.stage = "S3";
  r.params = {{"pairs", "(1,3) (3,5)"}, {"x1", fmt(p.x1)}, {"x2", fmt(p.x2)}};
  const std::vector<std::pair<int, int>> pairs = {{1, 3}, {3, 5}};
  for (const auto& [a1, a2] : pairs) {
    const int n = a1 + a2;
    Vector amps(2);
    amps << std::sqrt(double(a1) / n), std::sqrt(double(a2) / n);
    const HermitianOperator x = HermitianOperator::diagonal({p.x1, p.x2});
    const PayoffFunction id = RealMap::identity_on({p.x1, p.x2});
    const Game g(StateVector(amps), x, id);

    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = i < a1 ? p.x1 : p.x2;
    const Game split = measurement_equivalence(
        g, splitting_isometry(a1, a2), HermitianOperator::diagonal(diag), id);

    const std::string tag =
        "(" + std::to_string(a1) + "," + std::to_string(a2) + "): ";
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
      dev = std::max(dev, std::abs(std::abs(split.state().amplitude(i)) -
                                   1.0 / std::sqrt(double(n))));
    r.add(close_check(tag + "split image is an equal superposition", dev, 0.0));
    r.add(close_check(tag + "splitting preserves the weight map",
                      distribution_distance(weight_map(split), weight_map(g)), 0.0));
    const double expected = (a1 * p.x1 + a2 * p.x2) / n;
    r.add(close_check(tag + "split game values to the weighted average",
                      born_value(split), expected));
    r.add(close_check(tag + "original game values to the weighted average",
                      born_value(g), expected));
  }
  return r;
}

// ---- S4: dyadic bracketing pins irrational weights ----

StageReport stage_s4(const StageParams& p, std::uint64_t) {
  StageReport r;
  r.stage = "S4";
  r.params = {{"a", fmt(p.a)},
              {"depth", std::to_string(p.depth)},
              {"x1", fmt(p.x1)},
              {"x2", fmt(p.x2)}};

  const double hi_pay = std::max(p.x1, p.x2);
  const double lo_pay = std::min(p.x1, p.x2);
  // weight carried by the higher payoff
  const double w = p.x1 >= p.x2 ? p.a : 1.0 - p.a;
  Vector amps(2);
  amps << std::sqrt(p.a), std::sqrt(1.0 - p.a);
  const Game g(StateVector(amps), HermitianOperator::diagonal({p.x1, p.x2}),
               RealMap::identity_on({p.x1, p.x2}));
  const double v = born_value(g);
  const double v_true = p.a * p.x1 + (1.0 - p.a) * p.x2;

  // Approximation guarantee of the dyadic sequences themselves.
  double seq_violation = 0.0;
  for (bool dec : {true, false}) {
    const DyadicSequence seq = DyadicSequence::build(w, p.depth, dec);
    for (const Dyadic& t : seq.terms)
      seq_violation = std::max(
          seq_violation, std::abs(t.value() - w) - std::ldexp(1.0, -t.exponent));
  }
  r.add(close_check("dyadic approximants stay within their guarantee",
                    std::max(0.0, seq_violation), 0.0));

  double containment = 0.0, growth = 0.0, width = 0.0, prev_width = 0.0;
  for (int n = 1; n <= p.depth; ++n) {
    const double d = dyadic_approx(w, n, true).value();
    const double i = dyadic_approx(w, n, false).value();
    const double upper = d * hi_pay + (1.0 - d) * lo_pay;
    const double lower = i * hi_pay + (1.0 - i) * lo_pay;
    containment = std::max({containment, lower - v, v - upper});
    width = upper - lower;
    if (n > 1) growth = std::max(growth, width - prev_width);
    prev_width = width;
  }
  r.add(close_check("dyadic brackets contain the value at every depth",
                    std::max(0.0, containment), 0.0));
  r.add(close_check("bracket widths never grow with depth", std::max(0.0, growth),
                    0.0));
  r.add(close_check("final bracket width within the dyadic bound", width, 0.0,
                    std::abs(p.x1 - p.x2) * std::ldexp(1.0, -p.depth) + kValueTol));

  // Companion games at the final depth make the dominance chain concrete.
  const double d = dyadic_approx(w, p.depth, true).value();
  const double i = dyadic_approx(w, p.depth, false).value();
  const auto mixture = [&](double w_hi, double w_mid, bool mid_high) {
    Vector a3(3);
    a3 << std::sqrt(w_hi), std::sqrt(w_mid), std::sqrt(1.0 - w_hi - w_mid);
    const double mid_pay = mid_high ? hi_pay : lo_pay;
    return Game(StateVector::normalized(a3), HermitianOperator::diagonal({1, 2, 3}),
                RealMap({{1.0, hi_pay}, {2.0, mid_pay}, {3.0, lo_pay}}));
  };
  const Game upper_game = mixture(w, d - w, true);    // remainder promoted to hi
  const Game upper_copy = mixture(w, d - w, false);   // same weights, true payoffs
  const Game lower_game = mixture(i, w - i, false);   // remainder demoted to lo
  const Game lower_copy = mixture(i, w - i, true);
  r.add(close_check("upper companion values to its dyadic mixture",
                    born_value(upper_game), d * hi_pay + (1.0 - d) * lo_pay));
  r.add(close_check("lower companion values to its dyadic mixture",
                    born_value(lower_game), i * hi_pay + (1.0 - i) * lo_pay));
  r.add(close_check("upper companion dominates a copy of the game",
                    std::max(0.0, born_value(upper_copy) - born_value(upper_game)),
                    0.0));
  r.add(close_check("lower companion is dominated by a copy of the game",
                    std::max(0.0, born_value(lower_game) - born_value(lower_copy)),
                    0.0));
  r.add(close_check("the dominated copies are the game itself",
                    std::max(distribution_distance(weight_map(upper_copy), weight_map(g)),
                             distribution_distance(weight_map(lower_copy), weight_map(g))),
                    0.0));
  r.add(close_check("value equals the target mixture", v, v_true,
                    std::abs(p.x1 - p.x2) * std::ldexp(1.0, -p.depth) + kValueTol));
  return r;
}

// ---- S5: value is blind to per-eigenstate phases ----

StageReport stage_s5(const StageParams&, std::uint64_t seed) {
  StageReport r;
  r.stage = "S5";
  r.params = {{"dims", "2 4"}, {"draws", "2"}};
  for (int dim : {2, 4}) {
    Rng rng(seed, 7300 + static_cast<std::uint64_t>(dim));
    const StateVector psi = seeded_state(seed, 7350 + dim, dim);
    const std::vector<double> xs = ramp(dim);
    const HermitianOperator x = HermitianOperator::diagonal(xs);
    const PayoffFunction pay = RealMap::identity_on(xs);
    const Game g(psi, x, pay);
    for (int draw = 0; draw < 2; ++draw) {
      Matrix u = Matrix::Zero(dim, dim);
      for (int i = 0; i < dim; ++i) {
        const double theta = 2.0 * M_PI * rng.uniform();
        u(i, i) = Complex(std::cos(theta), std::sin(theta));
      }
      const Game rotated = measurement_equivalence(g, Isometry(u), x, pay);
      const std::string tag =
          "dim " + std::to_string(dim) + " draw " + std::to_string(draw) + ": ";
      r.add(close_check(tag + "phase unitary leaves the observable fixed",
                        (u * x.mat() - x.mat() * u).cwiseAbs().maxCoeff(), 0.0,
                        1e-12));
      r.add(close_check(tag + "phases preserve the weight map",
                        distribution_distance(weight_map(rotated), weight_map(g)),
                        0.0, 1e-12));
      r.add(close_check(tag + "phases preserve the value", born_value(rotated),
                        born_value(g), 1e-12));
    }
  }
  return r;
}

// ---- S6: an n-term game assembled from binary measurements ----

SequentialPlay uneven_tree(const std::vector<double>& xs,
                           const std::vector<double>& ws) {
  if (xs.size() == 1) return SequentialPlay::cash(xs[0]);
  const std::size_t half = (xs.size() + 1) / 2;
  const double wlo = std::accumulate(ws.begin(), ws.begin() + half, 0.0);
  const double whi = std::accumulate(ws.begin() + half, ws.end(), 0.0);
  Vector amps(2);
  amps << std::sqrt(wlo / (wlo + whi)), std::sqrt(whi / (wlo + whi));
  const HermitianOperator y = HermitianOperator::diagonal({1.0, 2.0});
  std::vector<std::pair<double, SequentialPlay>> conts;
  conts.emplace_back(1.0, uneven_tree({xs.begin(), xs.begin() + half},
                                      {ws.begin(), ws.begin() + half}));
  conts.emplace_back(2.0, uneven_tree({xs.begin() + half, xs.end()},
                                      {ws.begin() + half, ws.end()}));
  return SequentialPlay::measure(StateVector::normalized(amps),
                                 MeasurementProcedure::standard(y), std::move(conts));
}

CompoundGame uneven_compound(const std::vector<double>& xs,
                             const std::vector<double>& ws) {
  if (xs.size() == 1)
    return CompoundGame(StateVector::basis(1, 0), HermitianOperator::diagonal({1.0}),
                        {{1.0, CompoundGame::Outcome(xs[0])}});
  const std::size_t half = (xs.size() + 1) / 2;
  const double wlo = std::accumulate(ws.begin(), ws.begin() + half, 0.0);
  const double whi = std::accumulate(ws.begin() + half, ws.end(), 0.0);
  Vector amps(2);
  amps << std::sqrt(wlo / (wlo + whi)), std::sqrt(whi / (wlo + whi));
  std::vector<std::pair<double, CompoundGame::Outcome>> outcomes;
  outcomes.emplace_back(1.0, CompoundGame::sub(uneven_compound(
                                 {xs.begin(), xs.begin() + half},
                                 {ws.begin(), ws.begin() + half})));
  outcomes.emplace_back(2.0, CompoundGame::sub(uneven_compound(
                                 {xs.begin() + half, xs.end()},
                                 {ws.begin() + half, ws.end()})));
  return CompoundGame(StateVector::normalized(amps),
                      HermitianOperator::diagonal({1.0, 2.0}), std::move(outcomes));
}

StageReport stage_s6(const StageParams&, std::uint64_t seed) {
  StageReport r;
  r.stage = "S6";
  const int n = 5;
  r.params = {{"n", std::to_string(n)}};

  Rng rng(seed, 7600);
  std::vector<double> ws(n);
  double total = 0.0;
  for (auto& wv : ws) {
    wv = 0.2 + 0.8 * rng.uniform();
    total += wv;
  }
  for (auto& wv : ws) wv /= total;

  const std::vector<double> xs = ramp(n);
  Vector amps(n);
  for (int idx = 0; idx < n; ++idx) {
    const double ph = 2.0 * M_PI * rng.uniform();
    amps(idx) = std::sqrt(ws[idx]) * Complex(std::cos(ph), std::sin(ph));
  }
  const Game flat(StateVector::normalized(amps), HermitianOperator::diagonal(xs),
                  RealMap::identity_on(xs));
  double target = 0.0;
  for (int idx = 0; idx < n; ++idx) target += ws[idx] * xs[idx];

  const BranchSet composite = enumerate_branches(uneven_tree(xs, ws));
  r.add(close_check("binary splits aggregate to the weight map",
                    distribution_distance(composite.aggregate(), weight_map(flat)),
                    0.0));
  r.add(close_check("composite value equals the weighted sum",
                    evaluate(born_vf(), composite), target));
  r.add(close_check("flat value equals the weighted sum", born_value(flat), target));
  r.add(close_check("flattened compound carries the same weight map",
                    distribution_distance(weight_map(flatten(uneven_compound(xs, ws))),
                                          weight_map(flat)),
                    0.0));
  return r;
}

// ---- V2: permutation payoffs and the degenerate limit ----

StageReport stage_v2(const StageParams&, std::uint64_t) {
  StageReport r;
  r.stage = "V2";
  const std::vector<double> xs = {0.0, 1.0, 2.5};
  const int n = static_cast<int>(xs.size());
  r.params = {{"n", std::to_string(n)}};
  const double total = std::accumulate(xs.begin(), xs.end(), 0.0);

  const HermitianOperator x = HermitianOperator::diagonal(xs);
  const StateVector psi = StateVector::uniform(n);
  const Game base(psi, x, RealMap::identity_on(xs));

  std::vector<int> perm = {0, 1, 2};
  std::vector<PayoffFunction> permuted;
  do {
    std::vector<std::pair<double, double>> entries;
    for (int idx = 0; idx < n; ++idx) entries.emplace_back(xs[idx], xs[perm[idx]]);
    permuted.emplace_back(entries);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double factorial = 6.0, sub_factorial = 2.0;  // 3!, 2!

  // Summing over all relabelings gives a constant payoff.
  PayoffFunction sum = RealMap::constant(0.0, xs);
  double const_dev = 0.0;
  for (const auto& pf : permuted) sum = sum.plus(pf);
  for (const auto& [key, value] : sum.entries())
    const_dev = std::max(const_dev, std::abs(value - sub_factorial * total));
  r.add(close_check("permuted payoffs sum to a constant", const_dev, 0.0));

  double value_sum = 0.0, sym_dev = 0.0;
  for (const auto& pf : permuted) {
    const double pv = born_value(Game(psi, x, pf));
    value_sum += pv;
    sym_dev = std::max(sym_dev, std::abs(pv - total / n));
  }
  r.add(close_check("summed game values add up", born_value(Game(psi, x, sum)),
                    value_sum));
  r.add(close_check("every relabeling shares the uniform value", sym_dev, 0.0));
  r.add(close_check("n! times the value equals (n-1)! times the payoff total",
                    factorial * born_value(base), sub_factorial * total));
  r.add(close_check("equal superposition values to the uniform average",
                    born_value(base), total / n));

  // One transposition realized explicitly as a measurement equivalence.
  Matrix swap = Matrix::Zero(n, n);
  swap(0, 1) = swap(1, 0) = swap(2, 2) = 1.0;
  const Isometry u(swap);
  const Game swapped = measurement_equivalence(
      base, u, conjugate(x, u), base.payoff());
  r.add(close_check("a transposition is a measurement equivalence",
                    born_value(swapped), born_value(base)));

  // Degenerate limit: two payoffs merge as 1 + 1/m approaches 1.
  const PayoffFunction limit({{xs[0], 0.0}, {xs[1], 1.0}, {xs[2], 1.0}});
  const double v_limit = born_value(Game(psi, x, limit));
  double below = 0.0, above = 0.0;
  for (double m : {10.0, 100.0, 1000.0}) {
    const PayoffFunction near({{xs[0], 0.0}, {xs[1], 1.0}, {xs[2], 1.0 + 1.0 / m}});
    const double v_near = born_value(Game(psi, x, near));
    below = std::max(below, v_limit - v_near);
    above = std::max(above, v_near - 1.0 / m - v_limit);
  }
  r.add(close_check("the merged payoff is dominated by its approximants",
                    std::max(0.0, below), 0.0));
  r.add(close_check("approximants exceed the merged payoff by at most the gap",
                    std::max(0.0, above), 0.0));

  const Game merged = payoff_equivalence(
      Game(psi, x, limit), RealMap({{xs[0], 0.0}, {xs[1], 1.0}, {xs[2], 1.0}}));
  r.add(close_check("merging equal payoffs preserves the value",
                    born_value(merged), v_limit));
  r.add(close_check("merged game values to the degenerate average", v_limit,
                    2.0 / 3.0));
  return r;
}

// ---- V3: rational weights against uniform relabelings ----

StageReport stage_v3(const StageParams& p, std::uint64_t) {
  StageReport r;
  r.stage = "V3";
  r.params = {{"pairs", "(1,3) (2,5) (3,8)"}, {"x1", fmt(p.x1)}, {"x2", fmt(p.x2)}};
  const std::vector<std::pair<int, int>> pairs = {{1, 3}, {2, 5}, {3, 8}};
  for (const auto& [num, den] : pairs) {
    const double frac = double(num) / den;
    Vector amps(2);
    amps << std::sqrt(frac), std::sqrt(1.0 - frac);
    const Game rational(StateVector(amps), HermitianOperator::diagonal({p.x1, p.x2}),
                        RealMap::identity_on({p.x1, p.x2}));

    const std::vector<double> keys = ramp(den);
    std::vector<std::pair<double, double>> entries;
    for (int idx = 0; idx < den; ++idx)
      entries.emplace_back(keys[idx], idx < num ? p.x1 : p.x2);
    const Game uniform(StateVector::uniform(den), HermitianOperator::diagonal(keys),
                       PayoffFunction(entries));

    const std::string tag =
        std::to_string(num) + "/" + std::to_string(den) + ": ";
    r.add(close_check(tag + "uniform relabeling carries the same weight map",
                      distribution_distance(weight_map(rational), weight_map(uniform)),
                      0.0));
    r.add(close_check(tag + "canonical forms coincide",
                      same_canonical_form(rational, uniform) ? 1.0 : 0.0, 1.0, 0.5));
    r.add(close_check(tag + "values agree", born_value(rational),
                      born_value(uniform)));
    r.add(close_check(tag + "value is the rational mixture", born_value(rational),
                      frac * p.x1 + (1.0 - frac) * p.x2));
  }
  return r;
}

// ---- V4: two-sided rational bracketing with a low auxiliary payoff ----

StageReport stage_v4(const StageParams& p, std::uint64_t seed) {
  StageReport r;
  r.stage = "V4";
  const int n = 3;
  r.params = {{"depth", std::to_string(p.depth)}, {"n", std::to_string(n)}};

  Rng rng(seed, 7900);
  std::vector<double> ws(n);
  double total = 0.0;
  for (auto& wv : ws) {
    wv = 0.2 + 0.8 * rng.uniform();
    total += wv;
  }
  for (auto& wv : ws) wv /= total;

  const std::vector<double> xs = ramp(n);  // payoffs 1, 2, 3
  Vector amps(n);
  for (int idx = 0; idx < n; ++idx) amps(idx) = std::sqrt(ws[idx]);
  const Game g(StateVector::normalized(amps), HermitianOperator::diagonal(xs),
               RealMap::identity_on(xs));
  const double v = born_value(g);
  const double aux = xs.front() - 1.0;       // strictly below every payoff
  const double aux_neg = -xs.back() - 1.0;   // same, for the negated game
  r.add(close_check("auxiliary payoff sits one unit below the minimum", aux,
                    xs.front() - 1.0));

  double floor_violation = 0.0, containment = 0.0, growth = 0.0;
  double width = 0.0, prev_width = 0.0;
  double lower_final = 0.0, upper_final = 0.0, rem_final = 0.0;
  std::vector<double> k_final(n);
  for (int d = 1; d <= p.depth; ++d) {
    const double q = std::ldexp(1.0, d);
    double lower = 0.0, upper = 0.0, rem = 1.0;
    for (int idx = 0; idx < n; ++idx) {
      const double ki = std::floor(ws[idx] * q) / q;
      floor_violation = std::max(floor_violation, ki - ws[idx]);
      lower += ki * xs[idx];
      upper += ki * xs[idx];
      rem -= ki;
      if (d == p.depth) k_final[idx] = ki;
    }
    lower += rem * aux;
    upper += rem * -aux_neg;  // negated-game bound folded back
    containment = std::max({containment, lower - v, v - upper});
    width = upper - lower;
    if (d > 1) growth = std::max(growth, width - prev_width);
    prev_width = width;
    if (d == p.depth) {
      lower_final = lower;
      upper_final = upper;
      rem_final = rem;
    }
  }
  r.add(close_check("floor approximants never exceed the weights",
                    std::max(0.0, floor_violation), 0.0));
  r.add(close_check("rational companions bracket the value at every depth",
                    std::max(0.0, containment), 0.0));
  r.add(close_check("bracket widths never grow with depth", std::max(0.0, growth),
                    0.0));
  const double span = xs.back() - xs.front();
  r.add(close_check("final bracket width within the rational bound", width, 0.0,
                    (span + 2.0) * (n - 1) * std::ldexp(1.0, -p.depth) + kValueTol));

  // Companion games at the final depth, built as actual rational-weight games.
  Vector lo_amps(n + 1), hi_amps(n + 1);
  std::vector<double> keys = ramp(n + 1);
  std::vector<std::pair<double, double>> lo_pay, hi_pay;
  for (int idx = 0; idx < n; ++idx) {
    lo_amps(idx) = std::sqrt(k_final[idx]);
    hi_amps(idx) = std::sqrt(k_final[idx]);
    lo_pay.emplace_back(keys[idx], xs[idx]);
    hi_pay.emplace_back(keys[idx], -xs[idx]);
  }
  lo_amps(n) = std::sqrt(rem_final);
  hi_amps(n) = std::sqrt(rem_final);
  lo_pay.emplace_back(keys[n], aux);
  hi_pay.emplace_back(keys[n], aux_neg);
  const Game lower_game(StateVector::normalized(lo_amps),
                        HermitianOperator::diagonal(keys), PayoffFunction(lo_pay));
  const Game upper_game(StateVector::normalized(hi_amps),
                        HermitianOperator::diagonal(keys), PayoffFunction(hi_pay));
  r.add(close_check("floor companion realizes its rational value",
                    born_value(lower_game), lower_final));
  r.add(close_check("negated companion realizes the mirrored bound",
                    -born_value(upper_game), upper_final));
  r.add(close_check("value equals the weighted mixture", v,
                    std::inner_product(ws.begin(), ws.end(), xs.begin(), 0.0)));
  return r;
}

// ---- REP: probabilities reconstruct every payoff's value ----

StageReport stage_rep(const StageParams&, std::uint64_t seed) {
  StageReport r;
  r.stage = "REP";
  r.params = {{"corpus", "100"}, {"dim", "4"}};

  const HermitianOperator x = HermitianOperator::diagonal({1.0, 2.0, 2.0, 5.0});
  const StateVector psi = seeded_state(seed, 8100, 4);
  const auto spec = spectral_decompose(x);
  std::vector<PayoffFunction> corpus;
  for (int i = 0; i < 100; ++i) {
    Rng rng(seed, 8110 + static_cast<std::uint64_t>(i));
    corpus.push_back(random_payoff(rng, spec.eigenvalues));
  }

  RepresentationOptions opts;
  opts.seed = seed;
  const RepresentationReport rep =
      check_representation(born_vf(), psi, x, corpus, opts);
  r.add(close_check("additivity and dominance preconditions hold",
                    rep.vacuous ? 1.0 : 0.0, 0.0, 0.5));
  r.add(close_check("extracted probabilities sum to one",
                    rep.probabilities.sum(), 1.0, 1e-12));
  double proj_dev = 0.0;
  for (std::size_t k = 0; k < spec.count(); ++k) {
    const double expectation =
        (psi.vec().adjoint() * spec.projectors[k] * psi.vec())(0).real();
    proj_dev = std::max(
        proj_dev, std::abs(rep.probabilities.entries[k].second - expectation));
  }
  r.add(close_check("probabilities match projector expectations", proj_dev, 0.0,
                    1e-12));
  r.add(close_check("every corpus payoff reconstructs exactly", rep.max_error, 0.0,
                    1e-12));

  // Negative control: branch counting comes apart once devices vary.
  RepresentationOptions varied;
  varied.seed = seed + 1;
  varied.vary_multiplicities = true;
  const std::vector<PayoffFunction> small(corpus.begin(), corpus.begin() + 30);
  const RepresentationReport bc =
      check_representation(ValueFunction::branch_count(), psi, x, small, varied);
  r.add(apart_check("branch counting fails reconstruction under varied devices",
                    bc.max_error, 0.0, 1e-6));
  return r;
}

// ---- NC: the value decomposes over spectral projectors ----

StageReport stage_nc(const StageParams&, std::uint64_t seed) {
  StageReport r;
  r.stage = "NC";
  r.params = {{"dims", "3"}};

  Vector v3(3);
  v3 << 1.0, 1.0, 1.0;
  const StateVector psi = StateVector::normalized(v3);
  const HermitianOperator x = HermitianOperator::diagonal({1.0, 1.0, 2.0});
  const PayoffFunction id = RealMap::identity_on({1.0, 2.0});
  const NonContextualityReport deg = check_non_contextuality(born_vf(), psi, x, id);
  r.add(close_check("projector decomposition matches on the degenerate game",
                    deg.lhs, deg.rhs));
  r.add(close_check("degenerate game values to four thirds", deg.lhs, 4.0 / 3.0));

  Rng rng(seed, 8200);
  const GeneratedGame gg = random_game(rng, 3, 6);
  const NonContextualityReport rnd = check_non_contextuality(
      born_vf(), gg.game.state(), gg.game.observable(), gg.game.payoff());
  r.add(close_check("projector decomposition matches on a random game", rnd.lhs,
                    rnd.rhs));

  // Negative control: a rotated frame, where the projector games decompose
  // the complement differently than the full observable does. Weight-power
  // depends on that realization; the value of the born function does not.
  auto givens = [](int i, int j, double theta) {
    Matrix g = Matrix::Identity(3, 3);
    g(i, i) = std::cos(theta);
    g(j, j) = std::cos(theta);
    g(i, j) = -std::sin(theta);
    g(j, i) = std::sin(theta);
    return g;
  };
  const Matrix rot = givens(0, 1, 0.7) * givens(1, 2, 1.1);
  Matrix diag = Matrix::Zero(3, 3);
  diag(0, 0) = 1.0;
  diag(1, 1) = 2.0;
  diag(2, 2) = 3.0;
  const HermitianOperator rotated(rot * diag * rot.adjoint());
  Vector skew(3);
  skew << 0.6, 0.64, 0.48;
  const PayoffFunction skew_pay = RealMap::identity_on({1.0, 2.0, 3.0});
  const NonContextualityReport wp = check_non_contextuality(
      ValueFunction::weight_power(2.0), StateVector(skew), rotated, skew_pay);
  r.add(apart_check("weight-power counting breaks the decomposition", wp.lhs,
                    wp.rhs));
  const NonContextualityReport born_rot = check_non_contextuality(
      born_vf(), StateVector(skew), rotated, skew_pay);
  r.add(close_check("projector decomposition matches in the rotated frame",
                    born_rot.lhs, born_rot.rhs));
  return r;
}

// ---- GLEASON: probabilities force the state's density operator ----

StageReport stage_gleason(const StageParams&, std::uint64_t seed) {
  StageReport r;
  r.stage = "GLEASON";
  r.params = {{"dim", "3"}};
  const auto family = spanning_projector_observables(3);

  const GleasonFit basis_fit =
      gleason_fit(born_vf(), StateVector::basis(3, 0), family);
  r.add(close_check("basis state fits with negligible residual",
                    basis_fit.residual, 0.0, 1e-9));
  r.add(close_check("basis state recovers its own projector",
                    basis_fit.frobenius_to_state, 0.0, 1e-6));

  const StateVector psi = seeded_state(seed, 8300, 3);
  const GleasonFit fit = gleason_fit(born_vf(), psi, family);
  r.add(close_check("fit reproduces every projector probability", fit.residual,
                    0.0, 1e-6));
  r.add(close_check("fitted operator is the state projector",
                    fit.frobenius_to_state, 0.0, 1e-6));
  r.add(close_check("state expectation is certain", fit.fidelity, 1.0, 1e-6));
  return r;
}

// ---- LIN: scaling payoffs scales the value, dyadically bracketed ----

StageReport stage_lin(const StageParams& p, std::uint64_t seed) {
  StageReport r;
  r.stage = "LIN";
  r.params = {{"depth", std::to_string(p.depth)}, {"a", fmt(p.a)}};

  const StateVector psi = seeded_state(seed, 8400, 3);
  const HermitianOperator x = HermitianOperator::diagonal({1.0, 2.0, 3.0});
  const PayoffFunction pay({{1.0, 1.0}, {2.0, -0.5}, {3.0, 2.0}});

  for (double a : {1.0, p.a, -2.0}) {
    const LinearityReport lr =
        check_linearity_lemma(born_vf(), psi, x, pay, a, p.depth);
    const std::string tag = "a=" + fmt(a) + ": ";
    r.add(close_check(tag + "dyadic brackets hold at every depth",
                      lr.bracket_ok ? 1.0 : 0.0, 1.0, 0.5));
    r.add(close_check(tag + "scaled value within the dyadic bound", lr.final_gap,
                      0.0, lr.bound));
  }
  const LinearityReport unit =
      check_linearity_lemma(born_vf(), psi, x, pay, 1.0, p.depth);
  r.add(close_check("scaling by one is exact", unit.final_gap, 0.0, 1e-12));
  return r;
}

using StageFn = StageReport (*)(const StageParams&, std::uint64_t);

struct StageEntry {
  const char* id;
  StageFn fn;
};

// Kept in sorted id order; reports come out in this canonical order.
constexpr StageEntry kStages[] = {
    {"GLEASON", stage_gleason}, {"LIN", stage_lin}, {"NC", stage_nc},
    {"REP", stage_rep},         {"S1", stage_s1},   {"S2", stage_s2},
    {"S3", stage_s3},           {"S4", stage_s4},   {"S5", stage_s5},
    {"S6", stage_s6},           {"V2", stage_v2},   {"V3", stage_v3},
    {"V4", stage_v4},
};

void validate_params(const StageParams& p) {
  if (std::abs(p.x1 - p.x2) <= kPayoffTol)
    throw ValidationError("BadValue", "payoffs x1 and x2 must be distinct");
  if (!(p.a > 0.0 && p.a < 1.0))
    throw ValidationError("OutOfRange", "weight a must lie strictly inside (0, 1)");
  if (p.depth < 1 || p.depth > 50)
    throw ValidationError("OutOfRange", "depth must lie in [1, 50]");
  if (p.n_max < 1 || p.n_max > 6)
    throw ValidationError("OutOfRange", "n_max must lie in [1, 6]");
  if (p.multiplicity < 1)
    throw ValidationError("BadValue", "multiplicity must be >= 1");
}

}  // namespace

Check close_check(std::string description, double lhs, double rhs, double tol) {
  Check c;
  c.description = std::move(description);
  c.lhs = lhs;
  c.rhs = rhs;
  c.tol = tol;
  c.apart = false;
  c.pass = std::abs(lhs - rhs) <= tol;
  return c;
}

Check apart_check(std::string description, double lhs, double rhs, double tol) {
  Check c;
  c.description = std::move(description);
  c.lhs = lhs;
  c.rhs = rhs;
  c.tol = tol;
  c.apart = true;
  c.pass = std::abs(lhs - rhs) > tol;
  return c;
}

void StageReport::add(Check c) {
  pass = (checks.empty() ? true : pass) && c.pass;
  checks.push_back(std::move(c));
}

double Dyadic::value() const {
  return static_cast<double>(numerator) * std::ldexp(1.0, -exponent);
}

Dyadic dyadic_approx(double a, int n, bool decreasing) {
  if (!(a > 0.0 && a < 1.0))
    throw ValidationError("OutOfRange",
                          "dyadic target must lie strictly inside (0, 1)");
  if (n < 1 || n > 62)
    throw ValidationError("OutOfRange", "dyadic exponent must lie in [1, 62]");
  const double scaled = std::ldexp(a, n);
  const long long num = decreasing ? static_cast<long long>(std::ceil(scaled))
                                   : static_cast<long long>(std::floor(scaled));
  return Dyadic{num, n};
}

DyadicSequence DyadicSequence::build(double target, int depth, bool decreasing) {
  DyadicSequence s;
  s.target = target;
  s.decreasing = decreasing;
  for (int n = 1; n <= depth; ++n) {
    const Dyadic t = dyadic_approx(target, n, decreasing);
    if (t.numerator == 0) continue;  // skip until the approximant is positive
    s.terms.push_back(t);
  }
  return s;
}

const std::vector<std::string>& stage_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : kStages) v.emplace_back(e.id);
    return v;
  }();
  return ids;
}

StageReport verify_stage(const std::string& stage_id, const StageParams& params,
                         std::uint64_t seed) {
  validate_params(params);
  for (const auto& entry : kStages) {
    if (stage_id != entry.id) continue;
    try {
      return entry.fn(params, seed);
    } catch (const StageConstructionError&) {
      throw;
    } catch (const Error& e) {
      throw StageConstructionError("StageConstructionError",
                                   stage_id + std::string(": ") + e.what());
    }
  }
  throw ValidationError("UnknownStage", "no stage named '" + stage_id + "'");
}

std::vector<StageReport> verify_all(const StageParams& params, std::uint64_t seed) {
  std::vector<StageReport> reports;
  reports.reserve(std::size(kStages));
  for (const auto& entry : kStages)
    reports.push_back(verify_stage(entry.id, params, seed));
  return reports;
}

StageReport device_pair_demo(long multiplicity) {
  if (multiplicity < 1)
    throw ValidationError("BadValue", "multiplicity must be >= 1");
  const AuditInstance inst = device_pair_instance(multiplicity);
  const Game& g = inst.game;
  const auto& [proc_a, proc_b] = *inst.procedures;
  const BranchSet a = run(proc_a, g.state(), g.payoff());
  const BranchSet b = run(proc_b, g.state(), g.payoff());
  const ValueFunction bc = ValueFunction::branch_count();

  StageReport r;
  r.stage = "DEMO";
  r.params = {{"multiplicity", std::to_string(multiplicity)}};
  r.add(close_check("single-readout device instantiates the game",
                    distribution_distance(a.aggregate(), weight_map(g)), 0.0));
  r.add(close_check("multi-readout device instantiates the game",
                    distribution_distance(b.aggregate(), weight_map(g)), 0.0));
  r.add(close_check("born agrees across the devices", evaluate(born_vf(), a),
                    evaluate(born_vf(), b)));
  r.add(close_check("born value is zero", evaluate(born_vf(), a), 0.0));

  const double bc_a = evaluate(bc, a);
  const double bc_b = evaluate(bc, b);
  r.add(close_check("branch count follows the readout formula", bc_b,
                    (multiplicity - 1.0) / (multiplicity + 1.0)));

  const AxiomReport audit =
      check_axiom(bc, Axiom::MeasurementNeutrality, {inst}, 0);
  if (multiplicity > 1) {
    r.add(apart_check("branch counting separates the devices", bc_a, bc_b));
    r.add(close_check("neutrality audit fails with the device witness",
                      audit.pass ? 1.0 : 0.0, 0.0, 0.5));
    if (audit.witness) {
      r.add(close_check("witness records the single-readout value",
                        audit.witness->lhs, bc_a));
      r.add(close_check("witness records the multi-readout value",
                        audit.witness->rhs, bc_b));
    } else {
      r.add(close_check("witness recorded", 0.0, 1.0, 0.5));
    }
  } else {
    r.add(close_check("identical devices agree for branch counting", bc_a, bc_b));
    r.add(close_check("neutrality audit passes for identical devices",
                      audit.pass ? 1.0 : 0.0, 1.0, 0.5));
  }
  return r;
}

}  // namespace qgame
