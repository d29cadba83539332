#include <cmath>

#include "doctest.h"
#include "qgame/transforms.hpp"
#include "qgame/valuation.hpp"
#include "support/oracles.hpp"

using namespace qgame;
using testsupport::thrown_code;

namespace {

Game frozen_game() {
  Vector amps(2);
  amps << 0.6, 0.8;
  return Game(StateVector(amps), HermitianOperator::diagonal({1.0, 2.0}),
              RealMap({{1.0, 5.0}, {2.0, 7.0}}));
}

}  // namespace

TEST_CASE("payoff equivalence relabels the spectrum") {
  const Game g = frozen_game();
  const RealMap affine =
      RealMap::tabulate({1.0, 2.0}, [](double x) { return 2.0 * x + 1.0; });
  const Game h = payoff_equivalence(g, affine);

  CHECK(h.observable().mat()(0, 0).real() == doctest::Approx(3.0));
  CHECK(h.observable().mat()(1, 1).real() == doctest::Approx(5.0));
  CHECK(h.payoff().at(3.0) == doctest::Approx(5.0));
  CHECK(h.payoff().at(5.0) == doctest::Approx(7.0));
  CHECK(distribution_distance(weight_map(g), weight_map(h)) < 1e-12);
}

TEST_CASE("payoff equivalence may merge only same-payoff eigenvalues") {
  const Game g = frozen_game();
  const RealMap collapse = RealMap::constant(0.0, {1.0, 2.0});
  CHECK(thrown_code([&] { payoff_equivalence(g, collapse); }) == "NonInjective");

  const Game same_pay(g.state(), g.observable(), RealMap::constant(3.0, {1.0, 2.0}));
  const Game merged = payoff_equivalence(same_pay, collapse);
  CHECK(weight_map(merged).weight_of(3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measurement equivalence rotates the frame") {
  const Game g = frozen_game();
  Matrix r(2, 2);
  const double c = std::cos(0.4), s = std::sin(0.4);
  r << c, -s, s, c;
  const Isometry u(r);
  const Game h = measurement_equivalence(g, u, conjugate(g.observable(), u), g.payoff());
  CHECK(distribution_distance(weight_map(g), weight_map(h)) < 1e-12);

  // Wrong target observable breaks the intertwining relation.
  CHECK(thrown_code([&] {
          measurement_equivalence(g, u, g.observable(), g.payoff());
        }) == "IntertwinerViolation");
  // Payoff must be preserved on the (relabeled) spectrum.
  CHECK(thrown_code([&] {
          measurement_equivalence(g, u, conjugate(g.observable(), u),
                                  RealMap({{1.0, 5.0}, {2.0, 9.0}}));
        }) == "PayoffMismatch");
  CHECK(thrown_code([&] {
          measurement_equivalence(g, Isometry::identity(3),
                                  HermitianOperator::diagonal({1.0, 2.0, 3.0}),
                                  g.payoff());
        }) == "DimMismatch");
}

TEST_CASE("reflection unitary swaps the named eigenvectors") {
  const HermitianOperator x = HermitianOperator::diagonal({0.0, 1.0});
  const Isometry u = reflection_unitary(x, 0.0, 1.0);

  Vector e0 = Vector::Zero(2), mid(2);
  e0(0) = 1.0;
  mid << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(((u.mat() * e0).cwiseAbs()(1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((u.mat() * mid - mid).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((u.mat() * u.mat() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  // Four symmetric eigenvalues reflect pairwise.
  const HermitianOperator x4 = HermitianOperator::diagonal({0.0, 1.0, 2.0, 3.0});
  const Isometry u4 = reflection_unitary(x4, 0.0, 3.0);
  Vector e1 = Vector::Zero(4);
  e1(1) = 1.0;
  CHECK(((u4.mat() * e1).cwiseAbs()(2)) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(thrown_code([] {
          reflection_unitary(HermitianOperator::diagonal({0.0, 1.0, 5.0}), 0.0, 1.0);
        }) == "SpectrumNotInvariant");
  CHECK(thrown_code([] {
          reflection_unitary(HermitianOperator::diagonal({0.0, 0.0}), 0.0, 0.0);
        }) == "Degenerate");
}

TEST_CASE("splitting isometry spreads a component uniformly") {
  const Isometry u = splitting_isometry(1, 3);
  REQUIRE(u.dim_in() == 2);
  REQUIRE(u.dim_out() == 4);

  Vector amps(2);
  amps << std::sqrt(0.25), std::sqrt(0.75);
  const StateVector img = u.apply(StateVector(amps));
  for (int i = 0; i < 4; ++i)
    CHECK(img.amplitude(i).real() == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(thrown_code([] { splitting_isometry(0, 3); }) == "BadValue");
}

TEST_CASE("subspace embedding targets the named axes") {
  const Isometry u = embed_subspace({0, 2}, 4);
  REQUIRE(u.dim_out() == 4);
  CHECK(u.mat()(0, 0) == Complex(1.0));
  CHECK(u.mat()(2, 1) == Complex(1.0));
  CHECK(u.mat()(1, 0) == Complex(0.0));

  CHECK(thrown_code([] { embed_subspace({0, 4}, 4); }) == "IndexOutOfRange");
  CHECK(thrown_code([] { embed_subspace({1, 1}, 3); }) == "DuplicateIndex");
  CHECK(thrown_code([] { embed_subspace({}, 3); }) == "BadValue");
}

TEST_CASE("random equivalence transforms preserve the weight map") {
  Rng rng(20260816);
  for (int trial = 0; trial < 60; ++trial) {
    const GeneratedGame gg = random_game(rng, 2, 6);
    const WeightMap before = weight_map(gg.game);

    // Random affine spectrum relabeling (order-reversing half the time).
    const double slope = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.uniform());
    const double shift = rng.uniform(-3.0, 3.0);
    const auto distinct = spectral_decompose(gg.game.observable()).eigenvalues;
    const RealMap affine = RealMap::tabulate(
        distinct, [&](double x) { return slope * x + shift; });
    const Game relabeled = payoff_equivalence(gg.game, affine);
    CHECK(distribution_distance(before, weight_map(relabeled)) < 1e-9);

    // Random unitary change of frame on top.
    const Isometry u(random_unitary(rng, relabeled.dim()));
    const Game rotated = measurement_equivalence(
        relabeled, u, conjugate(relabeled.observable(), u), relabeled.payoff());
    CHECK(distribution_distance(before, weight_map(rotated)) < 1e-9);

    // And both agree with the construction-data route.
    CHECK(testsupport::oracle_distance(testsupport::oracle_weight_map(gg),
                                       weight_map(rotated)) < 1e-9);
  }
}
