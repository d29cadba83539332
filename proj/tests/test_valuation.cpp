#include <cmath>
#include <vector>

#include "doctest.h"
#include "qgame/valuation.hpp"
#include "support/oracles.hpp"

using namespace qgame;
using testsupport::thrown_code;

namespace {

Game three_outcome_game() {
  Vector amps(3);
  amps << std::sqrt(1.0 / 12.0), std::sqrt(1.0 / 6.0), std::sqrt(3.0 / 4.0);
  return Game(StateVector(amps), HermitianOperator::diagonal({0.0, 2.0, 5.0}),
              RealMap::identity_on({0.0, 2.0, 5.0}));
}

BranchSet standard_branches(const Game& g) {
  return run(MeasurementProcedure::standard(g.observable()), g.state(), g.payoff());
}

}  // namespace

TEST_CASE("born value is the weight-averaged payoff") {
  const Game g = three_outcome_game();
  const double expected = 2.0 / 6.0 + 5.0 * 3.0 / 4.0;  // 49/12
  CHECK(born_value(g) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected_utility(g) == doctest::Approx(49.0 / 12.0).epsilon(1e-12));
  CHECK(ValueFunction::born()(g) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ValueFunction::born()(standard_branches(g)) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("value function parsing") {
  REQUIRE(ValueFunction::parse("born").has_value());
  CHECK(ValueFunction::parse("born")->kind() == ValueFunction::Kind::Born);
  CHECK(ValueFunction::parse("branch-count")->name() == "branch-count");
  const auto wp = ValueFunction::parse("weight-power:2");
  REQUIRE(wp.has_value());
  CHECK(wp->alpha() == 2.0);
  CHECK(wp->name() == "weight-power:2");
  CHECK(ValueFunction::parse("weight-power:0.5")->alpha() == doctest::Approx(0.5));

  CHECK_FALSE(ValueFunction::parse("").has_value());
  CHECK_FALSE(ValueFunction::parse("wp").has_value());
  CHECK_FALSE(ValueFunction::parse("weight-power:").has_value());
  CHECK_FALSE(ValueFunction::parse("weight-power:x").has_value());
}

TEST_CASE("branch counting averages payoffs per world") {
  // Split device: m worlds pay +1, one world pays -1.
  const AuditInstance m3 = device_pair_instance(3);
  const ValueFunction bc = ValueFunction::branch_count();
  const BranchSet split = run(m3.procedures->second, m3.game.state(), m3.game.payoff());
  CHECK(bc(split) == doctest::Approx(0.5).epsilon(1e-12));

  const AuditInstance m1000 = device_pair_instance(1000);
  const BranchSet fine =
      run(m1000.procedures->second, m1000.game.state(), m1000.game.payoff());
  CHECK(bc(fine) == doctest::Approx(999.0 / 1001.0).epsilon(1e-12));
  // The plain device values the same game at the born price.
  const BranchSet plain =
      run(m1000.procedures->first, m1000.game.state(), m1000.game.payoff());
  CHECK(bc(plain) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("weight-power values the frozen splitting pair apart") {
  const AuditInstance split = stage3_split_instance();
  REQUIRE(split.partner.has_value());
  const ValueFunction wp2 = ValueFunction::weight_power(2.0);
  CHECK(wp2(split.game) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(wp2(*split.partner) == doctest::Approx(0.75).epsilon(1e-12));
  // Exponent 1 is the born average again.
  CHECK(ValueFunction::weight_power(1.0)(split.game) ==
        doctest::Approx(born_value(split.game)).epsilon(1e-12));
}

TEST_CASE("custom value functions wrap a branch functional") {
  const ValueFunction vf = ValueFunction::custom(
      "max-payoff", [](const BranchSet& b) {
        double best = b.branches()[0].payoff;
        for (const auto& br : b.branches()) best = std::max(best, br.payoff);
        return best;
      });
  CHECK(vf.name() == "max-payoff");
  CHECK(vf(three_outcome_game()) == doctest::Approx(5.0));
  CHECK(evaluate(vf, standard_branches(three_outcome_game())) == doctest::Approx(5.0));
}

TEST_CASE("probability extraction from single-outcome bets") {
  Vector amps(2);
  amps << 0.6, 0.8;
  const StateVector psi(amps);
  const HermitianOperator x = HermitianOperator::diagonal({1.0, 2.0});
  const ProbabilityTable t = extract_probabilities(ValueFunction::born(), psi, x);
  REQUIRE(t.entries.size() == 2);
  CHECK(t.entries[0].first == doctest::Approx(1.0));
  CHECK(t.entries[0].second == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(t.entries[1].second == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.in_unit_interval());
}

TEST_CASE("axiom ids round-trip") {
  for (Axiom a : all_axioms()) {
    const auto back = axiom_from_id(axiom_id(a));
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
  CHECK_FALSE(axiom_from_id("no-such-axiom").has_value());
  CHECK(all_axioms().size() == 7);
}

TEST_CASE("born satisfies every axiom on a random corpus") {
  const auto corpus = random_corpus(20, 99);
  CHECK(corpus.size() == 20);
  for (Axiom a : all_axioms()) {
    const AxiomReport r = check_axiom(ValueFunction::born(), a, corpus, 99);
    CHECK(r.pass);
    CHECK(r.instances_checked > 0);
    CHECK_FALSE(r.witness.has_value());
    CHECK(axiom_expected_pass(ValueFunction::born(), a));
  }
}

TEST_CASE("branch counting is not measurement neutral") {
  const std::vector<AuditInstance> corpus = {device_pair_instance(1000)};
  const AxiomReport r = check_axiom(ValueFunction::branch_count(),
                                    Axiom::MeasurementNeutrality, corpus, 0);
  CHECK_FALSE(r.pass);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.witness->rhs == doctest::Approx(999.0 / 1001.0).epsilon(1e-12));
  CHECK_FALSE(
      axiom_expected_pass(ValueFunction::branch_count(), Axiom::MeasurementNeutrality));
}

TEST_CASE("weight-power is not physical on the splitting pair") {
  const std::vector<AuditInstance> corpus = {stage3_split_instance()};
  const AxiomReport r = check_axiom(ValueFunction::weight_power(2.0),
                                    Axiom::Physicality, corpus, 0);
  CHECK_FALSE(r.pass);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->lhs == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.witness->rhs == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("expected audit profiles for the built-in kinds") {
  const ValueFunction born = ValueFunction::born();
  const ValueFunction bc = ValueFunction::branch_count();
  const ValueFunction wp2 = ValueFunction::weight_power(2.0);
  for (Axiom a : all_axioms()) {
    CHECK(axiom_expected_pass(born, a));
    const bool branch_sensitive = a == Axiom::Substitutivity ||
                                  a == Axiom::Physicality ||
                                  a == Axiom::MeasurementNeutrality;
    CHECK(axiom_expected_pass(bc, a) == !branch_sensitive);
    CHECK(axiom_expected_pass(wp2, a) == !branch_sensitive);
    // Exponent 1 collapses to born.
    CHECK(axiom_expected_pass(ValueFunction::weight_power(1.0), a));
  }
}

TEST_CASE("born admits an exact probability representation") {
  Rng rng(31);
  const StateVector psi = StateVector::normalized([&] {
    Vector v(4);
    for (int i = 0; i < 4; ++i) v(i) = rng.complex_gaussian();
    return v;
  }());
  const HermitianOperator x = HermitianOperator::diagonal({1.0, 2.0, 2.0, 5.0});
  std::vector<PayoffFunction> payoffs;
  Rng pay_rng(32);
  for (int i = 0; i < 50; ++i)
    payoffs.push_back(random_payoff(pay_rng, {1.0, 2.0, 5.0}));

  RepresentationOptions opts;
  opts.tol = 1e-12;
  const RepresentationReport r =
      check_representation(ValueFunction::born(), psi, x, payoffs, opts);
  CHECK(r.pass);
  CHECK_FALSE(r.vacuous);
  CHECK(r.max_error < 1e-12);
  CHECK(r.prob_sum_error < 1e-12);

  // Branch counting has no device-independent probabilities to represent.
  RepresentationOptions vary;
  vary.vary_multiplicities = true;
  vary.seed = 7;
  vary.tol = 1e-6;
  const RepresentationReport b =
      check_representation(ValueFunction::branch_count(), psi, x, payoffs, vary);
  CHECK_FALSE(b.pass);
}

TEST_CASE("the dyadic bracket pins down scaled payoffs") {
  const Game g = three_outcome_game();
  for (double a : {1.0 / 3.0, 1.0, -2.0}) {
    const LinearityReport r =
        check_linearity_lemma(ValueFunction::born(), g.state(), g.observable(),
                              g.payoff(), a, 12);
    CHECK(r.pass);
    CHECK(r.bracket_ok);
    CHECK(r.final_gap <= r.bound);
  }
  const LinearityReport exact =
      check_linearity_lemma(ValueFunction::born(), g.state(), g.observable(),
                            g.payoff(), 1.0, 12);
  CHECK(exact.final_gap < 1e-12);

  CHECK(thrown_code([&] {
          check_linearity_lemma(ValueFunction::born(), g.state(), g.observable(),
                                g.payoff(), 0.5, 0);
        }) == "OutOfRange");
  CHECK(thrown_code([&] {
          check_linearity_lemma(ValueFunction::born(), g.state(), g.observable(),
                                g.payoff(), 0.5, 51);
        }) == "OutOfRange");
}

TEST_CASE("born is non-contextual, including degenerate spectra") {
  const StateVector psi = StateVector::uniform(3);
  const HermitianOperator x = HermitianOperator::diagonal({1.0, 1.0, 2.0});
  const PayoffFunction p = RealMap::identity_on({1.0, 2.0});
  const NonContextualityReport r =
      check_non_contextuality(ValueFunction::born(), psi, x, p);
  CHECK(r.pass);
  CHECK(r.lhs == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(r.projector_values.size() == 2);
}

TEST_CASE("weight-power is contextual once the frame is rotated") {
  auto givens = [](int i, int j, double theta) {
    Matrix g = Matrix::Identity(3, 3);
    g(i, i) = std::cos(theta);
    g(j, j) = std::cos(theta);
    g(i, j) = -std::sin(theta);
    g(j, i) = std::sin(theta);
    return g;
  };
  const Matrix rot = givens(0, 1, 0.7) * givens(1, 2, 1.1);
  const HermitianOperator x(
      rot * HermitianOperator::diagonal({1.0, 2.0, 3.0}).mat() * rot.adjoint());
  Vector amps(3);
  amps << 0.6, 0.64, 0.48;
  const StateVector psi(amps);
  const PayoffFunction p = RealMap::identity_on({1.0, 2.0, 3.0});

  // Born passes in the rotated frame too.
  CHECK(check_non_contextuality(ValueFunction::born(), psi, x, p).pass);

  const NonContextualityReport r =
      check_non_contextuality(ValueFunction::weight_power(2.0), psi, x, p);
  CHECK_FALSE(r.pass);
  // The whole-game side is solver-independent (nondegenerate spectrum).
  CHECK(r.lhs == doctest::Approx(1.081640628074).epsilon(1e-6));
  // The projector-game side genuinely disagrees.
  CHECK(std::abs(r.lhs - r.rhs) > 1e-3);
}

TEST_CASE("projector probabilities fit a density operator") {
  Rng rng(55);
  Vector v(3);
  for (int i = 0; i < 3; ++i) v(i) = rng.complex_gaussian();
  const StateVector psi = StateVector::normalized(v);

  const auto family = spanning_projector_observables(3);
  CHECK(family.size() == 9);
  const GleasonFit fit = gleason_fit(ValueFunction::born(), psi, family);
  CHECK(fit.residual < 1e-6);
  CHECK(fit.frobenius_to_state < 1e-6);
  CHECK(fit.fidelity == doctest::Approx(1.0).epsilon(1e-6));

  CHECK(thrown_code([&] {
          gleason_fit(ValueFunction::born(), StateVector::uniform(2),
                      spanning_projector_observables(2));
        }) == "DimTooSmall");
  CHECK(thrown_code([&] {
          gleason_fit(ValueFunction::born(), psi,
                      {HermitianOperator::diagonal({1.0, 2.0, 3.0})});
        }) == "InsufficientSpan");
}

TEST_CASE("random partners stay in the equivalence class") {
  Rng rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    const GeneratedGame gg = random_game(rng, 2, 6);
    const Game partner = random_equivalent_partner(gg.game, rng);
    CHECK(distribution_distance(weight_map(gg.game), weight_map(partner)) < 1e-9);
    CHECK(equivalent(gg.game, partner));
  }
}

TEST_CASE("corpus builders produce well-formed instances") {
  const auto corpus = random_corpus(5, 123);
  REQUIRE(corpus.size() == 5);
  for (const auto& inst : corpus) {
    CHECK_FALSE(inst.name.empty());
    CHECK(inst.game.dim() >= 2);
    CHECK(inst.game.dim() <= 8);
  }

  const AuditInstance dev = device_pair_instance(1000);
  REQUIRE(dev.procedures.has_value());
  CHECK(born_value(dev.game) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dev.procedures->first.observable().dim() == dev.game.dim());

  const AuditInstance split = stage3_split_instance();
  CHECK(split.name == "uneven-split");
  REQUIRE(split.partner.has_value());
  CHECK(equivalent(split.game, *split.partner));
}
