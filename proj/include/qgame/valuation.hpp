#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgame/games.hpp"
#include "qgame/measurement.hpp"
#include "qgame/rng.hpp"

namespace qgame {

// Map from games (via their physical instantiations) to indifference prices.
// Born is the only kind that factors through the weight map; the others depend
// on branch structure, which is exactly what the audits probe.
class ValueFunction {
 public:
  enum class Kind { Born, BranchCount, WeightPower, Custom };

  static ValueFunction born();
  static ValueFunction branch_count();
  static ValueFunction weight_power(double alpha);
  static ValueFunction custom(std::string name,
                              std::function<double(const BranchSet&)> fn);
  // "born", "branch-count", "weight-power:<alpha>"
  static std::optional<ValueFunction> parse(const std::string& name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double alpha() const { return alpha_; }

  double operator()(const BranchSet& b) const;
  // Born: closed form from the weight map. Others: value of the standard
  // (multiplicity-1) instantiation; their game-level value is only as
  // well-defined as the audits show it to be.
  double operator()(const Game& g) const;

 private:
  ValueFunction(Kind k, std::string name, double alpha)
      : kind_(k), name_(std::move(name)), alpha_(alpha) {}
  Kind kind_;
  std::string name_;
  double alpha_ = 0.0;
  std::function<double(const BranchSet&)> fn_;
};

double born_value(const Game& g);
// Same formula, kept separate because it plays a second conceptual role.
double expected_utility(const Game& g);
double evaluate(const ValueFunction& vf, const BranchSet& b);

struct ProbabilityTable {
  std::vector<std::pair<double, double>> entries;  // eigenvalue -> probability
  double sum() const;
  bool in_unit_interval(double tol = kValueTol) const;
};

// entries[x] = VF value of <psi, X, delta_x>.
ProbabilityTable extract_probabilities(const ValueFunction& vf,
                                       const StateVector& psi,
                                       const HermitianOperator& x);

enum class Axiom {
  Dominance,
  WeakAdditivity,
  ZeroSum,
  Additivity,
  Substitutivity,
  Physicality,
  MeasurementNeutrality,
};

const char* axiom_id(Axiom a);
std::optional<Axiom> axiom_from_id(const std::string& id);
const std::vector<Axiom>& all_axioms();

struct AxiomWitness {
  std::string instance;     // corpus instance name
  std::string description;  // what was compared
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AxiomReport {
  std::string axiom;
  std::string value_function;
  bool pass = false;
  int instances_checked = 0;
  double max_violation = 0.0;
  std::optional<AxiomWitness> witness;  // present on fail
};

// One audit case: a game, optionally with a pre-built weight-map-equal partner
// (Physicality) or a fixed device pair (Measurement neutrality).
struct AuditInstance {
  std::string name;
  Game game;
  std::optional<Game> partner;
  std::optional<std::pair<MeasurementProcedure, MeasurementProcedure>> procedures;
};

AxiomReport check_axiom(const ValueFunction& vf, Axiom axiom,
                        const std::vector<AuditInstance>& corpus,
                        std::uint64_t rng_seed, double tol = kValueTol);

// Expected audit outcome for the built-in kinds (drives the CLI exit gate).
bool axiom_expected_pass(const ValueFunction& vf, Axiom a);

struct RepresentationOptions {
  std::uint64_t seed = 0;
  // Evaluate every game on a randomly chosen procedure instead of the standard
  // one; exposes VFs whose game-level value is ill-defined.
  bool vary_multiplicities = false;
  double tol = 1e-6;
};

struct RepresentationReport {
  bool vacuous = false;  // Additivity/Dominance precondition failed
  double max_error = 0.0;
  double prob_sum_error = 0.0;
  bool pass = false;
  ProbabilityTable probabilities;
  std::optional<AxiomWitness> witness;
};

RepresentationReport check_representation(const ValueFunction& vf,
                                          const StateVector& psi,
                                          const HermitianOperator& x,
                                          const std::vector<PayoffFunction>& payoff_corpus,
                                          const RepresentationOptions& opts = {});

struct LinearityReport {
  double a = 0.0;
  int depth = 0;
  double value_p = 0.0;
  double value_ap = 0.0;
  bool bracket_ok = false;  // dyadic bounds hold at every depth
  double final_gap = 0.0;   // |V(aP) - a V(P)|
  double bound = 0.0;       // |V(P)| 2^-depth + 1e-9
  bool pass = false;
};

LinearityReport check_linearity_lemma(const ValueFunction& vf, const StateVector& psi,
                                      const HermitianOperator& x,
                                      const PayoffFunction& p, double a, int depth);

struct NonContextualityReport {
  double lhs = 0.0;  // VF on the full game
  double rhs = 0.0;  // sum over x of VF(projector game) * P(x)
  std::vector<std::pair<double, double>> projector_values;  // x -> VF(projector game)
  bool pass = false;
};

NonContextualityReport check_non_contextuality(const ValueFunction& vf,
                                               const StateVector& psi,
                                               const HermitianOperator& x,
                                               const PayoffFunction& p,
                                               double tol = kValueTol);

struct GleasonFit {
  Matrix rho;
  double residual = 0.0;            // max |Tr(P rho) - p| after PSD projection
  double fidelity = 0.0;            // <psi| rho |psi>
  double frobenius_to_state = 0.0;  // ||rho - |psi><psi||_F
};

// Least-squares density-operator fit to the VF's projector probabilities over
// all spectral projectors of the listed observables.
GleasonFit gleason_fit(const ValueFunction& vf, const StateVector& psi,
                       const std::vector<HermitianOperator>& observables);

// d^2 rank-1 projectors spanning the Hermitian operators on C^d, as observables.
std::vector<HermitianOperator> spanning_projector_observables(int dim);

// ---- corpus builders ----

// A random game together with the raw data it was built from, so tests can
// compute weight maps by an independent route.
struct GeneratedGame {
  Game game;
  Matrix eigenbasis;                      // columns
  std::vector<double> eigenvalues;        // per column, repeats = degeneracy
  std::vector<double> payoff_per_column;  // payoff value per column
};

GeneratedGame random_game(Rng& rng, int min_dim, int max_dim);
PayoffFunction random_payoff(Rng& rng, const std::vector<double>& keys);
Matrix random_unitary(Rng& rng, int dim);

// Weight-map-preserving rewrite of g by a random chain of payoff and
// measurement equivalences (relabeling, rotation, multiplicity inflation).
Game random_equivalent_partner(const Game& g, Rng& rng);

std::vector<AuditInstance> random_corpus(int n, std::uint64_t seed, int max_dim = 8);
// The two-device scenario: same game, single-readout device vs a device with
// `multiplicity` readouts on the +1 outcome.
AuditInstance device_pair_instance(long multiplicity);
// <sqrt(1/4) e1 + sqrt(3/4) e2, diag(0,1), id> and its 4-fold split.
AuditInstance stage3_split_instance();

}  // namespace qgame
