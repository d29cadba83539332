#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "qgame/games.hpp"
#include "qgame/linalg.hpp"

namespace qgame {

// A concrete measuring device for an observable: each outcome x gets one or
// more readout states with coefficients mu(x; alpha), sum_alpha |mu|^2 = 1.
class MeasurementProcedure {
 public:
  // rows aligned with spectral_decompose(observable).eigenvalues (ascending)
  MeasurementProcedure(HermitianOperator observable,
                       std::vector<std::vector<Complex>> coefficients);

  // One readout per outcome, mu = 1.
  static MeasurementProcedure standard(const HermitianOperator& observable);
  // Uniform coefficients 1/sqrt(m) per outcome; readouts keyed by eigenvalue.
  static MeasurementProcedure uniform(
      const HermitianOperator& observable,
      const std::vector<std::pair<double, int>>& multiplicities);
  // Explicit coefficients keyed by eigenvalue.
  static MeasurementProcedure with_coefficients(
      const HermitianOperator& observable,
      const std::vector<std::pair<double, std::vector<Complex>>>& rows);

  const HermitianOperator& observable() const { return observable_; }
  const SpectralDecomposition& spectrum() const { return spectrum_; }
  int multiplicity(std::size_t k) const {
    return static_cast<int>(coefficients_[k].size());
  }
  const std::vector<std::vector<Complex>>& coefficients() const {
    return coefficients_;
  }

 private:
  HermitianOperator observable_;
  SpectralDecomposition spectrum_;
  std::vector<std::vector<Complex>> coefficients_;
};

struct ReadoutId {
  double eigenvalue;
  int alpha;
  friend bool operator==(const ReadoutId&, const ReadoutId&) = default;
};

// One decoherent world: the readout path that identifies it, the cash received
// there, and the (relative) amplitude. Weight is |amplitude|^2.
struct Branch {
  std::vector<ReadoutId> label;  // length 1 for a single measurement
  double payoff = 0.0;
  Complex amplitude;
  double weight() const { return std::norm(amplitude); }
};

class BranchSet {
 public:
  explicit BranchSet(std::vector<Branch> branches);

  const std::vector<Branch>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }
  // Per-payoff weight totals.
  WeightMap aggregate() const;

 private:
  std::vector<Branch> branches_;
};

// What happens after an outcome: either cash, or measure again. Arbitrary
// nesting depth; amplitudes multiply along the path.
class SequentialPlay {
 public:
  struct Stage;

  static SequentialPlay cash(double value);
  static SequentialPlay measure(StateVector state, MeasurementProcedure procedure,
                                std::vector<std::pair<double, SequentialPlay>> continuations);
  // Measure and pay P(x) at each outcome: a leaf game played on `state`.
  static SequentialPlay play(StateVector state, MeasurementProcedure procedure,
                             PayoffFunction payoff);

  bool is_cash() const { return std::holds_alternative<double>(node_); }
  double cash_value() const { return std::get<double>(node_); }
  const Stage& stage() const { return *std::get<std::shared_ptr<const Stage>>(node_); }

 private:
  SequentialPlay() = default;
  std::variant<double, std::shared_ptr<const Stage>> node_;
};

struct SequentialPlay::Stage {
  StateVector state;
  MeasurementProcedure procedure;
  std::vector<std::pair<double, SequentialPlay>> continuations;  // keyed by eigenvalue
};

// Branch enumeration under the measurement dynamics: one branch per
// (eigenstate-component, readout), amplitude = component coefficient * mu.
BranchSet run(const MeasurementProcedure& proc, const StateVector& psi,
              const PayoffFunction& payoff);

// Full sequential enumeration; the root must be a measure/play node.
BranchSet enumerate_branches(const SequentialPlay& root);

// Measure `outer` on psi, then continue per outcome. Continuations carry their
// own states (a sub-play is a freshly prepared game, as in compound games).
BranchSet compose(const MeasurementProcedure& outer, const StateVector& psi,
                  const std::vector<std::pair<double, SequentialPlay>>& continuation);

// True iff the per-payoff aggregation of b equals weight_map(g).
bool instantiates(const BranchSet& b, const Game& g, double tol = kValueTol);

}  // namespace qgame
