#include "qgame/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "qgame/errors.hpp"
#include "qgame/transforms.hpp"

namespace qgame {

namespace {

BranchSet standard_branches(const Game& g) {
  return run(MeasurementProcedure::standard(g.observable()), g.state(), g.payoff());
}

std::vector<Complex> random_unit_row(Rng& rng, int m) {
  std::vector<Complex> row(m);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& z : row) {
      z = rng.complex_gaussian();
      norm2 += std::norm(z);
    }
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : row) z *= inv;
  return row;
}

MeasurementProcedure random_procedure(const HermitianOperator& x, Rng& rng,
                                      bool force_multi) {
  const auto spec = spectral_decompose(x);
  std::vector<std::pair<double, std::vector<Complex>>> rows;
  bool any_multi = false;
  for (std::size_t k = 0; k < spec.count(); ++k) {
    int m = 1 + static_cast<int>(rng.pick(3));
    if (force_multi && !any_multi && k + 1 == spec.count() && m == 1) m = 2;
    any_multi = any_multi || m > 1;
    rows.emplace_back(spec.eigenvalues[k], random_unit_row(rng, m));
  }
  return MeasurementProcedure::with_coefficients(x, rows);
}

struct Comparison {
  std::string description;
  double lhs = 0.0;
  double rhs = 0.0;
  bool one_sided = false;  // pass iff lhs >= rhs (Dominance)
};

// A shifted small game whose VF value is the target consequence, plus the
// sequential-play leaf that plays it.
SequentialPlay tuned_subgame(const ValueFunction& vf, double target, int fanout,
                             Rng& rng) {
  Vector amps(fanout);
  std::vector<double> diag(fanout);
  std::vector<std::pair<double, double>> payoff_entries;
  for (int i = 0; i < fanout; ++i) {
    amps(i) = std::sqrt(0.2 + 0.6 * rng.uniform());
    diag[i] = static_cast<double>(i + 1);
    payoff_entries.emplace_back(diag[i], rng.uniform(-1.0, 1.0));
  }
  const StateVector state = StateVector::normalized(amps);
  const HermitianOperator obs = HermitianOperator::diagonal(diag);
  const auto proc = MeasurementProcedure::standard(obs);
  const PayoffFunction raw{std::vector<std::pair<double, double>>(payoff_entries)};
  const double v = evaluate(vf, run(proc, state, raw));
  const PayoffFunction shifted = raw.plus_constant(target - v);
  const double check = evaluate(vf, run(proc, state, shifted));
  if (std::abs(check - target) > 1e-6)
    throw Error("SubstitutionTuningFailed",
                "could not tune a subgame to the target value");
  return SequentialPlay::play(state, proc, shifted);
}

Comparison compare_axiom(const ValueFunction& vf, Axiom axiom,
                         const AuditInstance& inst, Rng& rng) {
  const Game& g = inst.game;
  switch (axiom) {
    case Axiom::Dominance: {
      // lower every payoff by a nonnegative amount; value must not rise
      std::vector<std::pair<double, double>> lowered;
      for (const auto& [k, c] : g.payoff().entries())
        lowered.emplace_back(k, c - (rng.pick(2) == 0 ? rng.uniform(0.0, 2.0) : 0.0));
      const Game worse(g.state(), g.observable(), PayoffFunction(lowered));
      return {"pointwise-lower payoff must not gain value", vf(g), vf(worse), true};
    }
    case Axiom::WeakAdditivity: {
      const double k = rng.uniform(-5.0, 5.0);
      const Game shifted(g.state(), g.observable(), g.payoff().plus_constant(k));
      return {"constant payoff shift moves the value by the constant",
              vf(shifted), vf(g) + k, false};
    }
    case Axiom::ZeroSum: {
      const Game negated(g.state(), g.observable(), g.payoff().negated());
      return {"negated payoff negates the value", vf(negated), -vf(g), false};
    }
    case Axiom::Additivity: {
      const PayoffFunction q = random_payoff(rng, g.payoff().keys());
      const Game sum(g.state(), g.observable(), g.payoff().plus(q));
      const Game only_q(g.state(), g.observable(), q);
      return {"payoff sum values to the sum of values", vf(sum), vf(g) + vf(only_q),
              false};
    }
    case Axiom::Substitutivity: {
      const auto spec = spectral_decompose(g.observable());
      std::vector<std::pair<double, SequentialPlay>> continuations;
      for (std::size_t k = 0; k < spec.count(); ++k) {
        const double target =
            g.payoff().at(spec.eigenvalues[k], kPayoffTol, "PayoffUndefined");
        const int fanout = 2 + static_cast<int>(k % 2);
        continuations.emplace_back(spec.eigenvalues[k],
                                   tuned_subgame(vf, target, fanout, rng));
      }
      const BranchSet composite =
          compose(MeasurementProcedure::standard(g.observable()), g.state(),
                  continuations);
      return {"substituting equal-value subgames preserves the value",
              evaluate(vf, composite), vf(g), false};
    }
    case Axiom::Physicality: {
      const Game partner =
          inst.partner ? *inst.partner : random_equivalent_partner(g, rng);
      return {"weight-map-equal games share a value", vf(g), vf(partner), false};
    }
    case Axiom::MeasurementNeutrality: {
      const MeasurementProcedure p1 =
          inst.procedures ? inst.procedures->first
                          : MeasurementProcedure::standard(g.observable());
      const MeasurementProcedure p2 =
          inst.procedures ? inst.procedures->second
                          : random_procedure(g.observable(), rng, true);
      return {"the measuring device does not move the value",
              evaluate(vf, run(p1, g.state(), g.payoff())),
              evaluate(vf, run(p2, g.state(), g.payoff())), false};
    }
  }
  throw Error("UnknownAxiom", "unhandled axiom enum value");
}

}  // namespace

ValueFunction ValueFunction::born() { return {Kind::Born, "born", 0.0}; }

ValueFunction ValueFunction::branch_count() {
  return {Kind::BranchCount, "branch-count", 0.0};
}

ValueFunction ValueFunction::weight_power(double alpha) {
  if (!std::isfinite(alpha))
    throw ValidationError("BadValue", "weight-power exponent must be finite");
  char buf[48];
  std::snprintf(buf, sizeof buf, "weight-power:%g", alpha);
  return {Kind::WeightPower, buf, alpha};
}

ValueFunction ValueFunction::custom(std::string name,
                                    std::function<double(const BranchSet&)> fn) {
  ValueFunction vf(Kind::Custom, std::move(name), 0.0);
  vf.fn_ = std::move(fn);
  return vf;
}

std::optional<ValueFunction> ValueFunction::parse(const std::string& name) {
  if (name == "born") return born();
  if (name == "branch-count") return branch_count();
  const std::string prefix = "weight-power:";
  if (name.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string rest = name.substr(prefix.size());
      const double alpha = std::stod(rest, &used);
      if (used == rest.size() && std::isfinite(alpha)) return weight_power(alpha);
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

double ValueFunction::operator()(const BranchSet& b) const {
  switch (kind_) {
    case Kind::Born: {
      double v = 0.0;
      for (const auto& br : b.branches()) v += br.weight() * br.payoff;
      return v;
    }
    case Kind::BranchCount: {
      double v = 0.0;
      for (const auto& br : b.branches()) v += br.payoff;
      return v / static_cast<double>(b.size());
    }
    case Kind::WeightPower: {
      double num = 0.0, den = 0.0;
      for (const auto& br : b.branches()) {
        const double w = std::pow(br.weight(), alpha_);
        num += w * br.payoff;
        den += w;
      }
      if (den <= 0.0)
        throw Error("DegenerateValue", "weight-power normalizer vanished");
      return num / den;
    }
    case Kind::Custom:
      return fn_(b);
  }
  throw Error("DegenerateValue", "unhandled value-function kind");
}

double ValueFunction::operator()(const Game& g) const {
  if (kind_ == Kind::Born) return weight_map(g).expected_value();
  return (*this)(standard_branches(g));
}

double born_value(const Game& g) { return weight_map(g).expected_value(); }

double expected_utility(const Game& g) { return weight_map(g).expected_value(); }

double evaluate(const ValueFunction& vf, const BranchSet& b) { return vf(b); }

double ProbabilityTable::sum() const {
  double s = 0.0;
  for (const auto& [x, p] : entries) s += p;
  return s;
}

bool ProbabilityTable::in_unit_interval(double tol) const {
  for (const auto& [x, p] : entries)
    if (p < -tol || p > 1.0 + tol) return false;
  return true;
}

ProbabilityTable extract_probabilities(const ValueFunction& vf,
                                       const StateVector& psi,
                                       const HermitianOperator& x) {
  const auto spec = spectral_decompose(x);
  ProbabilityTable table;
  for (double ev : spec.eigenvalues) {
    const PayoffFunction delta = RealMap::indicator(ev, spec.eigenvalues);
    table.entries.emplace_back(ev, vf(Game(psi, x, delta)));
  }
  return table;
}

const char* axiom_id(Axiom a) {
  switch (a) {
    case Axiom::Dominance: return "dominance";
    case Axiom::WeakAdditivity: return "weak-additivity";
    case Axiom::ZeroSum: return "zero-sum";
    case Axiom::Additivity: return "additivity";
    case Axiom::Substitutivity: return "substitutivity";
    case Axiom::Physicality: return "physicality";
    case Axiom::MeasurementNeutrality: return "measurement-neutrality";
  }
  return "unknown";
}

std::optional<Axiom> axiom_from_id(const std::string& id) {
  for (Axiom a : all_axioms())
    if (id == axiom_id(a)) return a;
  return std::nullopt;
}

const std::vector<Axiom>& all_axioms() {
  static const std::vector<Axiom> axioms = {
      Axiom::Dominance,      Axiom::WeakAdditivity, Axiom::ZeroSum,
      Axiom::Additivity,     Axiom::Substitutivity, Axiom::Physicality,
      Axiom::MeasurementNeutrality,
  };
  return axioms;
}

AxiomReport check_axiom(const ValueFunction& vf, Axiom axiom,
                        const std::vector<AuditInstance>& corpus,
                        std::uint64_t rng_seed, double tol) {
  AxiomReport report;
  report.axiom = axiom_id(axiom);
  report.value_function = vf.name();
  std::uint64_t stream = static_cast<std::uint64_t>(axiom) * 1000;
  for (const auto& inst : corpus) {
    Rng rng(rng_seed, stream++);
    const Comparison c = compare_axiom(vf, axiom, inst, rng);
    const double violation =
        c.one_sided ? std::max(0.0, c.rhs - c.lhs) : std::abs(c.lhs - c.rhs);
    ++report.instances_checked;
    report.max_violation = std::max(report.max_violation, violation);
    if (violation > tol && !report.witness)
      report.witness = AxiomWitness{inst.name, c.description, c.lhs, c.rhs};
  }
  report.pass = report.max_violation <= tol;
  if (report.pass) report.witness.reset();
  return report;
}

bool axiom_expected_pass(const ValueFunction& vf, Axiom a) {
  const bool branch_sensitive =
      vf.kind() == ValueFunction::Kind::BranchCount ||
      (vf.kind() == ValueFunction::Kind::WeightPower && vf.alpha() != 1.0);
  if (!branch_sensitive) return true;
  switch (a) {
    case Axiom::Dominance:
    case Axiom::WeakAdditivity:
    case Axiom::ZeroSum:
    case Axiom::Additivity:
      return true;
    default:
      return false;
  }
}

RepresentationReport check_representation(const ValueFunction& vf,
                                          const StateVector& psi,
                                          const HermitianOperator& x,
                                          const std::vector<PayoffFunction>& payoff_corpus,
                                          const RepresentationOptions& opts) {
  RepresentationReport report;

  std::vector<AuditInstance> probe;
  for (std::size_t i = 0; i < payoff_corpus.size() && i < 4; ++i)
    probe.push_back(AuditInstance{"probe-" + std::to_string(i),
                                  Game(psi, x, payoff_corpus[i]), std::nullopt,
                                  std::nullopt});
  const auto additive = check_axiom(vf, Axiom::Additivity, probe, opts.seed + 101);
  const auto dominant = check_axiom(vf, Axiom::Dominance, probe, opts.seed + 202);
  report.vacuous = !(additive.pass && dominant.pass);

  const auto spec = spectral_decompose(x);
  if (!opts.vary_multiplicities) {
    report.probabilities = extract_probabilities(vf, psi, x);
  } else {
    for (std::size_t k = 0; k < spec.count(); ++k) {
      Rng rng(opts.seed, 500 + k);
      const PayoffFunction delta =
          RealMap::indicator(spec.eigenvalues[k], spec.eigenvalues);
      const auto proc = random_procedure(x, rng, true);
      report.probabilities.entries.emplace_back(
          spec.eigenvalues[k], evaluate(vf, run(proc, psi, delta)));
    }
  }
  report.prob_sum_error = std::abs(report.probabilities.sum() - 1.0);

  std::size_t idx = 0;
  for (const auto& p : payoff_corpus) {
    double value;
    if (opts.vary_multiplicities) {
      Rng rng(opts.seed, 900 + idx);
      value = evaluate(vf, run(random_procedure(x, rng, true), psi, p));
    } else {
      value = vf(Game(psi, x, p));
    }
    double recon = 0.0;
    for (const auto& [ev, prob] : report.probabilities.entries)
      recon += prob * p.at(ev, kPayoffTol, "PayoffUndefined");
    const double err = std::abs(value - recon);
    report.max_error = std::max(report.max_error, err);
    if (err > opts.tol && !report.witness)
      report.witness = AxiomWitness{
          "payoff-" + std::to_string(idx),
          "game value reconstructed from extracted probabilities", value, recon};
    ++idx;
  }
  report.pass = !report.vacuous && report.max_error <= opts.tol &&
                report.prob_sum_error <= opts.tol;
  if (report.pass) report.witness.reset();
  return report;
}

LinearityReport check_linearity_lemma(const ValueFunction& vf, const StateVector& psi,
                                      const HermitianOperator& x,
                                      const PayoffFunction& p, double a, int depth) {
  if (depth < 1 || depth > 50)
    throw ValidationError("OutOfRange", "bracketing depth must lie in [1, 50]");
  LinearityReport report;
  report.a = a;
  report.depth = depth;
  report.value_p = vf(Game(psi, x, p));
  report.value_ap = vf(Game(psi, x, p.scaled(a)));

  // Dyadic sandwich on |a|: floor(|a| 2^n)/2^n and ceil(...)/2^n scale V(P)
  // into bounds that must contain V(|a|P) at every depth.
  const double abs_a = std::abs(a);
  const double target =
      a >= 0.0 ? report.value_ap : vf(Game(psi, x, p.scaled(abs_a)));
  report.bracket_ok = true;
  for (int n = 1; n <= depth; ++n) {
    const double scale = std::ldexp(1.0, n);
    const double lo_coeff = std::floor(abs_a * scale) / scale;
    const double hi_coeff = std::ceil(abs_a * scale) / scale;
    const double b1 = lo_coeff * report.value_p;
    const double b2 = hi_coeff * report.value_p;
    const double lo = std::min(b1, b2), hi = std::max(b1, b2);
    if (target < lo - kValueTol || target > hi + kValueTol) {
      report.bracket_ok = false;
      break;
    }
  }
  report.final_gap = std::abs(report.value_ap - a * report.value_p);
  report.bound = std::abs(report.value_p) * std::ldexp(1.0, -depth) + kValueTol;
  report.pass = report.bracket_ok && report.final_gap <= report.bound;
  return report;
}

NonContextualityReport check_non_contextuality(const ValueFunction& vf,
                                               const StateVector& psi,
                                               const HermitianOperator& x,
                                               const PayoffFunction& p, double tol) {
  NonContextualityReport report;
  report.lhs = vf(Game(psi, x, p));
  const auto spec = spectral_decompose(x);
  for (std::size_t k = 0; k < spec.count(); ++k) {
    // The yes/no game on the spectral projector, paid by its own eigenvalue.
    const HermitianOperator projector(spec.projectors[k]);
    const auto proj_spec = spectral_decompose(projector);
    const Game proj_game(psi, projector,
                         RealMap::identity_on(proj_spec.eigenvalues));
    const double v = vf(proj_game);
    report.projector_values.emplace_back(spec.eigenvalues[k], v);
    report.rhs += v * p.at(spec.eigenvalues[k], kPayoffTol, "PayoffUndefined");
  }
  report.pass = std::abs(report.lhs - report.rhs) <= tol;
  return report;
}

GleasonFit gleason_fit(const ValueFunction& vf, const StateVector& psi,
                       const std::vector<HermitianOperator>& observables) {
  const int d = psi.dim();
  if (d < 3)
    throw ValidationError("DimTooSmall",
                          "density-operator fit needs dimension >= 3");

  // Rows: Tr(P rho) = prob, over every spectral projector of every observable.
  std::vector<Matrix> projectors;
  std::vector<double> probs;
  for (const auto& obs : observables) {
    if (obs.dim() != d)
      throw ValidationError("DimMismatch", "observable dimension != state dimension");
    const auto spec = spectral_decompose(obs);
    const auto table = extract_probabilities(vf, psi, obs);
    for (std::size_t k = 0; k < spec.count(); ++k) {
      projectors.push_back(spec.projectors[k]);
      probs.push_back(table.entries[k].second);
    }
  }

  // Real parametrization of a Hermitian rho: d diagonal entries, then
  // (re, im) per upper-triangle entry.
  const int params = d * d;
  Eigen::MatrixXd a(static_cast<int>(projectors.size()), params);
  Eigen::VectorXd b(static_cast<int>(projectors.size()));
  for (std::size_t r = 0; r < projectors.size(); ++r) {
    const Matrix& pr = projectors[r];
    int col = 0;
    for (int i = 0; i < d; ++i) a(static_cast<int>(r), col++) = pr(i, i).real();
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        a(static_cast<int>(r), col++) = 2.0 * pr(i, j).real();
        a(static_cast<int>(r), col++) = 2.0 * pr(i, j).imag();
      }
    b(static_cast<int>(r)) = probs[r];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > sv(0) * 1e-10) ++rank;
  if (rank < params)
    throw ValidationError("InsufficientSpan",
                          "projector family does not span the Hermitian operators");
  const Eigen::VectorXd theta = svd.solve(b);

  Matrix rho = Matrix::Zero(d, d);
  int col = 0;
  for (int i = 0; i < d; ++i) rho(i, i) = theta(col++);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const Complex z(theta(col), theta(col + 1));
      col += 2;
      rho(i, j) = z;
      rho(j, i) = std::conj(z);
    }

  // Project onto the density operators: clip negative eigenvalues, renormalize.
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  const double trace = clipped.sum();
  if (trace <= kWeightEps)
    throw Error("DegenerateFit", "fitted operator has no positive part");
  clipped /= trace;
  GleasonFit fit;
  fit.rho = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();

  for (std::size_t r = 0; r < projectors.size(); ++r) {
    const double fitted = (projectors[r] * fit.rho).trace().real();
    fit.residual = std::max(fit.residual, std::abs(fitted - probs[r]));
  }
  fit.fidelity = (psi.vec().adjoint() * fit.rho * psi.vec())(0).real();
  fit.frobenius_to_state =
      (fit.rho - psi.vec() * psi.vec().adjoint()).norm();
  return fit;
}

std::vector<HermitianOperator> spanning_projector_observables(int dim) {
  if (dim < 2)
    throw ValidationError("DimTooSmall", "need dimension >= 2 to span");
  std::vector<HermitianOperator> out;
  const auto rank1 = [&](const Vector& v) {
    out.emplace_back(Matrix(v * v.adjoint()));
  };
  for (int i = 0; i < dim; ++i) rank1(Vector::Unit(dim, i));
  const double inv = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      Vector v = Vector::Zero(dim);
      v(i) = inv;
      v(j) = inv;
      rank1(v);
      v(j) = Complex(0.0, inv);
      rank1(v);
    }
  return out;
}

GeneratedGame random_game(Rng& rng, int min_dim, int max_dim) {
  if (min_dim < 1 || max_dim < min_dim)
    throw ValidationError("BadValue", "dimension range is empty");
  const int d = min_dim + static_cast<int>(rng.pick(max_dim - min_dim + 1));

  // Small integer spectrum so degeneracies actually occur.
  std::vector<double> evals(d);
  for (int attempt = 0;; ++attempt) {
    for (auto& e : evals) e = static_cast<double>(rng.pick(6));
    if (d == 1) break;
    const auto [mn, mx] = std::minmax_element(evals.begin(), evals.end());
    if (*mn != *mx) break;
    if (attempt > 64) {
      evals[0] = 0.0;
      evals[1] = 1.0;
      break;
    }
  }

  // One payoff per distinct eigenvalue; sometimes two eigenvalues share one.
  std::vector<double> distinct(evals);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::pair<double, double>> payoff_entries;
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    double value = rng.uniform(-3.0, 3.0);
    if (k > 0 && rng.pick(4) == 0) value = payoff_entries[k - 1].second;
    payoff_entries.emplace_back(distinct[k], value);
  }
  if (payoff_entries.size() >= 2) {
    bool all_same = true;
    for (const auto& [k, v] : payoff_entries)
      all_same = all_same && v == payoff_entries[0].second;
    if (all_same) payoff_entries.back().second += 1.5;
  }

  // Amplitudes in the eigenbasis, bounded away from zero so no branch sits
  // near the drop threshold.
  Vector amps(d);
  for (int i = 0; i < d; ++i) {
    const double r = 0.3 + 0.7 * rng.uniform();
    const double phase = 2.0 * M_PI * rng.uniform();
    amps(i) = Complex(r * std::cos(phase), r * std::sin(phase));
  }
  amps.normalize();

  const Matrix basis = random_unitary(rng, d);
  Matrix xm = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    xm += evals[i] * basis.col(i) * basis.col(i).adjoint();

  const PayoffFunction payoff{std::vector<std::pair<double, double>>(payoff_entries)};
  std::vector<double> payoff_per_column(d);
  for (int i = 0; i < d; ++i)
    payoff_per_column[i] = payoff.at(evals[i], kPayoffTol, "PayoffUndefined");
  return GeneratedGame{
      Game(StateVector::normalized(basis * amps), HermitianOperator(xm), payoff),
      basis, std::move(evals), std::move(payoff_per_column)};
}

PayoffFunction random_payoff(Rng& rng, const std::vector<double>& keys) {
  std::vector<std::pair<double, double>> entries;
  entries.reserve(keys.size());
  for (double k : keys) entries.emplace_back(k, rng.uniform(-3.0, 3.0));
  return PayoffFunction(entries);
}

Matrix random_unitary(Rng& rng, int dim) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  return Matrix(qr.householderQ());
}

Game random_equivalent_partner(const Game& g, Rng& rng) {
  // Rebuild from the weight map, splitting exactly one payoff class across
  // two fresh eigenvalues. The weight map (hence the equivalence class) is
  // untouched, but the branch structure is not.
  const WeightMap wm = weight_map(g);
  std::vector<double> weights, values;
  for (const auto& [payoff, w] : wm.entries()) {
    weights.push_back(w);
    values.push_back(payoff);
  }
  const std::size_t at = rng.pick(weights.size());
  const double cut = weights[at] * (0.25 + 0.5 * rng.uniform());
  weights.push_back(weights[at] - cut);
  values.push_back(values[at]);
  weights[at] = cut;

  const int k = static_cast<int>(weights.size());
  Vector amps(k);
  std::vector<double> keys(k);
  std::vector<std::pair<double, double>> table;
  for (int i = 0; i < k; ++i) {
    const double ph = 2.0 * M_PI * rng.uniform();
    amps(i) = std::sqrt(weights[i]) * Complex(std::cos(ph), std::sin(ph));
    keys[i] = i + 1.0;
    table.emplace_back(keys[i], values[i]);
  }
  const Game fresh(StateVector::normalized(amps), HermitianOperator::diagonal(keys),
                   RealMap(std::move(table)));

  // Rotate into a random frame (measurement equivalence).
  const Isometry u(random_unitary(rng, k));
  return measurement_equivalence(fresh, u, conjugate(fresh.observable(), u),
                                 fresh.payoff());
}

std::vector<AuditInstance> random_corpus(int n, std::uint64_t seed, int max_dim) {
  if (n < 1) throw ValidationError("BadValue", "corpus size must be positive");
  if (max_dim < 2) throw ValidationError("BadValue", "corpus max dimension must be >= 2");
  std::vector<AuditInstance> corpus;
  corpus.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, 1000 + static_cast<std::uint64_t>(i));
    corpus.push_back(AuditInstance{"random-" + std::to_string(i),
                                   random_game(rng, 2, max_dim).game, std::nullopt,
                                   std::nullopt});
  }
  return corpus;
}

AuditInstance device_pair_instance(long multiplicity) {
  if (multiplicity < 1)
    throw ValidationError("BadValue", "readout multiplicity must be >= 1");
  const HermitianOperator x = HermitianOperator::diagonal({1.0, -1.0});
  Game g(StateVector::uniform(2), x, RealMap::identity_on({-1.0, 1.0}));
  auto procs = std::make_pair(
      MeasurementProcedure::standard(x),
      MeasurementProcedure::uniform(
          x, {{1.0, static_cast<int>(multiplicity)}, {-1.0, 1}}));
  return AuditInstance{"device-pair:" + std::to_string(multiplicity), std::move(g),
                       std::nullopt, std::move(procs)};
}

AuditInstance stage3_split_instance() {
  Vector a(2);
  a << std::sqrt(0.25), std::sqrt(0.75);
  Game g(StateVector(a), HermitianOperator::diagonal({0.0, 1.0}),
         RealMap::identity_on({0.0, 1.0}));
  Vector b(4);
  b << 0.5, 0.5, 0.5, 0.5;
  Game partner(StateVector(b), HermitianOperator::diagonal({0.0, 1.0, 1.0, 1.0}),
               RealMap::identity_on({0.0, 1.0}));
  return AuditInstance{"uneven-split", std::move(g), std::move(partner),
                       std::nullopt};
}

}  // namespace qgame
