#include "qgame/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "qgame/errors.hpp"

namespace qgame {

MeasurementProcedure::MeasurementProcedure(HermitianOperator observable,
                                           std::vector<std::vector<Complex>> coefficients)
    : observable_(std::move(observable)),
      spectrum_(spectral_decompose(observable_)),
      coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != spectrum_.count())
    throw ValidationError("DimMismatch",
                          "need one readout row per distinct eigenvalue");
  for (const auto& row : coefficients_) {
    if (row.empty())
      throw ValidationError("BadValue", "each outcome needs at least one readout");
    double total = 0.0;
    for (const Complex& mu : row) {
      if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag()))
        throw ValidationError("NonFinite", "readout coefficient");
      total += std::norm(mu);
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ValidationError("NotNormalized",
                            "sum_alpha |mu|^2 = " + std::to_string(total));
  }
}

MeasurementProcedure MeasurementProcedure::standard(const HermitianOperator& observable) {
  const std::size_t n = spectral_decompose(observable).count();
  return MeasurementProcedure(observable,
                              std::vector<std::vector<Complex>>(n, {Complex(1.0)}));
}

MeasurementProcedure MeasurementProcedure::uniform(
    const HermitianOperator& observable,
    const std::vector<std::pair<double, int>>& multiplicities) {
  std::vector<std::pair<double, std::vector<Complex>>> rows;
  for (const auto& [x, m] : multiplicities) {
    if (m < 1) throw ValidationError("BadValue", "multiplicity must be >= 1");
    rows.emplace_back(x, std::vector<Complex>(m, Complex(1.0 / std::sqrt(double(m)))));
  }
  return with_coefficients(observable, rows);
}

MeasurementProcedure MeasurementProcedure::with_coefficients(
    const HermitianOperator& observable,
    const std::vector<std::pair<double, std::vector<Complex>>>& rows) {
  const SpectralDecomposition spec = spectral_decompose(observable);
  std::vector<std::vector<Complex>> aligned;
  aligned.reserve(spec.count());
  for (double x : spec.eigenvalues) {
    const auto it = std::find_if(rows.begin(), rows.end(), [x](const auto& r) {
      return std::abs(r.first - x) <= kPayoffTol;
    });
    if (it == rows.end())
      throw ValidationError("ReadoutUndefined",
                            "no readout row for eigenvalue " + std::to_string(x));
    aligned.push_back(it->second);
  }
  return MeasurementProcedure(observable, std::move(aligned));
}

BranchSet::BranchSet(std::vector<Branch> branches) : branches_(std::move(branches)) {
  if (branches_.empty())
    throw ValidationError("EmptyBranchSet", "no branches survived enumeration");
  double total = 0.0;
  for (const Branch& b : branches_) {
    if (!std::isfinite(b.payoff)) throw ValidationError("NonFinite", "branch payoff");
    total += b.weight();
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error("BranchWeightSum", "branch weights total " + std::to_string(total));
  auto labels_equal = [](const Branch& a, const Branch& b) {
    return a.label == b.label;
  };
  for (std::size_t i = 0; i < branches_.size(); ++i)
    for (std::size_t j = i + 1; j < branches_.size(); ++j)
      if (labels_equal(branches_[i], branches_[j]))
        throw Error("DuplicateLabel", "readout labels must be distinct");
}

WeightMap BranchSet::aggregate() const {
  std::vector<std::pair<double, double>> raw;
  raw.reserve(branches_.size());
  for (const Branch& b : branches_) raw.emplace_back(b.payoff, b.weight());
  return WeightMap::from_raw(std::move(raw));
}

SequentialPlay SequentialPlay::cash(double value) {
  SequentialPlay p;
  p.node_ = value;
  return p;
}

SequentialPlay SequentialPlay::measure(
    StateVector state, MeasurementProcedure procedure,
    std::vector<std::pair<double, SequentialPlay>> continuations) {
  if (state.dim() != procedure.observable().dim())
    throw ValidationError("DimMismatch", "state dim vs procedure observable dim");
  for (double x : procedure.spectrum().eigenvalues) {
    const bool covered =
        std::any_of(continuations.begin(), continuations.end(), [x](const auto& c) {
          return std::abs(c.first - x) <= kPayoffTol;
        });
    if (!covered)
      throw ValidationError("PayoffUndefined",
                            "continuation lacks eigenvalue " + std::to_string(x));
  }
  SequentialPlay p;
  p.node_ = std::make_shared<const Stage>(
      Stage{std::move(state), std::move(procedure), std::move(continuations)});
  return p;
}

SequentialPlay SequentialPlay::play(StateVector state, MeasurementProcedure procedure,
                                    PayoffFunction payoff) {
  std::vector<std::pair<double, SequentialPlay>> continuations;
  for (double x : procedure.spectrum().eigenvalues)
    continuations.emplace_back(x, cash(payoff.at(x, kPayoffTol, "PayoffUndefined")));
  return measure(std::move(state), std::move(procedure), std::move(continuations));
}

namespace {

void expand(const SequentialPlay::Stage& st, const std::vector<ReadoutId>& prefix,
            Complex path_amp, std::vector<Branch>& out) {
  const SpectralDecomposition& spec = st.procedure.spectrum();
  for (std::size_t k = 0; k < spec.count(); ++k) {
    const double x = spec.eigenvalues[k];
    const auto cont = std::find_if(
        st.continuations.begin(), st.continuations.end(),
        [x](const auto& c) { return std::abs(c.first - x) <= kPayoffTol; });
    const auto& mu = st.procedure.coefficients()[k];
    const int mult = static_cast<int>(mu.size());
    for (int j = 0; j < spec.multiplicity(k); ++j) {
      const Complex coeff = spec.bases[k].col(j).dot(st.state.vec());
      if (std::norm(path_amp * coeff) < kWeightEps) continue;
      for (int a = 0; a < mult; ++a) {
        const Complex amp = path_amp * coeff * mu[a];
        if (std::norm(amp) < kWeightEps) continue;  // zero-weight worlds don't exist
        std::vector<ReadoutId> label = prefix;
        label.push_back({x, j * mult + a});
        if (cont->second.is_cash())
          out.push_back({std::move(label), cont->second.cash_value(), amp});
        else
          expand(cont->second.stage(), label, amp, out);
      }
    }
  }
}

}  // namespace

BranchSet enumerate_branches(const SequentialPlay& root) {
  if (root.is_cash())
    throw ValidationError("BadValue", "root of a sequential play must measure");
  std::vector<Branch> out;
  expand(root.stage(), {}, Complex(1.0), out);
  return BranchSet(std::move(out));
}

BranchSet run(const MeasurementProcedure& proc, const StateVector& psi,
              const PayoffFunction& payoff) {
  if (proc.observable().dim() != psi.dim())
    throw ValidationError("DimMismatch", "procedure dim vs state dim");
  return enumerate_branches(SequentialPlay::play(psi, proc, payoff));
}

BranchSet compose(const MeasurementProcedure& outer, const StateVector& psi,
                  const std::vector<std::pair<double, SequentialPlay>>& continuation) {
  return enumerate_branches(SequentialPlay::measure(psi, outer, continuation));
}

bool instantiates(const BranchSet& b, const Game& g, double tol) {
  return b.aggregate().same_distribution(weight_map(g), tol);
}

}  // namespace qgame
