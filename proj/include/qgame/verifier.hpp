#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qgame/valuation.hpp"

namespace qgame {

// One numeric assertion inside a stage. Normally passes when lhs and rhs agree
// within tol; a negative control ("apart") passes when they provably differ.
struct Check {
  std::string description;
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  bool apart = false;
  bool pass = false;
};

Check close_check(std::string description, double lhs, double rhs,
                  double tol = kValueTol);
Check apart_check(std::string description, double lhs, double rhs,
                  double tol = kValueTol);

struct StageReport {
  std::string stage;
  std::map<std::string, std::string> params;
  std::vector<Check> checks;
  bool pass = false;  // true iff every check passes

  void add(Check c);
};

// A_n / 2^n.
struct Dyadic {
  long long numerator = 0;
  int exponent = 0;
  double value() const;
};

// decreasing: smallest A/2^n >= a; increasing: largest A/2^n <= a.
// Requires 0 < a < 1 and n >= 1 (OutOfRange).
Dyadic dyadic_approx(double a, int n, bool decreasing);

// Monotone dyadic approximants of `target', one per exponent. Leading zero
// numerators are skipped so every recorded term is positive.
struct DyadicSequence {
  double target = 0.0;
  bool decreasing = false;
  std::vector<Dyadic> terms;

  static DyadicSequence build(double target, int depth, bool decreasing);
};

struct StageParams {
  double x1 = 0.0;          // two-outcome payoffs
  double x2 = 1.0;
  double a = 1.0 / 3.0;     // amplitude-squared weight for the bracketing stages
  int depth = 20;           // dyadic bracketing depth
  int n_max = 3;            // doubling-composition ladder: N = 2^1 .. 2^n_max
  long multiplicity = 1000; // device-pair readout multiplicity
};

// All stage ids in canonical (sorted) report order.
const std::vector<std::string>& stage_ids();

StageReport verify_stage(const std::string& stage_id, const StageParams& params,
                         std::uint64_t seed);
std::vector<StageReport> verify_all(const StageParams& params, std::uint64_t seed);

// The two-device comparison: a single-readout device and a `multiplicity`-fold
// readout device for the same two-outcome game.
StageReport device_pair_demo(long multiplicity);

}  // namespace qgame
