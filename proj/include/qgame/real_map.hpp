#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "qgame/tolerances.hpp"

namespace qgame {

// Finite real -> real table with tolerance-aware key lookup. Serves as both a
// payoff function (eigenvalue -> cash) and a spectrum relabeling f: sigma(X) -> R.
// Keys are kept sorted ascending; keys within kPayoffTol of each other are
// considered the same point.
class RealMap {
 public:
  RealMap() = default;
  RealMap(std::initializer_list<std::pair<double, double>> entries);
  explicit RealMap(std::vector<std::pair<double, double>> entries);

  static RealMap tabulate(const std::vector<double>& keys,
                          const std::function<double(double)>& f);
  // Identity map on the given key set (the payoff "1_X").
  static RealMap identity_on(const std::vector<double>& keys);
  // Indicator of `point` on the given key set (the payoff "delta_x").
  static RealMap indicator(double point, const std::vector<double>& keys);
  static RealMap constant(double value, const std::vector<double>& keys);

  bool contains(double key, double tol = kPayoffTol) const;
  // Value at `key`; throws ValidationError with the given code when absent.
  double at(double key, double tol = kPayoffTol,
            const std::string& missing_code = "KeyNotFound") const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<std::pair<double, double>>& entries() const { return entries_; }
  std::vector<double> keys() const;
  std::vector<double> values() const;

  // Pointwise arithmetic on the values; key set unchanged.
  RealMap plus_constant(double k) const;
  RealMap negated() const;
  RealMap scaled(double a) const;
  // Pointwise sum; both maps must share the same key set (within tolerance).
  RealMap plus(const RealMap& other) const;

  // True when every key of this map finds a partner in `other` (and vice versa)
  // with values within `value_tol`.
  bool same_table(const RealMap& other, double value_tol = kPayoffTol) const;

 private:
  void normalize();  // sort, merge duplicate keys (must agree), validate finiteness
  std::vector<std::pair<double, double>> entries_;
};

}  // namespace qgame
