#include "qgame/real_map.hpp"

#include <algorithm>
#include <cmath>

#include "qgame/errors.hpp"

namespace qgame {

RealMap::RealMap(std::initializer_list<std::pair<double, double>> entries)
    : entries_(entries) {
  normalize();
}

RealMap::RealMap(std::vector<std::pair<double, double>> entries)
    : entries_(std::move(entries)) {
  normalize();
}

void RealMap::normalize() {
  for (const auto& [k, v] : entries_) {
    if (!std::isfinite(k) || !std::isfinite(v))
      throw ValidationError("NonFinite", "table entries must be finite");
  }
  std::sort(entries_.begin(), entries_.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& e : entries_) {
    if (!merged.empty() && e.first - merged.back().first <= kPayoffTol) {
      if (std::abs(e.second - merged.back().second) > kPayoffTol)
        throw ValidationError("DuplicateKey",
                              "conflicting values for key " + std::to_string(e.first));
      continue;
    }
    merged.push_back(e);
  }
  entries_ = std::move(merged);
}

RealMap RealMap::tabulate(const std::vector<double>& keys,
                          const std::function<double(double)>& f) {
  std::vector<std::pair<double, double>> entries;
  entries.reserve(keys.size());
  for (double k : keys) entries.emplace_back(k, f(k));
  return RealMap(std::move(entries));
}

RealMap RealMap::identity_on(const std::vector<double>& keys) {
  return tabulate(keys, [](double x) { return x; });
}

RealMap RealMap::indicator(double point, const std::vector<double>& keys) {
  return tabulate(keys, [point](double x) {
    return std::abs(x - point) <= kPayoffTol ? 1.0 : 0.0;
  });
}

RealMap RealMap::constant(double value, const std::vector<double>& keys) {
  return tabulate(keys, [value](double) { return value; });
}

bool RealMap::contains(double key, double tol) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const auto& e, double k) { return e.first < k; });
  if (it != entries_.end() && std::abs(it->first - key) <= tol) return true;
  if (it != entries_.begin() && std::abs(std::prev(it)->first - key) <= tol) return true;
  return false;
}

double RealMap::at(double key, double tol, const std::string& missing_code) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const auto& e, double k) { return e.first < k; });
  double best = 0.0;
  double best_gap = tol;
  bool found = false;
  for (auto c : {it, it == entries_.begin() ? entries_.end() : std::prev(it)}) {
    if (c == entries_.end()) continue;
    const double gap = std::abs(c->first - key);
    if (gap <= best_gap) {
      best_gap = gap;
      best = c->second;
      found = true;
    }
  }
  if (!found)
    throw ValidationError(missing_code, "no entry for key " + std::to_string(key));
  return best;
}

std::vector<double> RealMap::keys() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

std::vector<double> RealMap::values() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.second);
  return out;
}

RealMap RealMap::plus_constant(double k) const {
  auto entries = entries_;
  for (auto& e : entries) e.second += k;
  return RealMap(std::move(entries));
}

RealMap RealMap::negated() const { return scaled(-1.0); }

RealMap RealMap::scaled(double a) const {
  auto entries = entries_;
  for (auto& e : entries) e.second *= a;
  return RealMap(std::move(entries));
}

RealMap RealMap::plus(const RealMap& other) const {
  if (entries_.size() != other.entries_.size())
    throw ValidationError("DimMismatch", "pointwise sum needs identical key sets");
  auto entries = entries_;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (std::abs(entries[i].first - other.entries_[i].first) > kPayoffTol)
      throw ValidationError("DimMismatch", "pointwise sum needs identical key sets");
    entries[i].second += other.entries_[i].second;
  }
  return RealMap(std::move(entries));
}

bool RealMap::same_table(const RealMap& other, double value_tol) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (std::abs(entries_[i].first - other.entries_[i].first) > kPayoffTol) return false;
    if (std::abs(entries_[i].second - other.entries_[i].second) > value_tol) return false;
  }
  return true;
}

}  // namespace qgame
