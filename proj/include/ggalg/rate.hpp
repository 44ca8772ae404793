//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace ggalg {

using Rational = boost::rational<long long>;

inline std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

// Exact coefficient times a product of rate symbols. The symbol list is kept
// sorted, so equal monomials compare equal.
class RateMonomial {
 public:
  RateMonomial() = default;
  explicit RateMonomial(std::vector<std::string> symbols, Rational coefficient = Rational(1))
      : coefficient_(coefficient), symbols_(std::move(symbols)) {
    std::sort(symbols_.begin(), symbols_.end());
  }

  static RateMonomial symbol(std::string name) { return RateMonomial({std::move(name)}); }

  const Rational& coefficient() const { return coefficient_; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  friend RateMonomial operator*(const RateMonomial& a, const RateMonomial& b) {
    std::vector<std::string> merged;
    merged.reserve(a.symbols_.size() + b.symbols_.size());
    std::merge(a.symbols_.begin(), a.symbols_.end(), b.symbols_.begin(), b.symbols_.end(),
               std::back_inserter(merged));
    RateMonomial out;
    out.coefficient_ = a.coefficient_ * b.coefficient_;
    out.symbols_ = std::move(merged);
    return out;
  }

  bool operator==(const RateMonomial&) const = default;
  friend bool operator<(const RateMonomial& a, const RateMonomial& b) {
    if (a.symbols_ != b.symbols_) return a.symbols_ < b.symbols_;
    return a.coefficient_ < b.coefficient_;
  }

 private:
  Rational coefficient_{1};
  std::vector<std::string> symbols_;
};

// "1", "rho_grow", "rho_grow*rho_sever", "1/2*k".
inline std::string to_string(const RateMonomial& r) {
  std::string out;
  if (r.coefficient() != Rational(1) || r.symbols().empty()) out = to_string(r.coefficient());
  for (const auto& s : r.symbols()) {
    if (!out.empty()) out += "*";
    out += s;
  }
  return out;
}

// Polynomial in rate symbols with exact rational coefficients.
class Weight {
 public:
  using Terms = std::map<std::vector<std::string>, Rational>;

  Weight() = default;
  Weight(const RateMonomial& m, Rational scale = Rational(1)) { add(m, scale); }

  void add(const RateMonomial& m, Rational scale = Rational(1)) {
    add_term(m.symbols(), m.coefficient() * scale);
  }
  void add_term(const std::vector<std::string>& symbols, Rational c) {
    if (c == Rational(0)) return;
    auto [it, fresh] = terms_.try_emplace(symbols, c);
    if (!fresh) {
      it->second += c;
      if (it->second == Rational(0)) terms_.erase(it);
    }
  }

  Weight& operator+=(const Weight& o) {
    for (const auto& [s, c] : o.terms_) add_term(s, c);
    return *this;
  }
  Weight& operator-=(const Weight& o) {
    for (const auto& [s, c] : o.terms_) add_term(s, -c);
    return *this;
  }
  friend Weight operator*(const Weight& a, const Weight& b) {
    Weight out;
    for (const auto& [sa, ca] : a.terms_)
      for (const auto& [sb, cb] : b.terms_) {
        std::vector<std::string> merged;
        std::merge(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(merged));
        out.add_term(merged, ca * cb);
      }
    return out;
  }

  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }
  bool operator==(const Weight&) const = default;

 private:
  Terms terms_;
};

inline std::string to_string(const Weight& w) {
  if (w.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [symbols, c] : w.terms()) {
    Rational mag = c < Rational(0) ? -c : c;
    if (first) {
      if (c < Rational(0)) os << "-";
    } else {
      os << (c < Rational(0) ? " - " : " + ");
    }
    first = false;
    os << to_string(RateMonomial(symbols, mag));
  }
  return os.str();
}

}  // namespace ggalg
