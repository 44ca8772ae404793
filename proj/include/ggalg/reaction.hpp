//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ggalg/error.hpp"
#include "ggalg/rate.hpp"
#include "ggalg/rule.hpp"
#include "ggalg/rule_algebra.hpp"

namespace ggalg {

// A pure reaction m -> n over numbered species, acting as
// k * prod_i adag_i^{n_i} a_i^{m_i}.
struct Reaction {
  std::string name;
  std::vector<int> m;
  std::vector<int> n;
  RateMonomial k;

  bool operator==(const Reaction&) const = default;
};

struct ReactionKey {
  std::vector<int> m;
  std::vector<int> n;
  std::vector<std::string> symbols;

  auto operator<=>(const ReactionKey&) const = default;
};

// Linear combination of reactions with exact coefficients. Zero terms are
// never stored.
class ReactionSum {
 public:
  using Terms = std::map<ReactionKey, Rational>;

  void add(const ReactionKey& key, Rational c) {
    if (c == Rational(0)) return;
    auto [it, fresh] = terms_.try_emplace(key, c);
    if (!fresh) {
      it->second += c;
      if (it->second == Rational(0)) terms_.erase(it);
    }
  }
  void add(const Reaction& r, Rational scale = Rational(1)) {
    add({r.m, r.n, r.k.symbols()}, r.k.coefficient() * scale);
  }
  ReactionSum& operator+=(const ReactionSum& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  ReactionSum& operator-=(const ReactionSum& o) {
    for (const auto& [k, c] : o.terms_) add(k, -c);
    return *this;
  }
  friend ReactionSum operator-(ReactionSum a, const ReactionSum& b) { return a -= b; }

  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Terms& terms() const& { return terms_; }
  Terms terms() && { return std::move(terms_); }
  bool operator==(const ReactionSum&) const = default;

 private:
  Terms terms_;
};

namespace detail {

inline void check_species(const Reaction& r) {
  if (r.m.size() != r.n.size())
    throw ContractViolation("reaction '" + r.name + "': m and n differ in length");
  for (std::size_t i = 0; i < r.m.size(); ++i)
    if (r.m[i] < 0 || r.n[i] < 0) throw ContractViolation("reaction '" + r.name + "': negative stoichiometry");
}

inline void check_species(const Reaction& a, const Reaction& b) {
  check_species(a);
  check_species(b);
  if (a.m.size() != b.m.size())
    throw ContractViolation("reactions '" + a.name + "' and '" + b.name + "' have different species counts");
}

// n! / (n-l)!, zero when l > n.
inline long long falling(long long n, long long l) {
  if (l > n) return 0;
  long long out = 1;
  for (long long j = 0; j < l; ++j) out *= n - j;
  return out;
}

inline long long factorial(long long n) { return falling(n, n); }

// prod_i (a_i)_{l_i} (b_i)_{l_i} / l_i!, with every division checked exact.
inline long long contraction_count(const std::vector<int>& a, const std::vector<int>& b, const std::vector<int>& l) {
  long long out = 1;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const long long num = falling(a[i], l[i]) * falling(b[i], l[i]);
    const long long den = factorial(l[i]);
    if (num % den != 0) throw ContractViolation("falling-factorial product is not divisible by l!");
    out *= num / den;
  }
  return out;
}

// Calls f(l) for every l with 0 <= l_i <= bound_i.
template <class F>
void for_each_profile(const std::vector<int>& bound, F&& f) {
  std::vector<int> l(bound.size(), 0);
  for (;;) {
    f(l);
    std::size_t i = 0;
    while (i < l.size() && l[i] == bound[i]) l[i++] = 0;
    if (i == l.size()) return;
    ++l[i];
  }
}

inline ReactionKey contracted_key(const Reaction& r2, const Reaction& r1, const std::vector<int>& l) {
  ReactionKey key;
  for (std::size_t i = 0; i < l.size(); ++i) {
    key.m.push_back(r1.m[i] + r2.m[i] - l[i]);
    key.n.push_back(r1.n[i] + r2.n[i] - l[i]);
  }
  key.symbols = (r2.k * r1.k).symbols();
  return key;
}

}  // namespace detail

// W_{r2} W_{r1} in normal order: each l-profile pairs l_i of r2's
// annihilators with l_i of r1's creators.
inline ReactionSum reaction_product(const Reaction& r2, const Reaction& r1) {
  detail::check_species(r2, r1);
  const Rational coeff = r2.k.coefficient() * r1.k.coefficient();
  std::vector<int> bound;
  for (std::size_t i = 0; i < r1.m.size(); ++i) bound.push_back(std::min(r2.m[i], r1.n[i]));
  ReactionSum out;
  detail::for_each_profile(bound, [&](const std::vector<int>& l) {
    out.add(detail::contracted_key(r2, r1, l), coeff * Rational(detail::contraction_count(r2.m, r1.n, l)));
  });
  return out;
}

// [W_{r2}, W_{r1}] summed directly over the non-empty profiles l != 0.
inline ReactionSum reaction_commutator(const Reaction& r2, const Reaction& r1) {
  detail::check_species(r2, r1);
  const Rational coeff = r2.k.coefficient() * r1.k.coefficient();
  std::vector<int> bound;
  for (std::size_t i = 0; i < r1.m.size(); ++i)
    bound.push_back(std::max(std::min(r2.m[i], r1.n[i]), std::min(r1.m[i], r2.n[i])));
  ReactionSum out;
  detail::for_each_profile(bound, [&](const std::vector<int>& l) {
    bool zero = true;
    for (int x : l) zero = zero && x == 0;
    if (zero) return;
    const long long c = detail::contraction_count(r2.m, r1.n, l) - detail::contraction_count(r1.m, r2.n, l);
    out.add(detail::contracted_key(r2, r1, l), coeff * Rational(c));
  });
  return out;
}

// Exact sparse matrix on the number basis 0 <= n_i <= nmax_i, with creation
// truncated at the top state.
class FockMatrix {
 public:
  using Column = std::map<std::size_t, Rational>;

  explicit FockMatrix(std::vector<int> nmax) : nmax_(std::move(nmax)) {
    dim_ = 1;
    for (int x : nmax_) {
      if (x < 0) throw ContractViolation("fock_matrix: negative Nmax");
      dim_ *= static_cast<std::size_t>(x + 1);
    }
    columns_.resize(dim_);
  }

  const std::vector<int>& nmax() const { return nmax_; }
  std::size_t dim() const { return dim_; }

  std::size_t index(const std::vector<int>& n) const {
    std::size_t out = 0;
    for (std::size_t i = nmax_.size(); i-- > 0;) out = out * static_cast<std::size_t>(nmax_[i] + 1) + n[i];
    return out;
  }
  std::vector<int> state(std::size_t index) const {
    std::vector<int> n(nmax_.size());
    for (std::size_t i = 0; i < nmax_.size(); ++i) {
      n[i] = static_cast<int>(index % static_cast<std::size_t>(nmax_[i] + 1));
      index /= static_cast<std::size_t>(nmax_[i] + 1);
    }
    return n;
  }

  const Column& column(std::size_t j) const { return columns_[j]; }
  Rational at(std::size_t row, std::size_t col) const {
    auto it = columns_[col].find(row);
    return it == columns_[col].end() ? Rational(0) : it->second;
  }
  void add(std::size_t row, std::size_t col, Rational c) {
    if (c == Rational(0)) return;
    auto [it, fresh] = columns_[col].try_emplace(row, c);
    if (!fresh) {
      it->second += c;
      if (it->second == Rational(0)) columns_[col].erase(it);
    }
  }

  friend FockMatrix operator*(const FockMatrix& a, const FockMatrix& b) {
    if (a.nmax_ != b.nmax_) throw ContractViolation("fock matrices over different bases");
    FockMatrix out(a.nmax_);
    for (std::size_t j = 0; j < b.dim_; ++j)
      for (const auto& [k, bkj] : b.columns_[j])
        for (const auto& [i, aik] : a.columns_[k]) out.add(i, j, aik * bkj);
    return out;
  }
  FockMatrix& operator+=(const FockMatrix& o) {
    for (std::size_t j = 0; j < dim_; ++j)
      for (const auto& [i, c] : o.columns_[j]) add(i, j, c);
    return *this;
  }
  FockMatrix& operator-=(const FockMatrix& o) {
    for (std::size_t j = 0; j < dim_; ++j)
      for (const auto& [i, c] : o.columns_[j]) add(i, j, -c);
    return *this;
  }
  friend FockMatrix operator-(FockMatrix a, const FockMatrix& b) { return a -= b; }

  bool operator==(const FockMatrix&) const = default;

 private:
  std::vector<int> nmax_;
  std::size_t dim_ = 0;
  std::vector<Column> columns_;
};

namespace detail {

// adag^n a^m applied to one basis state: the annihilators first, then
// creation, which vanishes past nmax.
inline void add_reaction_action(FockMatrix& out, const std::vector<int>& m, const std::vector<int>& n, Rational c) {
  if (m.size() != out.nmax().size()) throw ContractViolation("fock_matrix: species count differs from Nmax");
  for (std::size_t j = 0; j < out.dim(); ++j) {
    std::vector<int> s = out.state(j);
    Rational amp = c;
    bool alive = true;
    for (std::size_t i = 0; i < s.size() && alive; ++i) {
      if (m[i] > s[i]) {
        alive = false;
        break;
      }
      amp *= Rational(falling(s[i], m[i]));
      s[i] += n[i] - m[i];
      if (s[i] > out.nmax()[i]) alive = false;
    }
    if (alive) out.add(out.index(s), j, amp);
  }
}

}  // namespace detail

// Rate symbols are taken as 1; only the numeric coefficient is represented.
inline FockMatrix fock_matrix(const Reaction& r, const std::vector<int>& nmax) {
  detail::check_species(r);
  FockMatrix out(nmax);
  detail::add_reaction_action(out, r.m, r.n, r.k.coefficient());
  return out;
}

inline FockMatrix fock_matrix(const ReactionSum& s, const std::vector<int>& nmax) {
  FockMatrix out(nmax);
  for (const auto& [key, c] : s.terms()) detail::add_reaction_action(out, key.m, key.n, c);
  return out;
}

// Columns n with n_i + headroom_i <= nmax_i for every species.
inline bool columns_agree(const FockMatrix& a, const FockMatrix& b, const std::vector<int>& headroom) {
  for (std::size_t j = 0; j < a.dim(); ++j) {
    const auto n = a.state(j);
    bool inside = true;
    for (std::size_t i = 0; i < n.size(); ++i) inside = inside && n[i] + headroom[i] <= a.nmax()[i];
    if (inside && a.column(j) != b.column(j)) return false;
  }
  return true;
}

inline std::vector<int> creation_headroom(const Reaction& r2, const Reaction& r1) {
  std::vector<int> h;
  for (std::size_t i = 0; i < r1.n.size(); ++i) h.push_back(r1.n[i] + r2.n[i]);
  return h;
}

struct ReactionCheck {
  bool product_ok = false;
  bool commutator_ok = false;
  bool pass() const { return product_ok && commutator_ok; }
};

// Compares both formulas with the truncated matrix products.
inline ReactionCheck check_reaction_pair(const Reaction& r2, const Reaction& r1, const std::vector<int>& nmax) {
  const FockMatrix m1 = fock_matrix(r1, nmax), m2 = fock_matrix(r2, nmax);
  const auto head = creation_headroom(r2, r1);
  const FockMatrix m21 = m2 * m1, m12 = m1 * m2;
  ReactionCheck out;
  out.product_ok = columns_agree(fock_matrix(reaction_product(r2, r1), nmax), m21, head);
  out.commutator_ok = columns_agree(fock_matrix(reaction_commutator(r2, r1), nmax), m21 - m12, head);
  return out;
}

// Every reaction over `species` species with stoichiometries up to max_degree.
inline std::vector<Reaction> all_reactions(int species, int max_degree) {
  std::vector<Reaction> out;
  detail::for_each_profile(std::vector<int>(static_cast<std::size_t>(2 * species), max_degree),
                           [&](const std::vector<int>& v) {
                             Reaction r;
                             r.m.assign(v.begin(), v.begin() + species);
                             r.n.assign(v.begin() + species, v.end());
                             r.k = RateMonomial({}, Rational(1));
                             out.push_back(std::move(r));
                           });
  return out;
}

struct ReactionSweep {
  std::size_t pairs = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool pass() const { return failures == 0; }
};

// All ordered pairs over 1..max_species species.
inline ReactionSweep sweep_reactions(int max_species, int max_degree, int nmax) {
  ReactionSweep out;
  for (int s = 1; s <= max_species; ++s) {
    const auto rs = all_reactions(s, max_degree);
    const std::vector<int> nm(static_cast<std::size_t>(s), nmax);
    std::vector<FockMatrix> mats;
    mats.reserve(rs.size());
    for (const auto& r : rs) mats.push_back(fock_matrix(r, nm));
    for (std::size_t a = 0; a < rs.size(); ++a)
      for (std::size_t b = 0; b < rs.size(); ++b) {
        const auto& r2 = rs[a];
        const auto& r1 = rs[b];
        const auto head = creation_headroom(r2, r1);
        const FockMatrix m21 = mats[a] * mats[b];
        const bool prod = columns_agree(fock_matrix(reaction_product(r2, r1), nm), m21, head);
        const bool comm =
            columns_agree(fock_matrix(reaction_commutator(r2, r1), nm), m21 - mats[b] * mats[a], head);
        ++out.pairs;
        if (!prod || !comm) {
          if (out.failures++ == 0) {
            auto vec = [](const std::vector<int>& v) {
              std::string t;
              for (int x : v) t += (t.empty() ? "" : ",") + std::to_string(x);
              return "(" + t + ")";
            };
            out.first_failure = vec(r2.m) + "->" + vec(r2.n) + " after " + vec(r1.m) + "->" + vec(r1.n) +
                                (prod ? ": commutator" : ": product");
          }
        }
      }
  }
  return out;
}

namespace detail {

inline std::vector<int> label_counts(const LabelledGraph& g, const std::vector<std::string>& species) {
  std::vector<int> v(species.size(), 0);
  for (const auto& [id, l] : g.nodes)
    ++v[static_cast<std::size_t>(std::lower_bound(species.begin(), species.end(), l.name) - species.begin())];
  return v;
}

inline std::vector<std::string> rule_species(const Rule& a, const Rule& b) {
  std::set<std::string> labels;
  for (const Rule* r : {&a, &b}) {
    for (const auto& [id, l] : r->lhs.nodes) labels.insert(l.name);
    for (const auto& [id, l] : r->rhs.nodes) labels.insert(l.name);
  }
  return {labels.begin(), labels.end()};
}

inline void check_edge_free(const Rule& r) {
  validate_rule(r);
  if (r.has_edges()) throw NotApplicable("rule '" + r.name + "' has edges");
  if (r.has_phantoms()) throw NotApplicable("rule '" + r.name + "' has phantom nodes");
  for (const auto& [id, l] : r.lhs.nodes)
    if (r.rhs.has_node(id)) throw NotApplicable("rule '" + r.name + "' has a conserved node");
}

}  // namespace detail

// Species are the sorted labels of both rules; m and n count labels.
inline std::pair<Reaction, Reaction> reactions_of(const Rule& r1, const Rule& r2) {
  detail::check_edge_free(r1);
  detail::check_edge_free(r2);
  const auto species = detail::rule_species(r1, r2);
  auto to_reaction = [&](const Rule& r) {
    return Reaction{r.name, detail::label_counts(r.lhs, species), detail::label_counts(r.rhs, species), r.rate};
  };
  return {to_reaction(r1), to_reaction(r2)};
}

struct CrossCheckReport {
  bool pass = false;
  ReactionSum from_rules;
  ReactionSum from_formula;
  std::string message;
};

// The collected graph-level product of two edge-free rules, read back as a
// reaction sum, against the falling-factorial product formula.
inline CrossCheckReport edge_free_crosscheck(const Rule& r1, const Rule& r2) {
  const auto [x1, x2] = reactions_of(r1, r2);
  const auto species = detail::rule_species(r1, r2);
  CrossCheckReport out;
  out.from_formula = reaction_product(x2, x1);
  for (const auto& t : product_hat(r2, r1, Semantics::keep).terms) {
    detail::check_edge_free(t.rule);
    out.from_rules.add({detail::label_counts(t.rule.lhs, species), detail::label_counts(t.rule.rhs, species),
                        t.rule.rate.symbols()},
                       t.rule.rate.coefficient() * Rational(t.weight));
  }
  out.pass = out.from_rules == out.from_formula;
  out.message = out.pass ? "ok" : "collected rule weights differ from the product formula";
  return out;
}

}  // namespace ggalg
