//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ggalg/error.hpp"
#include "ggalg/graph.hpp"
#include "ggalg/rule.hpp"

namespace ggalg {

// keep: deleting a node leaves its incident edges behind as hanging edges.
// clean: deleting a node also erases every edge incident to it.
enum class Semantics { keep, clean };

// hat: the state-changing operator alone. full: hat minus its diagonal.
enum class OperatorKind { hat, full };

inline const char* to_string(Semantics s) { return s == Semantics::keep ? "keep" : "clean"; }
inline const char* to_string(OperatorKind k) { return k == OperatorKind::hat ? "hat" : "full"; }

// Identification of nodes of r1.rhs (the first rule's output) with nodes of
// r2.lhs, plus every r1.rhs edge inside the identified set whose image is an
// r2.lhs edge.
struct Overlap {
  PartialInjection h;
  std::set<Edge> links;

  bool operator==(const Overlap&) const = default;
  bool empty() const { return h.empty(); }
};

struct RuleTerm {
  long long weight = 0;
  Rule rule;

  bool operator==(const RuleTerm&) const = default;
};

struct RuleSum {
  std::vector<RuleTerm> terms;

  bool operator==(const RuleSum&) const = default;
  bool empty() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }

  RuleSum& add(long long weight, Rule rule) {
    terms.push_back({weight, std::move(rule)});
    return *this;
  }
  RuleSum& add(const RuleSum& other, long long scale = 1) {
    for (const auto& t : other.terms) terms.push_back({t.weight * scale, t.rule});
    return *this;
  }
};

namespace detail {

inline std::set<Edge> forced_links(const Rule& r1, const Rule& r2, const PartialInjection& h) {
  std::set<Edge> links;
  for (const auto& [from, to] : r1.rhs.edges) {
    auto a = h.image(from), b = h.image(to);
    if (a && b && r2.lhs.edges.count({*a, *b})) links.emplace(from, to);
  }
  return links;
}

inline void check_overlap(const Rule& r1, const Rule& r2, const Overlap& o) {
  std::set<NodeId> sources, targets;
  for (const auto& [s, t] : o.h.mapping) {
    auto ls = r1.rhs.nodes.find(s);
    auto lt = r2.lhs.nodes.find(t);
    if (ls == r1.rhs.nodes.end() || lt == r2.lhs.nodes.end())
      throw ContractViolation("overlap maps " + std::to_string(s) + "->" + std::to_string(t) +
                              " outside the rules' node sets");
    if (ls->second != lt->second)
      throw ContractViolation("overlap maps " + std::to_string(s) + "->" + std::to_string(t) +
                              " across different labels");
    if (!sources.insert(s).second || !targets.insert(t).second)
      throw ContractViolation("overlap is not an injective map");
  }
  if (o.links != forced_links(r1, r2, o.h))
    throw ContractViolation("overlap links are not the edge-maximal common subgraph");
}

}  // namespace detail

inline std::vector<Overlap> overlap_classes(const Rule& r1, const Rule& r2) {
  std::vector<Overlap> out;
  for (auto& h : label_partial_injections(r1.rhs, r2.lhs)) {
    auto links = detail::forced_links(r1, r2, h);
    out.push_back({std::move(h), std::move(links)});
  }
  return out;
}

// The single rule equivalent to firing r1 and then r2 on the nodes glued by
// o. Returns nullopt when that contribution is the zero operator.
//
// Numbering: r1's ids are kept; an r2 id glued by o takes its r1 preimage; the
// remaining r2 ids get the smallest ids unused by r1, ascending.
inline std::optional<Rule> compose(const Rule& r1, const Rule& r2, const Overlap& o, Semantics mode) {
  validate_rule(r1);
  validate_rule(r2);
  if (r1.has_phantoms() || r2.has_phantoms())
    throw ContractViolation("compose: input rules may not carry phantom nodes");
  detail::check_overlap(r1, r2, o);

  std::map<NodeId, NodeId> map2;
  for (const auto& [s, t] : o.h.mapping) map2[t] = s;
  {
    const std::vector<NodeId> used = r1.all_ids();
    NodeId next = 0;
    for (NodeId id : r2.all_ids()) {
      if (map2.count(id)) continue;
      while (std::binary_search(used.begin(), used.end(), next)) ++next;
      map2[id] = next++;
    }
  }
  auto m2 = [&](const Edge& e) { return Edge{map2.at(e.first), map2.at(e.second)}; };
  auto fresh1 = [&](NodeId id) { return r1.created(id); };
  auto dies_in_r2 = [&](NodeId id) {
    auto t = o.h.image(id);
    return t && r2.destroyed(*t);
  };
  std::set<Edge> image_links;
  for (const auto& e : o.links) image_links.emplace(*o.h.image(e.first), *o.h.image(e.second));

  Rule out;
  out.name = r1.name + ";" + r2.name;
  out.rate = r1.rate * r2.rate;

  out.lhs.nodes = r1.lhs.nodes;
  for (const auto& [id, label] : r2.lhs.nodes)
    if (!o.h.preimage(id)) out.lhs.nodes.emplace(map2.at(id), label);
  out.lhs.edges = r1.lhs.edges;
  for (const auto& e2 : r2.lhs.edges) {
    if (image_links.count(e2)) continue;
    const Edge e = m2(e2);
    // r2 needs an edge at a node r1 has just created, and r1 did not create it.
    if (fresh1(e.first) || fresh1(e.second)) return std::nullopt;
    // r2 needs an edge that r1 has just deleted.
    if (r1.lhs.edges.count(e)) return std::nullopt;
    out.lhs.edges.insert(e);
  }

  for (const auto& [id, label] : r2.rhs.nodes) out.rhs.nodes.emplace(map2.at(id), label);
  for (const auto& [id, label] : r1.rhs.nodes)
    if (!o.h.image(id)) out.rhs.nodes.emplace(id, label);
  for (const auto& e2 : r2.rhs.edges) {
    const Edge e = m2(e2);
    // r2 creates an edge that r1 left in place.
    if (!r2.lhs.edges.count(e2) && r1.rhs.edges.count(e)) return std::nullopt;
    out.rhs.edges.insert(e);
  }

  std::set<Edge> guards = r1.forbidden;
  for (const auto& e : r1.rhs.edges) {
    if (o.links.count(e)) continue;
    const bool hangs = dies_in_r2(e.first) || dies_in_r2(e.second);
    if (!hangs) {
      out.rhs.edges.insert(e);
      continue;
    }
    if (mode == Semantics::keep) {
      out.rhs.edges.insert(e);
      for (NodeId z : {e.first, e.second})
        if (dies_in_r2(z)) out.rhs.phantoms.insert(z);
    } else if (!r1.lhs.edges.count(e) && !fresh1(e.first) && !fresh1(e.second)) {
      // r1's creation of e still requires e to be absent beforehand.
      guards.insert(e);
    }
  }
  for (const auto& e : o.links) {
    const Edge e2{*o.h.image(e.first), *o.h.image(e.second)};
    if (!r1.lhs.edges.count(e) && !r2.rhs.edges.count(e2) && !fresh1(e.first) && !fresh1(e.second))
      guards.insert(e);
  }
  for (const auto& g2 : r2.forbidden) {
    const Edge g = m2(g2);
    if (r1.rhs.edges.count(g)) return std::nullopt;
    if (fresh1(g.first) || fresh1(g.second) || r1.lhs.edges.count(g)) continue;
    guards.insert(g);
  }
  for (const auto& g : guards) {
    if (out.lhs.edges.count(g)) return std::nullopt;
    // Creating an edge already requires it to be absent.
    if (out.rhs.edges.count(g)) continue;
    out.forbidden.insert(g);
  }

  if (mode == Semantics::keep)
    validate_rule(out);
  else if (auto why = rule_violation(out); why || out.has_phantoms())
    throw ContractViolation("compose produced an invalid rule: " + why.value_or("phantom in clean mode"));
  return out;
}

// Merge rule-isomorphic terms with equal rates, drop zero weights, and emit
// canonical representatives in canonical order.
inline RuleSum collect(const RuleSum& s) {
  std::map<RuleKey, RuleTerm> merged;
  for (const auto& t : s.terms) {
    if (t.weight == 0) continue;
    auto key = rule_key(t.rule);
    auto it = merged.find(key);
    if (it == merged.end()) {
      Rule canon = canonical_rule(t.rule);
      canon.name.clear();
      merged.emplace(std::move(key), RuleTerm{t.weight, std::move(canon)});
    } else {
      it->second.weight += t.weight;
    }
  }
  RuleSum out;
  for (auto& [key, term] : merged)
    if (term.weight != 0) out.terms.push_back(std::move(term));
  return out;
}

// Ŵ_{r2} Ŵ_{r1}: r1 fires first.
inline RuleSum product_hat(const Rule& r2, const Rule& r1, Semantics mode, bool include_empty_overlap = true) {
  RuleSum raw;
  for (const auto& o : overlap_classes(r1, r2)) {
    if (o.empty() && !include_empty_overlap) continue;
    if (auto c = compose(r1, r2, o, mode)) raw.add(1, std::move(*c));
  }
  return collect(raw);
}

// The diagonal rule lhs => lhs. Edges that r creates between conserved nodes
// become forbidden edges, since r cannot fire where they already exist.
inline Rule number_rule(const Rule& r) {
  validate_rule(r);
  Rule out;
  out.name = r.name + "^in";
  out.lhs = r.lhs;
  out.rhs = r.lhs;
  out.rate = r.rate;
  out.forbidden = r.forbidden;
  for (const auto& e : r.rhs.edges)
    if (!r.lhs.edges.count(e) && r.conserved(e.first) && r.conserved(e.second)) out.forbidden.insert(e);
  return out;
}

// (Ŵ2 - Ŵ2^in)(Ŵ1 - Ŵ1^in).
inline RuleSum full_product(const Rule& r2, const Rule& r1, Semantics mode, bool include_empty_overlap = true) {
  const Rule n1 = number_rule(r1), n2 = number_rule(r2);
  RuleSum raw;
  raw.add(product_hat(r2, r1, mode, include_empty_overlap), +1);
  raw.add(product_hat(r2, n1, mode, include_empty_overlap), -1);
  raw.add(product_hat(n2, r1, mode, include_empty_overlap), -1);
  raw.add(product_hat(n2, n1, mode, include_empty_overlap), +1);
  return collect(raw);
}

inline RuleSum product(const Rule& r2, const Rule& r1, Semantics mode, OperatorKind kind,
                       bool include_empty_overlap = true) {
  return kind == OperatorKind::hat ? product_hat(r2, r1, mode, include_empty_overlap)
                                   : full_product(r2, r1, mode, include_empty_overlap);
}

// [X2, X1] = X2 X1 - X1 X2.
inline RuleSum commutator(const Rule& r2, const Rule& r1, Semantics mode, OperatorKind kind,
                          bool include_empty_overlap = true) {
  RuleSum raw;
  raw.add(product(r2, r1, mode, kind, include_empty_overlap), +1);
  raw.add(product(r1, r2, mode, kind, include_empty_overlap), -1);
  return collect(raw);
}

}  // namespace ggalg
