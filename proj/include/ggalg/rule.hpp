//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ggalg/canonical.hpp"
#include "ggalg/error.hpp"
#include "ggalg/graph.hpp"
#include "ggalg/rate.hpp"

namespace ggalg {

// A rewrite rule lhs => rhs over one shared node numbering: ids on both sides
// are conserved, lhs-only ids are destroyed, rhs-only ids are created.
//
// `forbidden` lists lhs node pairs that must NOT carry an edge for a match.
// Base grammar rules leave it empty; composition and number_rule use it to
// carry the absence conditions implied by edge creation.
struct Rule {
  std::string name;
  LabelledGraph lhs;
  LabelledGraph rhs;
  std::set<Edge> forbidden;
  RateMonomial rate;

  bool operator==(const Rule&) const = default;

  bool conserved(NodeId id) const { return lhs.has_node(id) && rhs.has_node(id); }
  bool destroyed(NodeId id) const { return lhs.has_node(id) && !rhs.has_node(id); }
  bool created(NodeId id) const { return !lhs.has_node(id) && rhs.has_node(id); }
  bool has_phantoms() const { return !lhs.phantoms.empty() || !rhs.phantoms.empty(); }
  bool has_edges() const { return !lhs.edges.empty() || !rhs.edges.empty() || !forbidden.empty(); }

  // Every id used on either side, ascending.
  std::vector<NodeId> all_ids() const {
    std::set<NodeId> s;
    for (NodeId id : lhs.ids()) s.insert(id);
    for (NodeId id : rhs.ids()) s.insert(id);
    return {s.begin(), s.end()};
  }
};

inline std::optional<std::string> rule_violation(const Rule& r) {
  if (!r.lhs.phantoms.empty()) return "lhs may not contain phantom nodes";
  if (auto why = invariant_violation(r.lhs)) return "lhs: " + *why;
  if (auto why = invariant_violation(r.rhs)) return "rhs: " + *why;
  for (const auto& [from, to] : r.forbidden) {
    const std::string e = std::to_string(from) + "->" + std::to_string(to);
    if (!r.lhs.has_node(from) || !r.lhs.has_node(to))
      return "forbidden edge " + e + " has an endpoint outside the lhs nodes";
    if (r.lhs.edges.count({from, to})) return "forbidden edge " + e + " is also an lhs edge";
  }
  return std::nullopt;
}

inline const Rule& validate_rule(const Rule& r) {
  if (auto why = rule_violation(r))
    throw MalformedRule((r.name.empty() ? std::string("rule") : "rule '" + r.name + "'") + ": " + *why);
  return r;
}

// The identity rule with no nodes.
inline Rule empty_rule(std::string name = "I") {
  Rule r;
  r.name = std::move(name);
  return r;
}

struct RuleKey {
  std::string bytes;
  auto operator<=>(const RuleKey&) const = default;
};

namespace detail {

struct RuleCanon {
  std::vector<NodeId> ids;
  CanonicalLabelling labelling;
  std::string structure;
};

inline RuleCanon canonicalize_rule(const Rule& r) {
  RuleCanon out;
  out.ids = r.all_ids();
  std::vector<std::string> alphabet;
  for (const auto& [id, l] : r.lhs.nodes) alphabet.push_back(l.name);
  for (const auto& [id, l] : r.rhs.nodes) alphabet.push_back(l.name);
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  auto label_code = [&](const LabelledGraph& g, NodeId id) -> std::uint32_t {
    auto it = g.nodes.find(id);
    if (it == g.nodes.end()) return 0;
    return 1 + static_cast<std::uint32_t>(
                   std::lower_bound(alphabet.begin(), alphabet.end(), it->second.name) - alphabet.begin());
  };

  const std::size_t n = out.ids.size();
  const auto width = static_cast<std::uint32_t>(alphabet.size() + 1);
  ColouredDigraph cg(n);
  std::map<NodeId, std::size_t> index;
  for (std::size_t k = 0; k < n; ++k) {
    const NodeId id = out.ids[k];
    index[id] = k;
    const std::uint32_t phantom = r.rhs.phantoms.count(id) ? 1 : 0;
    cg.colour[k] = (label_code(r.lhs, id) * width + label_code(r.rhs, id)) * 2 + phantom;
  }
  auto mark = [&](const std::set<Edge>& edges, std::uint8_t bit) {
    for (const auto& [from, to] : edges) {
      auto a = index.at(from), b = index.at(to);
      cg.set_edge(a, b, static_cast<std::uint8_t>(cg.edge(a, b) | bit));
    }
  };
  mark(r.lhs.edges, 1);
  mark(r.rhs.edges, 2);
  mark(r.forbidden, 4);

  out.labelling = canonicalize(cg);
  append_string(out.structure, std::to_string(alphabet.size()));
  for (const auto& name : alphabet) append_string(out.structure, name);
  out.structure += out.labelling.code;
  return out;
}

inline std::string rate_bytes(const RateMonomial& rate) {
  std::string out;
  append_string(out, to_string(rate.coefficient()));
  for (const auto& s : rate.symbols()) append_string(out, s);
  return out;
}

}  // namespace detail

// Isomorphism-class key of the rule shape alone (names and rates ignored).
// Two rules share it iff some id bijection preserves labels on each side,
// edges on each side, forbidden edges and phantoms.
inline RuleKey structure_key(const Rule& r) { return {detail::canonicalize_rule(r).structure}; }

// structure_key extended by the rate monomial.
inline RuleKey rule_key(const Rule& r) {
  auto canon = detail::canonicalize_rule(r);
  RuleKey key{canon.structure};
  key.bytes.push_back('\0');
  key.bytes += detail::rate_bytes(r.rate);
  return key;
}

inline bool rules_isomorphic(const Rule& a, const Rule& b) { return structure_key(a) == structure_key(b); }

// The canonical representative: ids renumbered 0..n-1 in canonical order.
inline Rule canonical_rule(const Rule& r) {
  auto canon = detail::canonicalize_rule(r);
  std::map<NodeId, NodeId> remap;
  for (std::size_t k = 0; k < canon.labelling.order.size(); ++k)
    remap[canon.ids[canon.labelling.order[k]]] = static_cast<NodeId>(k);
  Rule out;
  out.name = r.name;
  out.rate = r.rate;
  out.lhs = disjoint_embed(r.lhs, remap);
  out.rhs = disjoint_embed(r.rhs, remap);
  for (const auto& [from, to] : r.forbidden) out.forbidden.emplace(remap.at(from), remap.at(to));
  return out;
}

}  // namespace ggalg
