//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ggalg/canonical.hpp"
#include "ggalg/error.hpp"

namespace ggalg {

struct Label {
  std::string name;

  Label() = default;
  explicit Label(std::string n) : name(std::move(n)) {}

  auto operator<=>(const Label&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Label& l) { return os << l.name; }

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Finite directed simple graph with numbered, labelled nodes. Phantoms are
// unlabelled edge endpoints; they only appear on the right-hand side of
// compound rules built under hanging-edge-permissive semantics.
struct LabelledGraph {
  std::map<NodeId, Label> nodes;
  std::set<Edge> edges;
  std::set<NodeId> phantoms;

  bool operator==(const LabelledGraph&) const = default;

  bool has_node(NodeId id) const { return nodes.count(id) != 0; }
  bool has_id(NodeId id) const { return has_node(id) || phantoms.count(id) != 0; }
  bool empty() const { return nodes.empty() && phantoms.empty() && edges.empty(); }

  // Labelled nodes and phantoms, ascending.
  std::vector<NodeId> ids() const {
    std::vector<NodeId> out;
    out.reserve(nodes.size() + phantoms.size());
    for (const auto& [id, label] : nodes) out.push_back(id);
    out.insert(out.end(), phantoms.begin(), phantoms.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  LabelledGraph& add_node(NodeId id, std::string label) {
    nodes.insert_or_assign(id, Label(std::move(label)));
    return *this;
  }
  LabelledGraph& add_edge(NodeId from, NodeId to) {
    edges.emplace(from, to);
    return *this;
  }
  LabelledGraph& add_phantom(NodeId id) {
    phantoms.insert(id);
    return *this;
  }
};

// Describes the first broken invariant, if any.
inline std::optional<std::string> invariant_violation(const LabelledGraph& g) {
  for (NodeId p : g.phantoms)
    if (g.has_node(p)) return "phantom " + std::to_string(p) + " is also a labelled node";
  for (const auto& [from, to] : g.edges)
    if (!g.has_id(from) || !g.has_id(to))
      return "edge " + std::to_string(from) + "->" + std::to_string(to) +
             " has an endpoint outside the node set";
  for (const auto& [id, label] : g.nodes)
    if (label.name.empty()) return "node " + std::to_string(id) + " has an empty label";
  return std::nullopt;
}

inline void check_invariants(const LabelledGraph& g) {
  if (auto why = invariant_violation(g)) throw MalformedGraph(*why);
}

struct CanonicalForm {
  std::string bytes;
  auto operator<=>(const CanonicalForm&) const = default;
};

struct GraphCanonicalLabelling {
  CanonicalForm form;
  // order[k] is the node id that receives canonical number k.
  std::vector<NodeId> order;
};

namespace detail {

// Length-prefixed string, so concatenated encodings stay unambiguous.
inline void append_string(std::string& out, const std::string& s) {
  const auto len = static_cast<std::uint32_t>(s.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((len >> shift) & 0xff));
  out += s;
}

}  // namespace detail

inline GraphCanonicalLabelling canonical_labelling(const LabelledGraph& g) {
  const std::vector<NodeId> ids = g.ids();
  std::vector<std::string> alphabet;
  for (const auto& [id, label] : g.nodes) alphabet.push_back(label.name);
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

  detail::ColouredDigraph cg(ids.size());
  std::map<NodeId, std::size_t> index;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    index[ids[k]] = k;
    auto it = g.nodes.find(ids[k]);
    // Colour 0 is the reserved "no label" mark for phantoms.
    cg.colour[k] = it == g.nodes.end()
                       ? 0
                       : 1 + static_cast<std::uint32_t>(
                                 std::lower_bound(alphabet.begin(), alphabet.end(), it->second.name) -
                                 alphabet.begin());
  }
  for (const auto& [from, to] : g.edges) cg.set_edge(index.at(from), index.at(to), 1);

  auto canon = detail::canonicalize(cg);
  GraphCanonicalLabelling out;
  detail::append_string(out.form.bytes, std::to_string(alphabet.size()));
  for (const auto& name : alphabet) detail::append_string(out.form.bytes, name);
  out.form.bytes += canon.code;
  out.order.reserve(ids.size());
  for (std::size_t v : canon.order) out.order.push_back(ids[v]);
  return out;
}

inline CanonicalForm canonical_form(const LabelledGraph& g) { return canonical_labelling(g).form; }

inline bool are_isomorphic(const LabelledGraph& a, const LabelledGraph& b) {
  if (a.nodes.size() != b.nodes.size() || a.phantoms.size() != b.phantoms.size() ||
      a.edges.size() != b.edges.size())
    return false;
  return canonical_form(a) == canonical_form(b);
}

// A label-preserving injective map from a subset S of source nodes into
// target nodes; `mapping` is sorted by source id so S = its first components.
struct PartialInjection {
  std::vector<std::pair<NodeId, NodeId>> mapping;

  bool operator==(const PartialInjection&) const = default;
  std::size_t size() const { return mapping.size(); }
  bool empty() const { return mapping.empty(); }

  std::optional<NodeId> image(NodeId source) const {
    for (const auto& [s, t] : mapping)
      if (s == source) return t;
    return std::nullopt;
  }
  std::optional<NodeId> preimage(NodeId target) const {
    for (const auto& [s, t] : mapping)
      if (t == target) return s;
    return std::nullopt;
  }
};

// Every (S, h) with S a subset of src's labelled nodes and h: S -> dst an
// injection that preserves labels. Ordered by |S|, then lexicographically;
// the empty injection comes first.
inline std::vector<PartialInjection> label_partial_injections(const LabelledGraph& src,
                                                              const LabelledGraph& dst) {
  std::vector<std::pair<NodeId, const Label*>> sources, targets;
  for (const auto& [id, label] : src.nodes) sources.emplace_back(id, &label);
  for (const auto& [id, label] : dst.nodes) targets.emplace_back(id, &label);

  std::vector<PartialInjection> out;
  std::vector<std::pair<NodeId, NodeId>> current;
  std::vector<bool> used(targets.size(), false);

  auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == sources.size()) {
      out.push_back(PartialInjection{current});
      return;
    }
    self(self, i + 1);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (used[t] || *targets[t].second != *sources[i].second) continue;
      used[t] = true;
      current.emplace_back(sources[i].first, targets[t].first);
      self(self, i + 1);
      current.pop_back();
      used[t] = false;
    }
  };
  recurse(recurse, 0);

  std::stable_sort(out.begin(), out.end(), [](const PartialInjection& a, const PartialInjection& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.mapping < b.mapping;
  });
  return out;
}

// Renumber every node, phantom and edge of g through id_map.
inline LabelledGraph disjoint_embed(const LabelledGraph& g, const std::map<NodeId, NodeId>& id_map) {
  std::set<NodeId> images;
  for (NodeId id : g.ids()) {
    auto it = id_map.find(id);
    if (it == id_map.end()) throw MalformedGraph("remap is not defined on node " + std::to_string(id));
    if (!images.insert(it->second).second)
      throw MalformedGraph("remap is not injective: two nodes map to " + std::to_string(it->second));
  }
  LabelledGraph out;
  for (const auto& [id, label] : g.nodes) out.nodes.emplace(id_map.at(id), label);
  for (NodeId p : g.phantoms) out.phantoms.insert(id_map.at(p));
  for (const auto& [from, to] : g.edges) out.edges.emplace(id_map.at(from), id_map.at(to));
  return out;
}

}  // namespace ggalg
