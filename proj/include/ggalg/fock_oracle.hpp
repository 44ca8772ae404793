//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ggalg/canonical.hpp"
#include "ggalg/error.hpp"
#include "ggalg/rate.hpp"
#include "ggalg/rule.hpp"
#include "ggalg/rule_algebra.hpp"

namespace ggalg {

inline constexpr int kMaxUniverse = 32;
inline constexpr int kMaxLabels = 127;

// Label names interned to small integers. Ids are stable once assigned.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    for (auto& n : names) intern(n);
  }

  int find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
  }
  int intern(const std::string& name) {
    if (int id = find(name); id >= 0) return id;
    if (static_cast<int>(names_.size()) == kMaxLabels)
      throw CapacityError("alphabet exceeds " + std::to_string(kMaxLabels) + " labels");
    names_.push_back(name);
    return static_cast<int>(names_.size()) - 1;
  }
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

// A concrete world over indices 0..universe-1. labels[i] is an alphabet id or
// -1 for an unallocated index; out[i] has bit j set iff edge i->j exists.
struct HostState {
  using Row = std::uint32_t;

  int universe = 0;
  std::array<std::int8_t, kMaxUniverse> labels;
  std::array<Row, kMaxUniverse> out;

  HostState() : HostState(0) {}
  explicit HostState(int u) : universe(u) {
    if (u < 0 || u > kMaxUniverse)
      throw ContractViolation("universe must lie in 0.." + std::to_string(kMaxUniverse));
    labels.fill(-1);
    out.fill(0);
  }

  bool operator==(const HostState&) const = default;

  bool has_label(int i) const { return labels[i] >= 0; }
  bool has_edge(int i, int j) const { return (out[i] >> j) & 1U; }
  void set_edge(int i, int j) { out[i] |= Row{1} << j; }
  void clear_edge(int i, int j) { out[i] &= ~(Row{1} << j); }

  Row in_mask() const {
    Row m = 0;
    for (int i = 0; i < universe; ++i) m |= out[i];
    return m;
  }
  bool has_incident(int i) const { return out[i] != 0 || ((in_mask() >> i) & 1U); }

  // Indices that are labelled or touch an edge.
  Row support() const {
    Row m = in_mask();
    for (int i = 0; i < universe; ++i)
      if (labels[i] >= 0 || out[i] != 0) m |= Row{1} << i;
    return m;
  }
  bool has_hanging_edge() const {
    const Row in = in_mask();
    for (int i = 0; i < universe; ++i)
      if (labels[i] < 0 && (out[i] != 0 || ((in >> i) & 1U))) return true;
    return false;
  }
  std::size_t label_count() const {
    return static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.begin() + universe, [](int l) { return l >= 0; }));
  }
  std::size_t edge_count() const {
    std::size_t c = 0;
    for (int i = 0; i < universe; ++i) c += static_cast<std::size_t>(__builtin_popcount(out[i]));
    return c;
  }
};

namespace detail {

// Canonical labelling specialised to host states: at most 32 support
// vertices, one edge colour, adjacency held in bit rows. Same scheme as the
// generic canonicalizer: refinement, individualization of the first
// non-singleton cell, twin pruning, smallest leaf wins.
class HostCanon {
 public:
  explicit HostCanon(const HostState& s) {
    const HostState::Row sup = s.support();
    std::array<int, kMaxUniverse> idx{};
    for (int i = 0; i < s.universe; ++i)
      if ((sup >> i) & 1U) idx[n_++] = i;
    for (int a = 0; a < n_; ++a) {
      colour_[a] = static_cast<std::uint8_t>(s.labels[idx[a]] + 1);
      for (int b = 0; b < n_; ++b)
        if (s.has_edge(idx[a], idx[b])) {
          out_[a] |= Bits{1} << b;
          in_[b] |= Bits{1} << a;
        }
    }
  }

  std::string run() {
    Cells cell{};
    for (int v = 0; v < n_; ++v)
      keys_[v] = {colour_[v], (static_cast<std::uint64_t>(__builtin_popcount(in_[v])) << 32) |
                                  static_cast<std::uint64_t>(__builtin_popcount(out_[v]))};
    int cells = rank(cell);
    cells = refine(cell, cells);
    descend(cell, cells);

    std::string code;
    code.reserve(static_cast<std::size_t>(1 + n_ + n_ * ((n_ + 7) / 8)));
    code.push_back(static_cast<char>(n_));
    for (int k = 0; k < n_; ++k) code.push_back(static_cast<char>(colour_[best_order_[k]]));
    for (int k = 0; k < n_; ++k)
      for (int byte = 0; byte < (n_ + 7) / 8; ++byte) code.push_back(static_cast<char>((best_rows_[k] >> (8 * byte)) & 0xff));
    return code;
  }

 private:
  using Bits = std::uint32_t;
  using Cells = std::array<std::uint8_t, kMaxUniverse>;

  static std::uint64_t mix(std::uint64_t x) { return canon_impl::mix(x); }

  int rank(Cells& cell) {
    std::array<std::uint8_t, kMaxUniverse> ord{};
    for (int v = 0; v < n_; ++v) ord[v] = static_cast<std::uint8_t>(v);
    for (int i = 1; i < n_; ++i) {
      const std::uint8_t x = ord[i];
      int j = i - 1;
      while (j >= 0 && keys_[x] < keys_[ord[j]]) {
        ord[j + 1] = ord[j];
        --j;
      }
      ord[j + 1] = x;
    }
    int cells = 0;
    for (int i = 0; i < n_; ++i) {
      if (i > 0 && keys_[ord[i]] != keys_[ord[i - 1]]) ++cells;
      cell[ord[i]] = static_cast<std::uint8_t>(cells);
    }
    return n_ == 0 ? 0 : cells + 1;
  }

  int refine(Cells& cell, int cells) {
    while (cells < n_) {
      for (int v = 0; v < n_; ++v) {
        std::uint64_t o = 0, i = 0;
        for (Bits m = out_[v]; m; m &= m - 1) o += mix(cell[__builtin_ctz(m)] ^ 0x5bd1e995ULL);
        for (Bits m = in_[v]; m; m &= m - 1) i += mix(cell[__builtin_ctz(m)] ^ 0xc2b2ae35ULL);
        keys_[v] = {cell[v], mix(o) ^ (mix(i + 0x27d4eb2fULL) << 1)};
      }
      const int next = rank(cell);
      if (next == cells) break;
      cells = next;
    }
    return cells;
  }

  bool twins(int u, int v) const {
    if (colour_[u] != colour_[v]) return false;
    const Bits bu = Bits{1} << u, bv = Bits{1} << v, rest = ~(bu | bv);
    if ((out_[u] & rest) != (out_[v] & rest) || (in_[u] & rest) != (in_[v] & rest)) return false;
    return ((out_[u] & bu) != 0) == ((out_[v] & bv) != 0) && ((out_[u] & bv) != 0) == ((out_[v] & bu) != 0);
  }

  void descend(const Cells& cell, int cells) {
    if (cells == n_) {
      leaf(cell);
      return;
    }
    std::array<int, kMaxUniverse> size{};
    for (int v = 0; v < n_; ++v) ++size[cell[v]];
    int target = 0;
    while (size[target] < 2) ++target;

    std::array<int, kMaxUniverse> tried{};
    int ntried = 0;
    for (int v = 0; v < n_; ++v) {
      if (cell[v] != target) continue;
      bool redundant = false;
      for (int t = 0; t < ntried && !redundant; ++t) redundant = twins(tried[t], v);
      if (redundant) continue;
      tried[ntried++] = v;

      Cells next = cell;
      for (int w = 0; w < n_; ++w) keys_[w] = {next[w], w == v ? 0 : 1};
      int next_cells = rank(next);
      next_cells = refine(next, next_cells);
      descend(next, next_cells);
    }
  }

  void leaf(const Cells& cell) {
    std::array<std::uint8_t, kMaxUniverse> order{};
    for (int v = 0; v < n_; ++v) order[cell[v]] = static_cast<std::uint8_t>(v);
    std::array<Bits, kMaxUniverse> rows{};
    for (int k = 0; k < n_; ++k) {
      Bits r = 0;
      for (int l = 0; l < n_; ++l)
        if ((out_[order[k]] >> order[l]) & 1U) r |= Bits{1} << l;
      rows[k] = r;
    }
    bool better = !have_best_;
    for (int k = 0; k < n_ && !better; ++k) {
      if (rows[k] != best_rows_[k]) {
        better = rows[k] < best_rows_[k];
        break;
      }
    }
    if (better) {
      best_rows_ = rows;
      best_order_ = order;
      have_best_ = true;
    }
  }

  int n_ = 0;
  std::array<std::uint8_t, kMaxUniverse> colour_{};
  std::array<Bits, kMaxUniverse> out_{}, in_{};
  std::array<std::pair<std::uint64_t, std::uint64_t>, kMaxUniverse> keys_{};
  bool have_best_ = false;
  std::array<Bits, kMaxUniverse> best_rows_{};
  std::array<std::uint8_t, kMaxUniverse> best_order_{};
};

}  // namespace detail

// Canonical key of a host state: the isomorphism class of its support, with
// unlabelled support indices marked by colour 0.
inline std::string host_key(const HostState& s) { return detail::HostCanon(s).run(); }

namespace detail {

struct HostStateHash {
  std::size_t operator()(const HostState& s) const {
    std::uint64_t h = static_cast<std::uint64_t>(s.universe);
    for (int i = 0; i < s.universe; ++i)
      h = canon_impl::mix(h ^ static_cast<std::uint8_t>(s.labels[i]) ^ (static_cast<std::uint64_t>(s.out[i]) << 8));
    return static_cast<std::size_t>(h);
  }
};

// Memo of host_key over raw states; firing different matches often lands on
// the very same indexed state.
class KeyCache {
 public:
  const std::string& key(const HostState& s) {
    if (auto it = map_.find(s); it != map_.end()) return it->second;
    if (map_.size() >= kLimit) map_.clear();
    return map_.emplace(s, host_key(s)).first->second;
  }

 private:
  static constexpr std::size_t kLimit = std::size_t{1} << 16;
  std::unordered_map<HostState, std::string, HostStateHash> map_;
};

}  // namespace detail

// "(0:A, 1:B, 2:_; 0->1, 1->2)" over the support indices.
inline std::string describe(const HostState& s, const Alphabet& alphabet) {
  const HostState::Row sup = s.support();
  std::string nodes, edges;
  for (int i = 0; i < s.universe; ++i) {
    if (!((sup >> i) & 1U)) continue;
    if (!nodes.empty()) nodes += ", ";
    nodes += std::to_string(i) + ":" + (s.labels[i] >= 0 ? alphabet.name(s.labels[i]) : std::string("_"));
    for (int j = 0; j < s.universe; ++j)
      if (s.has_edge(i, j)) {
        if (!edges.empty()) edges += ", ";
        edges += std::to_string(i) + "->" + std::to_string(j);
      }
  }
  return "(" + nodes + (edges.empty() ? "" : "; " + edges) + ")";
}

// Formal sum of host-state isomorphism classes with exact weights.
class OutcomeMultiset {
 public:
  struct Entry {
    HostState state;
    Weight weight;
  };

  void add(const HostState& s, const Weight& w) { add(host_key(s), s, w); }
  void add(const std::string& key, const HostState& s, const Weight& w) {
    if (w.is_zero()) return;
    auto [it, fresh] = entries_.try_emplace(key, Entry{s, w});
    if (!fresh) {
      it->second.weight += w;
      if (it->second.weight.is_zero()) entries_.erase(it);
    }
  }
  void merge(const OutcomeMultiset& other, const Weight& scale) {
    for (const auto& [key, e] : other.entries_) add(key, e.state, e.weight * scale);
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const OutcomeMultiset& a, const OutcomeMultiset& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (auto ia = a.entries_.begin(), ib = b.entries_.begin(); ia != a.entries_.end(); ++ia, ++ib)
      if (ia->first != ib->first || !(ia->second.weight == ib->second.weight)) return false;
    return true;
  }

 private:
  std::map<std::string, Entry> entries_;
};

inline std::string describe(const OutcomeMultiset& m, const Alphabet& alphabet) {
  if (m.empty()) return "0";
  std::string out;
  for (const auto& [key, e] : m.entries()) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(e.weight) + ")" + describe(e.state, alphabet);
  }
  return out;
}

// An injective, label- and edge-preserving map from lhs ids to host indices.
using Match = std::map<NodeId, int>;

// A rule translated to alphabet ids and positional slots for fast firing.
// Slots: [0, L) lhs nodes, [L, L+C) created nodes, then fresh phantoms.
struct CompiledRule {
  std::string name;
  RateMonomial rate;
  Weight weight;
  std::vector<NodeId> lhs_ids;
  std::vector<int> lhs_label;
  std::vector<std::pair<int, int>> lhs_edges;
  std::vector<std::pair<int, int>> forbidden;
  std::vector<std::pair<int, int>> relabel;
  std::vector<int> destroyed;
  std::vector<int> created_label;
  int fresh_phantoms = 0;
  std::vector<std::pair<int, int>> rhs_edges;
  // Search order over lhs positions and, per step, the edge and forbidden
  // checks that become decidable once that position is bound.
  std::vector<int> order;
  std::vector<std::vector<std::pair<int, int>>> need, avoid;
  // (label, multiplicity) over the lhs; a cheap necessary condition for a match.
  std::vector<std::pair<int, int>> label_demand;
};

inline CompiledRule compile(const Rule& r, Alphabet& alphabet, Semantics mode) {
  validate_rule(r);
  if (mode == Semantics::clean && r.has_phantoms())
    throw ContractViolation("rule '" + r.name + "' has phantom nodes, which clean semantics cannot fire");
  CompiledRule c;
  c.name = r.name;
  c.rate = r.rate;
  c.weight = Weight(r.rate);
  std::map<NodeId, int> slot;
  for (const auto& [id, label] : r.lhs.nodes) {
    slot[id] = static_cast<int>(c.lhs_ids.size());
    c.lhs_ids.push_back(id);
    c.lhs_label.push_back(alphabet.intern(label.name));
  }
  const int L = static_cast<int>(c.lhs_ids.size());
  for (const auto& [id, label] : r.rhs.nodes) {
    if (r.lhs.has_node(id)) {
      c.relabel.emplace_back(slot.at(id), alphabet.intern(label.name));
    } else {
      slot[id] = L + static_cast<int>(c.created_label.size());
      c.created_label.push_back(alphabet.intern(label.name));
    }
  }
  for (const auto& [id, label] : r.lhs.nodes)
    if (!r.rhs.has_node(id)) c.destroyed.push_back(slot.at(id));
  // A phantom that shares an lhs id stays at that node's index.
  for (NodeId p : r.rhs.phantoms)
    if (!r.lhs.has_node(p)) slot[p] = L + static_cast<int>(c.created_label.size()) + c.fresh_phantoms++;
  auto pairs = [&](const std::set<Edge>& edges) {
    std::vector<std::pair<int, int>> v;
    for (const auto& [a, b] : edges) v.emplace_back(slot.at(a), slot.at(b));
    return v;
  };
  c.lhs_edges = pairs(r.lhs.edges);
  c.forbidden = pairs(r.forbidden);
  c.rhs_edges = pairs(r.rhs.edges);

  // Bind connected positions early so edge checks prune the search.
  std::vector<bool> placed(static_cast<std::size_t>(L), false);
  while (static_cast<int>(c.order.size()) < L) {
    int best = -1, best_links = -1;
    for (int p = 0; p < L; ++p) {
      if (placed[p]) continue;
      int links = 0;
      for (const auto& [a, b] : c.lhs_edges)
        if ((a == p && placed[b]) || (b == p && placed[a])) ++links;
      if (links > best_links) best = p, best_links = links;
    }
    placed[best] = true;
    c.order.push_back(best);
  }
  std::map<int, int> demand;
  for (int l : c.lhs_label) ++demand[l];
  c.label_demand.assign(demand.begin(), demand.end());
  std::vector<int> step(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) step[c.order[k]] = k;
  c.need.assign(static_cast<std::size_t>(L), {});
  c.avoid.assign(static_cast<std::size_t>(L), {});
  for (const auto& e : c.lhs_edges) c.need[std::max(step[e.first], step[e.second])].push_back(e);
  for (const auto& e : c.forbidden) c.avoid[std::max(step[e.first], step[e.second])].push_back(e);
  return c;
}

namespace detail {

// Calls f(binding) for each match; binding[p] is the host index of lhs slot p.
template <typename F>
void for_each_match(const CompiledRule& c, const HostState& s, F&& f) {
  for (const auto& [label, count] : c.label_demand)
    if (std::count(s.labels.begin(), s.labels.begin() + s.universe, label) < count) return;
  const int L = static_cast<int>(c.lhs_ids.size());
  std::vector<int> binding(static_cast<std::size_t>(L), -1);
  HostState::Row used = 0;
  auto recurse = [&](auto&& self, int k) -> void {
    if (k == L) {
      f(static_cast<const std::vector<int>&>(binding));
      return;
    }
    const int p = c.order[k];
    for (int i = 0; i < s.universe; ++i) {
      if (s.labels[i] != c.lhs_label[p] || ((used >> i) & 1U)) continue;
      binding[p] = i;
      bool ok = true;
      for (const auto& [a, b] : c.need[k])
        if (!s.has_edge(binding[a], binding[b])) {
          ok = false;
          break;
        }
      if (ok)
        for (const auto& [a, b] : c.avoid[k])
          if (s.has_edge(binding[a], binding[b])) {
            ok = false;
            break;
          }
      if (ok) {
        used |= HostState::Row{1} << i;
        self(self, k + 1);
        used &= ~(HostState::Row{1} << i);
      }
    }
    binding[p] = -1;
  };
  recurse(recurse, 0);
}

inline std::string describe_binding(const CompiledRule& c, const std::vector<int>& binding) {
  std::string out;
  for (std::size_t p = 0; p < binding.size(); ++p) {
    if (!out.empty()) out += ", ";
    out += std::to_string(c.lhs_ids[p]) + "->" + std::to_string(binding[p]);
  }
  return "{" + out + "}";
}

// Fire one match. Returns nullopt when a created edge already exists.
inline std::optional<HostState> fire(const CompiledRule& c, const HostState& s, const std::vector<int>& binding,
                                     Semantics mode) {
  HostState t = s;
  for (const auto& [a, b] : c.lhs_edges) t.clear_edge(binding[a], binding[b]);
  for (int p : c.destroyed) t.labels[binding[p]] = -1;
  for (const auto& [p, label] : c.relabel) t.labels[binding[p]] = static_cast<std::int8_t>(label);

  std::array<int, 2 * kMaxUniverse> where{};
  std::copy(binding.begin(), binding.end(), where.begin());
  std::size_t placed = binding.size();
  const std::size_t extra = c.created_label.size() + static_cast<std::size_t>(c.fresh_phantoms);
  if (extra > 0) {
    HostState::Row taken = t.in_mask();
    for (int i : binding) taken |= HostState::Row{1} << i;
    for (int i = 0; i < t.universe; ++i)
      if (t.labels[i] >= 0 || t.out[i] != 0) taken |= HostState::Row{1} << i;
    for (std::size_t k = 0; k < extra; ++k) {
      int i = 0;
      while (i < t.universe && ((taken >> i) & 1U)) ++i;
      if (i == t.universe)
        throw CapacityError("universe of " + std::to_string(t.universe) + " indices exhausted firing rule '" +
                            c.name + "' at match " + describe_binding(c, binding));
      taken |= HostState::Row{1} << i;
      if (k < c.created_label.size()) t.labels[i] = static_cast<std::int8_t>(c.created_label[k]);
      where[placed++] = i;
    }
  }
  for (const auto& [a, b] : c.rhs_edges) {
    if (t.has_edge(where[a], where[b])) return std::nullopt;
    t.set_edge(where[a], where[b]);
  }
  if (mode == Semantics::clean) {
    for (int p : c.destroyed) {
      const int i = binding[p];
      t.out[i] = 0;
      for (auto& row : t.out) row &= ~(HostState::Row{1} << i);
    }
  }
  return t;
}

inline void apply_compiled(const CompiledRule& c, const HostState& s, Semantics mode, const Weight& scale,
                           OutcomeMultiset& out, KeyCache* cache = nullptr) {
  std::optional<Weight> w;
  for_each_match(c, s, [&](const std::vector<int>& binding) {
    if (auto t = fire(c, s, binding, mode)) {
      if (!w) w = c.weight * scale;
      if (cache)
        out.add(cache->key(*t), *t, *w);
      else
        out.add(*t, *w);
    }
  });
}

}  // namespace detail

inline std::vector<Match> find_matches(const Rule& r, const HostState& s, Alphabet& alphabet) {
  const CompiledRule c = compile(r, alphabet, Semantics::keep);
  std::vector<Match> out;
  detail::for_each_match(c, s, [&](const std::vector<int>& binding) {
    Match m;
    for (std::size_t p = 0; p < binding.size(); ++p) m[c.lhs_ids[p]] = binding[p];
    out.push_back(std::move(m));
  });
  std::sort(out.begin(), out.end());
  return out;
}

inline void check_state(const HostState& s, Semantics mode) {
  if (mode == Semantics::clean && s.has_hanging_edge())
    throw ContractViolation("clean semantics requires a state without hanging edges");
}

inline OutcomeMultiset apply_rule(const Rule& r, const HostState& s, Semantics mode, Alphabet& alphabet) {
  check_state(s, mode);
  OutcomeMultiset out;
  detail::apply_compiled(compile(r, alphabet, mode), s, mode, Weight(RateMonomial()), out);
  return out;
}

struct CompiledSum {
  std::vector<std::pair<Weight, CompiledRule>> terms;
};

inline CompiledSum compile(const RuleSum& sum, Alphabet& alphabet, Semantics mode) {
  CompiledSum c;
  for (const auto& t : sum.terms)
    c.terms.emplace_back(Weight(RateMonomial({}, Rational(t.weight))), compile(t.rule, alphabet, mode));
  return c;
}

inline OutcomeMultiset apply_compiled_sum(const CompiledSum& c, const HostState& s, Semantics mode,
                                          detail::KeyCache* cache = nullptr) {
  OutcomeMultiset out;
  for (const auto& [scale, rule] : c.terms) detail::apply_compiled(rule, s, mode, scale, out, cache);
  return out;
}

inline OutcomeMultiset apply_sum(const RuleSum& sum, const HostState& s, Semantics mode, Alphabet& alphabet) {
  check_state(s, mode);
  return apply_compiled_sum(compile(sum, alphabet, mode), s, mode);
}

inline OutcomeMultiset sequential_compiled(const CompiledRule& c2, const CompiledRule& c1, const HostState& s,
                                           Semantics mode, detail::KeyCache* cache = nullptr) {
  static const Weight one{RateMonomial()};
  OutcomeMultiset first;
  detail::apply_compiled(c1, s, mode, one, first, cache);
  OutcomeMultiset out;
  for (const auto& [key, e] : first.entries()) detail::apply_compiled(c2, e.state, mode, e.weight, out, cache);
  return out;
}

// r1 fires first, then r2 fires on every outcome.
inline OutcomeMultiset sequential(const Rule& r2, const Rule& r1, const HostState& s, Semantics mode,
                                  Alphabet& alphabet) {
  check_state(s, mode);
  const CompiledRule c1 = compile(r1, alphabet, mode);
  const CompiledRule c2 = compile(r2, alphabet, mode);
  return sequential_compiled(c2, c1, s, mode);
}

// A set of isomorphism-class representatives sharing one alphabet and universe.
struct HostFamily {
  Alphabet alphabet;
  Semantics mode = Semantics::keep;
  int universe = 0;
  std::vector<HostState> states;
};

// One state per isomorphism class with at most max_nodes labelled indices
// and at most max_edges edges. In keep mode the family also contains states
// with up to max_unlabelled unlabelled indices, each touching at least one
// (hanging) edge.
inline HostFamily enumerate_host_states(int universe, int max_nodes, const std::vector<std::string>& labels,
                                        int max_edges, Semantics mode, int max_unlabelled = 1) {
  if (max_nodes < 0 || max_edges < 0 || max_unlabelled < 0)
    throw ContractViolation("family bounds must be non-negative");
  if (mode == Semantics::clean) max_unlabelled = 0;
  if (max_nodes + max_unlabelled > universe || universe > kMaxUniverse)
    throw ContractViolation("universe of " + std::to_string(universe) + " cannot hold " +
                            std::to_string(max_nodes + max_unlabelled) + " support indices");
  HostFamily fam;
  fam.alphabet = Alphabet(labels);
  fam.mode = mode;
  fam.universe = universe;
  const int A = static_cast<int>(fam.alphabet.size());

  std::map<std::string, HostState> classes;
  std::vector<int> multiset;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> chosen;

  auto emit_edges = [&](int k, int u) {
    const int n = k + u;
    pairs.clear();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) pairs.emplace_back(a, b);
    const int P = static_cast<int>(pairs.size());
    auto recurse = [&](auto&& self, int from) -> void {
      HostState s(universe);
      for (int i = 0; i < k; ++i) s.labels[i] = multiset[i];
      for (int e : chosen) s.set_edge(pairs[e].first, pairs[e].second);
      bool ok = true;
      for (int i = k; i < n && ok; ++i) ok = s.has_incident(i);
      if (ok) {
        auto key = host_key(s);
        classes.try_emplace(std::move(key), std::move(s));
      }
      if (static_cast<int>(chosen.size()) == max_edges) return;
      for (int e = from; e < P; ++e) {
        chosen.push_back(e);
        self(self, e + 1);
        chosen.pop_back();
      }
    };
    recurse(recurse, 0);
  };

  auto multisets = [&](auto&& self, int k, int min_label) -> void {
    if (static_cast<int>(multiset.size()) == k) {
      for (int u = 0; u <= max_unlabelled; ++u) emit_edges(k, u);
      return;
    }
    for (int l = min_label; l < A; ++l) {
      multiset.push_back(l);
      self(self, k, l);
      multiset.pop_back();
    }
  };
  for (int k = 0; k <= max_nodes; ++k) multisets(multisets, k, 0);

  fam.states.reserve(classes.size());
  for (auto& [key, s] : classes) fam.states.push_back(std::move(s));
  return fam;
}

struct Report {
  bool pass = true;
  bool vacuous = false;
  std::size_t states_checked = 0;
  std::optional<HostState> counterexample;
  // At the counterexample: the sequential result and the summed compound result.
  OutcomeMultiset expected;
  OutcomeMultiset actual;
  std::string message;
};

// Compare apply_sum(sum) with sequential(r2, r1) on every family member. The
// family is in canonical order, so the first failure is also the smallest.
inline Report check_sum_equivalence(const RuleSum& sum, const Rule& r2, const Rule& r1, Semantics mode,
                                    const HostFamily& family) {
  Alphabet alphabet = family.alphabet;
  const CompiledSum cs = compile(sum, alphabet, mode);
  const CompiledRule c1 = compile(r1, alphabet, mode);
  const CompiledRule c2 = compile(r2, alphabet, mode);
  detail::KeyCache cache;
  Report rep;
  rep.vacuous = family.states.empty();
  for (const auto& s : family.states) {
    check_state(s, mode);
    ++rep.states_checked;
    OutcomeMultiset expected = sequential_compiled(c2, c1, s, mode, &cache);
    OutcomeMultiset actual = apply_compiled_sum(cs, s, mode, &cache);
    if (!(expected == actual)) {
      rep.pass = false;
      rep.counterexample = s;
      rep.expected = std::move(expected);
      rep.actual = std::move(actual);
      rep.message = "mismatch on " + describe(s, alphabet) + ": sequential " + describe(rep.expected, alphabet) +
                    " vs compound " + describe(rep.actual, alphabet);
      return rep;
    }
  }
  rep.message = rep.vacuous ? "vacuous: empty family" : "ok";
  return rep;
}

inline Report check_equivalence(const Rule& r2, const Rule& r1, Semantics mode, const HostFamily& family) {
  return check_sum_equivalence(product_hat(r2, r1, mode), r2, r1, mode, family);
}

namespace detail {

// Adds sign * (second after first) applied to s into out.
inline void apply_sequence(const CompiledSum& second, const CompiledSum& first, const HostState& s, Semantics mode,
                           const Weight& sign, OutcomeMultiset& out, KeyCache* cache) {
  OutcomeMultiset mid;
  for (const auto& [scale, rule] : first.terms) apply_compiled(rule, s, mode, scale * sign, mid, cache);
  for (const auto& [key, e] : mid.entries())
    for (const auto& [scale, rule] : second.terms) apply_compiled(rule, e.state, mode, e.weight * scale, out, cache);
}

inline RuleSum single(const Rule& r) {
  RuleSum s;
  s.add(1, r);
  return s;
}

// Compares sum with the sequential products (weight, second, first), summed.
inline Report check_against_sequences(const RuleSum& sum,
                                      const std::vector<std::tuple<long long, RuleSum, RuleSum>>& sequences,
                                      Semantics mode, const HostFamily& family) {
  Alphabet alphabet = family.alphabet;
  const CompiledSum cs = compile(sum, alphabet, mode);
  std::vector<std::tuple<Weight, CompiledSum, CompiledSum>> seqs;
  for (const auto& [w, second, first] : sequences)
    seqs.emplace_back(Weight(RateMonomial({}, Rational(w))), compile(second, alphabet, mode),
                      compile(first, alphabet, mode));
  KeyCache cache;
  Report rep;
  rep.vacuous = family.states.empty();
  for (const auto& s : family.states) {
    check_state(s, mode);
    ++rep.states_checked;
    OutcomeMultiset expected;
    for (const auto& [w, second, first] : seqs) apply_sequence(second, first, s, mode, w, expected, &cache);
    OutcomeMultiset actual = apply_compiled_sum(cs, s, mode, &cache);
    if (!(expected == actual)) {
      rep.pass = false;
      rep.counterexample = s;
      rep.expected = std::move(expected);
      rep.actual = std::move(actual);
      rep.message = "mismatch on " + describe(s, alphabet) + ": sequential " + describe(rep.expected, alphabet) +
                    " vs compound " + describe(rep.actual, alphabet);
      return rep;
    }
  }
  rep.message = rep.vacuous ? "vacuous: empty family" : "ok";
  return rep;
}

}  // namespace detail

// The full operator W_r = Ŵ_r - Ŵ_{number_rule(r)} as a two-term sum.
inline RuleSum full_operator(const Rule& r) {
  RuleSum out;
  out.add(1, r);
  out.add(-1, number_rule(r));
  return out;
}

inline RuleSum operator_sum(const Rule& r, OperatorKind kind) {
  return kind == OperatorKind::full ? full_operator(r) : detail::single(r);
}

// Checks a product sum for any operator kind against X2 applied after X1.
inline Report check_product(const RuleSum& sum, const Rule& r2, const Rule& r1, Semantics mode, OperatorKind kind,
                            const HostFamily& family) {
  return detail::check_against_sequences(sum, {{1, operator_sum(r2, kind), operator_sum(r1, kind)}}, mode, family);
}

inline Report check_equivalence(const Rule& r2, const Rule& r1, Semantics mode, OperatorKind kind,
                                const HostFamily& family) {
  if (kind == OperatorKind::hat) return check_equivalence(r2, r1, mode, family);
  return check_product(full_product(r2, r1, mode), r2, r1, mode, kind, family);
}

// Checks a commutator sum against X2 X1 - X1 X2, both applied sequentially.
inline Report check_commutator(const RuleSum& comm, const Rule& r2, const Rule& r1, Semantics mode, OperatorKind kind,
                               const HostFamily& family) {
  const RuleSum x1 = operator_sum(r1, kind), x2 = operator_sum(r2, kind);
  return detail::check_against_sequences(comm, {{1, x2, x1}, {-1, x1, x2}}, mode, family);
}

// How the diagonal D_r is produced when building W = sum of (Ŵ_r - D_r).
enum class Diagonal {
  none,         // Ŵ only
  propensity,   // D_r = diag(1 · Ŵ_r)
  number_rule,  // D_r = Ŵ of number_rule(r)
};

struct GeneratorMatrix {
  std::vector<HostState> basis;
  // columns[j] maps row index to entry[row, j].
  std::vector<std::map<std::size_t, Weight>> columns;
  // False when some outcome of column j leaves the basis or the universe.
  std::vector<bool> valid;

  Weight column_sum(std::size_t j) const {
    Weight w;
    for (const auto& [row, entry] : columns[j]) w += entry;
    return w;
  }
};

inline GeneratorMatrix build_generator(const std::vector<Rule>& rules, const HostFamily& family, Semantics mode,
                                       Diagonal diagonal = Diagonal::propensity) {
  Alphabet alphabet = family.alphabet;
  std::vector<CompiledRule> hat, diag;
  for (const auto& r : rules) {
    hat.push_back(compile(r, alphabet, mode));
    diag.push_back(compile(number_rule(r), alphabet, mode));
  }
  GeneratorMatrix m;
  m.basis = family.states;
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < m.basis.size(); ++j) index.emplace(host_key(m.basis[j]), j);
  m.columns.resize(m.basis.size());
  m.valid.assign(m.basis.size(), true);

  const Weight one{RateMonomial()};
  for (std::size_t j = 0; j < m.basis.size(); ++j) {
    const HostState& s = m.basis[j];
    check_state(s, mode);
    auto place = [&](const OutcomeMultiset& o, const Weight& sign) {
      for (const auto& [key, e] : o.entries()) {
        auto it = index.find(key);
        if (it == index.end()) {
          m.valid[j] = false;
          continue;
        }
        m.columns[j][it->second] += e.weight * sign;
      }
    };
    const Weight minus_one{RateMonomial({}, Rational(-1))};
    for (std::size_t r = 0; r < hat.size(); ++r) {
      try {
        OutcomeMultiset o;
        detail::apply_compiled(hat[r], s, mode, one, o);
        place(o, one);
        if (diagonal == Diagonal::propensity) {
          Weight total;
          for (const auto& [key, e] : o.entries()) total += e.weight;
          m.columns[j][j] -= total;
        } else if (diagonal == Diagonal::number_rule) {
          OutcomeMultiset d;
          detail::apply_compiled(diag[r], s, mode, one, d);
          place(d, minus_one);
        }
      } catch (const CapacityError&) {
        m.valid[j] = false;
      }
    }
    for (auto it = m.columns[j].begin(); it != m.columns[j].end();)
      it = it->second.is_zero() ? m.columns[j].erase(it) : std::next(it);
  }
  return m;
}

}  // namespace ggalg
