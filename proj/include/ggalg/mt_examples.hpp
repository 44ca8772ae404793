//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ggalg/grammar_io.hpp"
#include "ggalg/rule.hpp"
#include "ggalg/rule_algebra.hpp"

namespace ggalg {

struct ExampleCheck {
  std::string name;
  bool pass = false;
  // Informational rows are printed but never fail the run.
  bool informational = false;
  std::string detail;
};

// Number of label-preserving partial injections, by counting per label:
// prod over labels of sum_k C(a,k) (b)_k.
inline long long partial_injection_count(const LabelledGraph& src, const LabelledGraph& dst) {
  std::map<std::string, std::pair<long long, long long>> per_label;
  for (const auto& [id, l] : src.nodes) ++per_label[l.name].first;
  for (const auto& [id, l] : dst.nodes) ++per_label[l.name].second;
  long long total = 1;
  for (const auto& [label, ab] : per_label) {
    const auto [a, b] = ab;
    long long sum = 0, choose = 1;
    for (long long k = 0; k <= a; ++k) {
      sum += choose * detail::falling(b, k);
      choose = choose * (a - k) / (k + 1);
    }
    total *= sum;
  }
  return total;
}

namespace detail {

inline Rule displayed_rule(std::vector<std::pair<NodeId, std::string>> lhs, std::vector<Edge> lhs_edges,
                           std::vector<std::pair<NodeId, std::string>> rhs, std::vector<Edge> rhs_edges) {
  Rule r;
  for (auto& [id, l] : lhs) r.lhs.add_node(id, l);
  for (auto& [id, l] : rhs) r.rhs.add_node(id, l);
  r.lhs.edges.insert(lhs_edges.begin(), lhs_edges.end());
  r.rhs.edges.insert(rhs_edges.begin(), rhs_edges.end());
  return r;
}

inline long long weight_of(const RuleSum& sum, const Rule& shape) {
  long long w = 0;
  for (const auto& t : sum.terms)
    if (rules_isomorphic(t.rule, shape)) w += t.weight;
  return w;
}

}  // namespace detail

// The retract-after-grow compound: a retracting end eats the internal node
// that grow has just produced, so the chain shifts by one.
inline Rule mt_retract_grow_compound() {
  return detail::displayed_rule({{1, "retract_end"}, {2, "grow_end"}}, {{1, 2}},
                                {{2, "retract_end"}, {3, "grow_end"}}, {{2, 3}});
}

// sever cuts the chain right behind a freshly grown tip.
inline Rule mt_sever_grow_compound() {
  return detail::displayed_rule({{1, "internal"}, {2, "internal"}, {10, "grow_end"}}, {{1, 2}, {2, 10}},
                                {{1, "internal"}, {2, "grow_end"}, {4, "retract_end"}, {10, "internal"},
                                 {11, "grow_end"}},
                                {{1, 2}, {4, 10}, {10, 11}});
}

// grow extends the new tip that sever has just produced.
inline Rule mt_grow_sever_compound() {
  return detail::displayed_rule({{1, "internal"}, {2, "internal"}, {3, "internal"}}, {{1, 2}, {2, 3}},
                                {{1, "internal"}, {2, "internal"}, {3, "internal"}, {4, "retract_end"},
                                 {10, "grow_end"}},
                                {{1, 2}, {2, 10}, {4, 3}});
}

// Reproduces the worked MT calculations. W1..W4 are grow, retract, bundle
// and sever; "Wb Wa" fires Wa first.
inline std::vector<ExampleCheck> run_mt_examples() {
  const GrammarDocument mt = builtin_mt_grammar();
  const Rule& w1 = *mt.find("grow");
  const Rule& w2 = *mt.find("retract");
  const Rule& w3 = *mt.find("bundle");
  const Rule& w4 = *mt.find("sever");
  std::vector<ExampleCheck> out;

  auto count = [&](const std::string& name, const Rule& r2, const Rule& r1, long long expected, bool nonempty) {
    long long n = static_cast<long long>(overlap_classes(r1, r2).size()) - (nonempty ? 1 : 0);
    out.push_back({name + (nonempty ? " non-empty overlaps" : " overlaps"), n == expected, false,
                   "computed " + std::to_string(n) + ", expected " + std::to_string(expected)});
  };
  count("W2 W1", w2, w1, 2, false);
  count("W1 W1", w1, w1, 1, false);
  {
    // The reverse order inside [W2,W1]; grow cannot use retract's output.
    const long long n = static_cast<long long>(overlap_classes(w2, w1).size());
    out.push_back({"W1 W2 overlaps", n == 1, true, "computed " + std::to_string(n) + ", empty overlap only"});
  }
  count("W3 W1", w3, w1, 7, false);
  count("W4 W1", w4, w1, 4, false);
  count("W1 W4", w1, w4, 2, false);
  count("W4 W3", w4, w3, 33, true);
  {
    const long long n = static_cast<long long>(overlap_classes(w4, w3).size()) - 1;
    const long long derived = partial_injection_count(w4.rhs, w3.lhs) - 1;
    out.push_back({"W3 W4 non-empty overlaps", n == derived, true,
                   "computed " + std::to_string(n) + ", injection count " + std::to_string(derived) +
                       "; the worked text quotes 4x6=24, a known discrepancy"});
  }

  for (Semantics mode : {Semantics::keep, Semantics::clean}) {
    const std::string m = std::string(" [") + to_string(mode) + "]";
    const RuleSum c21 = commutator(w2, w1, mode, OperatorKind::hat);
    const bool one = c21.size() == 1 && c21.terms[0].weight == 1 &&
                     rules_isomorphic(c21.terms[0].rule, mt_retract_grow_compound());
    out.push_back({"[W2,W1] is one +1 term" + m, one, false,
                   std::to_string(c21.size()) + " term(s)" +
                       (c21.empty() ? std::string() : ", first: " + term_text(c21.terms[0]))});

    const RuleSum c41 = commutator(w4, w1, mode, OperatorKind::hat);
    const long long plus = detail::weight_of(c41, mt_sever_grow_compound());
    const long long minus = detail::weight_of(c41, mt_grow_sever_compound());
    out.push_back({"[W4,W1] displayed terms" + m, plus == 1 && minus == -1, false,
                   "weights " + std::to_string(plus) + " and " + std::to_string(minus) + " among " +
                       std::to_string(c41.size()) + " terms"});
  }
  return out;
}

inline bool examples_pass(const std::vector<ExampleCheck>& checks) {
  for (const auto& c : checks)
    if (!c.informational && !c.pass) return false;
  return true;
}

}  // namespace ggalg
