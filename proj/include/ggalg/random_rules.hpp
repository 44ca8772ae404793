//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ggalg/rule.hpp"

namespace ggalg {

struct RandomRuleOptions {
  int max_nodes = 3;  // per side
  int max_edges = 3;  // per side
  std::vector<std::string> labels{"A", "B"};
  // Edge-free rules with no conserved node, i.e. pure reactions.
  bool reactions_only = false;
};

namespace detail {

// Draws by modulo so a seed gives the same corpus with every standard library.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}
  int upto(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n + 1)); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace detail

inline Rule random_rule(detail::Draw& draw, const RandomRuleOptions& opt, const std::string& name) {
  Rule r;
  r.name = name;
  r.rate = RateMonomial::symbol("k_" + name);
  const int a = draw.upto(opt.max_nodes);
  const int b = draw.upto(opt.max_nodes);
  const int c = opt.reactions_only ? 0 : draw.upto(std::min(a, b));
  const int nlabels = static_cast<int>(opt.labels.size());
  auto label = [&] { return opt.labels[static_cast<std::size_t>(draw.upto(nlabels - 1))]; };

  std::vector<NodeId> lhs_ids, rhs_ids;
  for (int i = 0; i < a; ++i) lhs_ids.push_back(static_cast<NodeId>(i + 1));
  for (int i = 0; i < c; ++i) rhs_ids.push_back(static_cast<NodeId>(i + 1));
  for (int i = 0; i < b - c; ++i) rhs_ids.push_back(static_cast<NodeId>(a + i + 1));
  for (NodeId id : lhs_ids) r.lhs.add_node(id, label());
  for (NodeId id : rhs_ids) r.rhs.add_node(id, label());

  if (!opt.reactions_only) {
    auto edges = [&](const std::vector<NodeId>& ids, std::set<Edge>& out) {
      if (ids.empty()) return;
      const int n = static_cast<int>(ids.size());
      const int m = draw.upto(std::min(opt.max_edges, n * n));
      while (static_cast<int>(out.size()) < m)
        out.emplace(ids[static_cast<std::size_t>(draw.upto(n - 1))], ids[static_cast<std::size_t>(draw.upto(n - 1))]);
    };
    edges(lhs_ids, r.lhs.edges);
    edges(rhs_ids, r.rhs.edges);
  }
  return r;
}

// A reproducible corpus r0, r1, ... named "r<k>".
inline std::vector<Rule> random_rules(std::uint64_t seed, std::size_t count, const RandomRuleOptions& opt = {}) {
  detail::Draw draw(seed);
  std::vector<Rule> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_rule(draw, opt, "r" + std::to_string(k)));
  return out;
}

// (r[k], r[k+1 mod n]) for every k: n ordered pairs.
inline std::vector<std::pair<Rule, Rule>> cyclic_pairs(const std::vector<Rule>& rules) {
  std::vector<std::pair<Rule, Rule>> out;
  for (std::size_t k = 0; k < rules.size(); ++k) out.emplace_back(rules[k], rules[(k + 1) % rules.size()]);
  return out;
}

}  // namespace ggalg
