//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ggalg/fock_oracle.hpp"
#include "ggalg/grammar_io.hpp"
#include "ggalg/random_rules.hpp"
#include "ggalg/rule_algebra.hpp"

namespace {

using namespace ggalg;

const GrammarDocument& mt() {
  static const GrammarDocument doc = builtin_mt_grammar();
  return doc;
}
const Rule& rule(const std::string& name) { return *mt().find(name); }

// Every bijection of ids, checking labels on both sides, edges on both
// sides, forbidden edges and phantoms.
bool brute_force_rule_iso(const Rule& a, const Rule& b) {
  const auto ia = a.all_ids();
  auto ib = b.all_ids();
  if (ia.size() != ib.size()) return false;
  auto label = [](const LabelledGraph& g, NodeId id) {
    auto it = g.nodes.find(id);
    return it == g.nodes.end() ? std::string("\x01") : it->second.name;
  };
  auto mapped = [](const std::set<Edge>& es, const std::map<NodeId, NodeId>& f) {
    std::set<Edge> out;
    for (const auto& [x, y] : es) out.emplace(f.at(x), f.at(y));
    return out;
  };
  std::sort(ib.begin(), ib.end());
  do {
    std::map<NodeId, NodeId> f;
    for (std::size_t k = 0; k < ia.size(); ++k) f[ia[k]] = ib[k];
    bool ok = true;
    for (NodeId id : ia) {
      ok = ok && label(a.lhs, id) == label(b.lhs, f[id]) && label(a.rhs, id) == label(b.rhs, f[id]) &&
           a.rhs.phantoms.count(id) == b.rhs.phantoms.count(f[id]);
    }
    ok = ok && mapped(a.lhs.edges, f) == b.lhs.edges && mapped(a.rhs.edges, f) == b.rhs.edges &&
         mapped(a.forbidden, f) == b.forbidden;
    if (ok) return true;
  } while (std::next_permutation(ib.begin(), ib.end()));
  return false;
}

Rule renumbered(const Rule& r, std::mt19937& gen) {
  auto ids = r.all_ids();
  std::vector<NodeId> fresh(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) fresh[k] = static_cast<NodeId>(50 + 3 * k);
  std::shuffle(fresh.begin(), fresh.end(), gen);
  std::map<NodeId, NodeId> m;
  for (std::size_t k = 0; k < ids.size(); ++k) m[ids[k]] = fresh[k];
  Rule out = r;
  out.lhs = disjoint_embed(r.lhs, m);
  out.rhs = disjoint_embed(r.rhs, m);
  out.forbidden.clear();
  for (const auto& [x, y] : r.forbidden) out.forbidden.emplace(m.at(x), m.at(y));
  return out;
}

std::size_t overlap_count(const Rule& r2, const Rule& r1) { return overlap_classes(r1, r2).size(); }

}  // namespace

TEST(Rule, ConservedDestroyedCreated) {
  const Rule& sever = rule("sever");
  EXPECT_TRUE(sever.conserved(2));
  EXPECT_TRUE(sever.created(4));
  const Rule& retract = rule("retract");
  EXPECT_TRUE(retract.destroyed(1));
}

TEST(Rule, ValidateRejectsBadForbiddenEdges) {
  Rule r = rule("grow");
  r.forbidden.insert({1, 2});  // 2 is not an lhs node
  EXPECT_THROW(validate_rule(r), MalformedRule);
  Rule s = rule("retract");
  s.forbidden.insert({1, 2});  // also an lhs edge
  EXPECT_THROW(validate_rule(s), MalformedRule);
}

TEST(Rule, LhsPhantomIsInvalid) {
  Rule r = rule("grow");
  r.lhs.add_phantom(9);
  EXPECT_THROW(validate_rule(r), MalformedRule);
}

TEST(RuleIso, RenumberingPreservesKey) {
  std::mt19937 gen(5);
  for (const auto& r : random_rules(3, 150)) {
    const Rule s = renumbered(r, gen);
    EXPECT_TRUE(rules_isomorphic(r, s));
    EXPECT_EQ(rule_key(r), rule_key(s));
    EXPECT_TRUE(rules_isomorphic(canonical_rule(r), r));
  }
}

TEST(RuleIso, AgreesWithBruteForce) {
  RandomRuleOptions opt;
  opt.max_nodes = 2;
  opt.max_edges = 2;
  const auto rs = random_rules(9, 80, opt);
  int positives = 0;
  for (const auto& a : rs)
    for (const auto& b : rs) {
      const bool expect = brute_force_rule_iso(a, b);
      positives += expect;
      EXPECT_EQ(rules_isomorphic(a, b), expect) << a.name << " vs " << b.name;
    }
  EXPECT_GT(positives, static_cast<int>(rs.size()));
}

TEST(RuleIso, RateIsPartOfRuleKeyOnly) {
  Rule a = rule("grow");
  Rule b = a;
  b.rate = RateMonomial::symbol("other");
  EXPECT_TRUE(rules_isomorphic(a, b));
  EXPECT_NE(rule_key(a), rule_key(b));
}

TEST(Overlaps, MicrotubuleCounts) {
  EXPECT_EQ(overlap_count(rule("retract"), rule("grow")), 2u);
  EXPECT_EQ(overlap_count(rule("grow"), rule("retract")), 1u);
  EXPECT_EQ(overlap_count(rule("sever"), rule("grow")), 4u);
  EXPECT_EQ(overlap_count(rule("grow"), rule("sever")), 2u);
  EXPECT_EQ(overlap_count(rule("sever"), rule("bundle")) - 1, 33u);
  EXPECT_EQ(overlap_count(rule("bundle"), rule("sever")) - 1, 25u);
  // grow's new tip can feed a second grow, and bundle's grow_end too.
  EXPECT_EQ(overlap_count(rule("grow"), rule("grow")), 2u);
  EXPECT_EQ(overlap_count(rule("bundle"), rule("grow")), 8u);
}

TEST(Overlaps, LinksAreForced) {
  for (const auto& o : overlap_classes(rule("retract"), rule("retract")))
    for (const auto& [a, b] : o.links) {
      auto x = o.h.image(a), y = o.h.image(b);
      ASSERT_TRUE(x && y);
      EXPECT_TRUE(rule("retract").lhs.edges.count({*x, *y}));
    }
}

TEST(Compose, RejectsForeignOverlap) {
  Overlap o;
  o.h.mapping = {{2, 1}};
  o.links = {};
  EXPECT_THROW(compose(rule("grow"), rule("retract"), o, Semantics::keep), ContractViolation);
}

TEST(Compose, RejectsPhantomInput) {
  Rule r = rule("grow");
  r.rhs.add_phantom(7);
  EXPECT_THROW(compose(r, rule("grow"), Overlap{}, Semantics::keep), ContractViolation);
}

TEST(Compose, EmptyOverlapIsDisjointUnion) {
  const auto c = compose(rule("grow"), rule("retract"), Overlap{}, Semantics::keep);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->lhs.nodes.size(), 3u);
  EXPECT_EQ(c->rhs.nodes.size(), 3u);
  EXPECT_EQ(c->rate, rule("grow").rate * rule("retract").rate);
}

TEST(Product, RetractAfterGrowHasTwoTerms) {
  const auto s = product_hat(rule("retract"), rule("grow"), Semantics::keep);
  EXPECT_EQ(s.size(), 2u);
  for (const auto& t : s.terms) EXPECT_EQ(t.weight, 1);
}

TEST(Product, EmptyRuleEchoesTheOther) {
  for (const auto& r : mt().rules) {
    for (const auto& s : {product_hat(empty_rule(), r, Semantics::keep), product_hat(r, empty_rule(), Semantics::keep)}) {
      ASSERT_EQ(s.size(), 1u);
      EXPECT_EQ(s.terms[0].weight, 1);
      EXPECT_TRUE(rules_isomorphic(s.terms[0].rule, r));
      EXPECT_EQ(s.terms[0].rule.rate, r.rate);
    }
  }
}

TEST(Commutator, SelfCommutatorVanishes) {
  for (Semantics mode : {Semantics::keep, Semantics::clean})
    for (OperatorKind kind : {OperatorKind::hat, OperatorKind::full}) {
      for (const auto& r : mt().rules) EXPECT_TRUE(commutator(r, r, mode, kind).empty()) << r.name;
      for (const auto& r : random_rules(21, 40)) EXPECT_TRUE(commutator(r, r, mode, kind).empty()) << r.name;
    }
}

TEST(Commutator, EmptyOverlapCancels) {
  const auto rs = random_rules(22, 60);
  for (Semantics mode : {Semantics::keep, Semantics::clean})
    for (OperatorKind kind : {OperatorKind::hat, OperatorKind::full})
      for (const auto& [a, b] : cyclic_pairs(rs))
        EXPECT_EQ(commutator(a, b, mode, kind, true), commutator(a, b, mode, kind, false)) << a.name << "," << b.name;
}

TEST(Commutator, AntiSymmetric) {
  for (const auto& a : mt().rules)
    for (const auto& b : mt().rules) {
      RuleSum both = commutator(a, b, Semantics::keep, OperatorKind::hat);
      both.add(commutator(b, a, Semantics::keep, OperatorKind::hat));
      EXPECT_TRUE(collect(both).empty());
    }
}

TEST(Weights, HatPositiveFullInteger) {
  const auto rs = random_rules(23, 60);
  for (Semantics mode : {Semantics::keep, Semantics::clean})
    for (const auto& [a, b] : cyclic_pairs(rs)) {
      for (const auto& t : product_hat(a, b, mode).terms) EXPECT_GT(t.weight, 0);
      for (const auto& t : full_product(a, b, mode).terms) EXPECT_NE(t.weight, 0);
    }
}

TEST(NumberRule, IsIdentityShapedWithGuards) {
  const Rule n = number_rule(rule("bundle"));
  EXPECT_EQ(n.lhs, n.rhs);
  EXPECT_EQ(n.lhs, rule("bundle").lhs);
  // bundle creates 4->2 between conserved nodes, so that edge must be absent.
  EXPECT_TRUE(n.forbidden.count({4, 2}));
}

TEST(Collect, MergesIsomorphicTermsAndDropsZeros) {
  std::mt19937 gen(6);
  const Rule& g = rule("grow");
  RuleSum s;
  s.add(2, g).add(3, renumbered(g, gen)).add(-5, renumbered(g, gen)).add(1, rule("retract"));
  const auto c = collect(s);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(rules_isomorphic(c.terms[0].rule, rule("retract")));
}

// Products checked against sequential firing on a small host family.
TEST(OracleEquivalence, RandomPairsBothModesBothKinds) {
  const auto rs = random_rules(24, 30);
  for (Semantics mode : {Semantics::keep, Semantics::clean}) {
    const auto fam = enumerate_host_states(10, 3, {"A", "B"}, 3, mode);
    for (const auto& [a, b] : cyclic_pairs(rs))
      for (OperatorKind kind : {OperatorKind::hat, OperatorKind::full}) {
        const auto rep = check_equivalence(a, b, mode, kind, fam);
        EXPECT_TRUE(rep.pass) << a.name << " after " << b.name << ": " << rep.message;
        const auto crep = check_commutator(commutator(a, b, mode, kind), a, b, mode, kind, fam);
        EXPECT_TRUE(crep.pass) << crep.message;
      }
  }
}
