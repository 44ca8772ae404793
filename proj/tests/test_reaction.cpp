//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <vector>

#include <gtest/gtest.h>

#include "ggalg/random_rules.hpp"
#include "ggalg/reaction.hpp"

namespace {

using namespace ggalg;

Reaction rx(std::vector<int> m, std::vector<int> n, const std::string& k = "k") {
  return Reaction{k, std::move(m), std::move(n), RateMonomial::symbol(k)};
}

Rational coeff(const ReactionSum& s, std::vector<int> m, std::vector<int> n) {
  for (const auto& [key, c] : s.terms())
    if (key.m == m && key.n == n) return c;
  return Rational(0);
}

// Dense one-species matrices built from the ladder operators directly.
using Dense = std::vector<std::vector<long long>>;

Dense identity(int nmax) {
  Dense d(nmax + 1, std::vector<long long>(nmax + 1, 0));
  for (int i = 0; i <= nmax; ++i) d[i][i] = 1;
  return d;
}
Dense mul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}
Dense lower(int nmax) {  // creation
  Dense d(nmax + 1, std::vector<long long>(nmax + 1, 0));
  for (int i = 0; i < nmax; ++i) d[i + 1][i] = 1;
  return d;
}
Dense upper(int nmax) {  // annihilation
  Dense d(nmax + 1, std::vector<long long>(nmax + 1, 0));
  for (int i = 1; i <= nmax; ++i) d[i - 1][i] = i;
  return d;
}
Dense ladder(int m, int n, int nmax) {
  Dense d = identity(nmax);
  for (int k = 0; k < m; ++k) d = mul(upper(nmax), d);
  for (int k = 0; k < n; ++k) d = mul(lower(nmax), d);
  return d;
}

}  // namespace

TEST(ReactionProduct, CreationTwice) {
  const auto s = reaction_product(rx({0}, {1}, "a"), rx({0}, {1}, "b"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(coeff(s, {0}, {2}), Rational(1));
}

TEST(ReactionProduct, AnnihilationAfterCreation) {
  const auto s = reaction_product(rx({1}, {0}), rx({0}, {1}));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(coeff(s, {1}, {1}), Rational(1));
  EXPECT_EQ(coeff(s, {0}, {0}), Rational(1));
}

TEST(ReactionProduct, WorkedExample) {
  const auto s = reaction_product(rx({2}, {1}), rx({1}, {2}));
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(coeff(s, {3}, {3}), Rational(1));
  EXPECT_EQ(coeff(s, {2}, {2}), Rational(4));
  EXPECT_EQ(coeff(s, {1}, {1}), Rational(2));
}

TEST(ReactionProduct, RateMonomialsMultiply) {
  const auto s = reaction_product(rx({1}, {0}, "k2"), rx({0}, {1}, "k1"));
  for (const auto& [key, c] : s.terms()) EXPECT_EQ(key.symbols, (std::vector<std::string>{"k1", "k2"}));
}

TEST(ReactionProduct, SpeciesMismatchIsAnError) {
  EXPECT_THROW(reaction_product(rx({1}, {0}), rx({1, 0}, {0, 1})), ContractViolation);
  EXPECT_THROW(reaction_commutator(rx({1}, {0}), rx({1, 0}, {0, 1})), ContractViolation);
}

TEST(ReactionCommutator, Heisenberg) {
  const auto s = reaction_commutator(rx({1}, {0}), rx({0}, {1}));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(coeff(s, {0}, {0}), Rational(1));
}

TEST(ReactionCommutator, SelfIsZero) {
  for (const auto& r : all_reactions(2, 2)) EXPECT_TRUE(reaction_commutator(r, r).empty());
}

TEST(ReactionCommutator, WorkedExample) {
  const auto s = reaction_commutator(rx({2}, {1}), rx({1}, {2}));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(coeff(s, {2}, {2}), Rational(3));
  EXPECT_EQ(coeff(s, {1}, {1}), Rational(2));
}

TEST(ReactionCommutator, EqualsDifferenceOfProducts) {
  for (const auto& a : all_reactions(2, 2))
    for (const auto& b : all_reactions(2, 2))
      EXPECT_EQ(reaction_commutator(a, b), reaction_product(a, b) - reaction_product(b, a));
}

TEST(ReactionProduct, CoefficientsArePositiveIntegers) {
  const auto rs = all_reactions(2, 2);
  for (const auto& a : rs)
    for (const auto& b : rs) {
      for (const auto& [key, c] : reaction_product(a, b).terms()) {
        EXPECT_GT(c, Rational(0));
        EXPECT_EQ(c.denominator(), 1);
      }
    }
}

TEST(FockMatrix, CreationAndAnnihilation) {
  const auto up = fock_matrix(rx({0}, {1}), {3});
  const auto down = fock_matrix(rx({1}, {0}), {3});
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j) {
      EXPECT_EQ(up.at(i, j), Rational(i == j + 1 ? 1 : 0));
      EXPECT_EQ(down.at(i, j), Rational(j == i + 1 ? j : 0));
    }
}

TEST(FockMatrix, MatchesDenseLadderProducts) {
  const int nmax = 8;
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n) {
      const auto f = fock_matrix(Reaction{"r", {m}, {n}, RateMonomial({}, Rational(1))}, {nmax});
      const Dense d = ladder(m, n, nmax);
      for (int i = 0; i <= nmax; ++i)
        for (int j = 0; j <= nmax; ++j) EXPECT_EQ(f.at(i, j), Rational(d[i][j])) << m << "->" << n;
    }
}

TEST(FockMatrix, ProductIdentityOneSpecies) {
  for (const auto& a : all_reactions(1, 3))
    for (const auto& b : all_reactions(1, 3)) {
      const auto c = check_reaction_pair(a, b, {12});
      EXPECT_TRUE(c.product_ok);
      EXPECT_TRUE(c.commutator_ok);
    }
}

TEST(FockMatrix, TwoSpeciesSweep) {
  const auto sw = sweep_reactions(2, 2, 8);
  EXPECT_TRUE(sw.pass()) << sw.first_failure;
  EXPECT_EQ(sw.pairs, 81u + 6561u);
}

TEST(FockMatrix, TruncationBreaksTheTopRows) {
  // Without headroom the identity fails: a adag != adag a + 1 at Nmax.
  const auto a = rx({1}, {0}), c = rx({0}, {1});
  const auto lhs = fock_matrix(reaction_product(a, c), {3});
  const auto rhs = fock_matrix(a, {3}) * fock_matrix(c, {3});
  EXPECT_FALSE(lhs == rhs);
  EXPECT_TRUE(columns_agree(lhs, rhs, creation_headroom(a, c)));
}

TEST(EdgeFree, WorkedCrossCheck) {
  Rule r1, r2;
  r1.name = "split";
  r1.rate = RateMonomial::symbol("k1");
  r1.lhs.add_node(1, "A");
  r1.rhs.add_node(2, "A").add_node(3, "A");
  r2.name = "merge";
  r2.rate = RateMonomial::symbol("k2");
  r2.lhs.add_node(1, "A").add_node(2, "A");
  r2.rhs.add_node(3, "A");
  const auto rep = edge_free_crosscheck(r1, r2);
  EXPECT_TRUE(rep.pass) << rep.message;
  EXPECT_EQ(coeff(rep.from_rules, {3}, {3}), Rational(1));
  EXPECT_EQ(coeff(rep.from_rules, {2}, {2}), Rational(4));
  EXPECT_EQ(coeff(rep.from_rules, {1}, {1}), Rational(2));
}

TEST(EdgeFree, DistinctLabelsGiveOneTerm) {
  Rule r1, r2;
  r1.lhs.add_node(1, "A");
  r1.rhs.add_node(2, "B");
  r2.lhs.add_node(1, "C");
  r2.rhs.add_node(2, "D");
  const auto rep = edge_free_crosscheck(r1, r2);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.from_rules.size(), 1u);
}

TEST(EdgeFree, CreationThenAnnihilation) {
  Rule r1, r2;
  r1.rhs.add_node(1, "A");
  r2.lhs.add_node(1, "A");
  const auto rep = edge_free_crosscheck(r1, r2);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.from_rules.size(), 2u);
}

TEST(EdgeFree, IneligibleRulesAreRejected) {
  Rule conserved;
  conserved.lhs.add_node(1, "A");
  conserved.rhs.add_node(1, "B");
  Rule edged;
  edged.lhs.add_node(1, "A").add_node(2, "A").add_edge(1, 2);
  Rule fine;
  fine.lhs.add_node(1, "A");
  EXPECT_THROW(edge_free_crosscheck(conserved, fine), NotApplicable);
  EXPECT_THROW(edge_free_crosscheck(fine, edged), NotApplicable);
}

TEST(EdgeFree, RandomCorpus) {
  RandomRuleOptions opt;
  opt.reactions_only = true;
  opt.labels = {"A", "B", "C"};
  const auto rs = random_rules(31, 80, opt);
  for (std::size_t k = 0; k + 1 < rs.size(); k += 2) {
    const auto rep = edge_free_crosscheck(rs[k], rs[k + 1]);
    EXPECT_TRUE(rep.pass) << rs[k].name;
  }
}
