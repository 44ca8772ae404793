//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "ggalg/fock_oracle.hpp"
#include "ggalg/grammar_io.hpp"
#include "ggalg/mt_examples.hpp"
#include "ggalg/random_rules.hpp"
#include "ggalg/reaction.hpp"
#include "ggalg/rule_algebra.hpp"

namespace {

using namespace ggalg;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<std::pair<Rule, Rule>> mt_pairs() {
  const auto doc = builtin_mt_grammar();
  std::vector<std::pair<Rule, Rule>> out;
  for (const auto& a : doc.rules)
    for (const auto& b : doc.rules) out.emplace_back(a, b);
  return out;
}

std::vector<Rule> random_corpus() { return random_rules(7, 200); }

Outcome oracle_run(Semantics mode) {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t pairs = 0, checks = 0;
  auto run = [&](const std::vector<std::pair<Rule, Rule>>& ps, const std::vector<std::string>& labels) {
    const HostFamily fam = enumerate_host_states(12, 5, labels, 4, mode);
    for (const auto& [r2, r1] : ps) {
      const Report rep = check_product(product_hat(r2, r1, mode), r2, r1, mode, OperatorKind::hat, fam);
      ++pairs;
      checks += rep.states_checked;
      o.require(rep.pass, r2.name + " . " + r1.name + ": " + rep.message);
    }
    return fam.states.size();
  };
  const auto mt_states = run(mt_pairs(), builtin_mt_grammar().labels);
  const auto rnd_states = run(cyclic_pairs(random_corpus()), RandomRuleOptions{}.labels);
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << pairs << " pairs, " << mt_states << " MT and " << rnd_states << " random host classes, " << checks
     << " state checks, " << t << " s";
  o.note(os.str());
  return o;
}

Outcome criterion3() {
  Outcome o;
  for (const auto& c : run_mt_examples()) {
    if (c.name.rfind('[', 0) == 0) continue;  // commutator rows belong to the next criterion
    if (c.informational)
      o.note("info " + c.name + ": " + c.detail);
    else
      o.require(c.pass, c.name + ": " + c.detail);
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (const auto& c : run_mt_examples())
    if (c.name.rfind('[', 0) == 0) o.require(c.pass, c.name + ": " + c.detail);
  const auto doc = builtin_mt_grammar();
  for (Semantics mode : {Semantics::keep, Semantics::clean})
    for (OperatorKind kind : {OperatorKind::hat, OperatorKind::full}) {
      for (const auto& r : doc.rules) o.require(commutator(r, r, mode, kind).empty(), "[" + r.name + "," + r.name + "]");
      for (const auto& a : doc.rules)
        for (const auto& b : doc.rules)
          o.require(commutator(a, b, mode, kind, true) == commutator(a, b, mode, kind, false),
                    "empty overlap cancels in [" + a.name + "," + b.name + "]");
    }
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto sw = sweep_reactions(2, 3, 12);
  o.require(sw.pass(), sw.first_failure);
  const Reaction a{"coag", {2}, {1}, RateMonomial::symbol("k1")}, b{"frag", {1}, {2}, RateMonomial::symbol("k2")};
  const ReactionSum p = reaction_product(a, b);
  const ReactionSum c = reaction_commutator(a, b);
  const std::vector<std::string> k = {"k1", "k2"};
  ReactionSum want_p, want_c;
  want_p.add({{3}, {3}, k}, Rational(1));
  want_p.add({{2}, {2}, k}, Rational(4));
  want_p.add({{1}, {1}, k}, Rational(2));
  want_c.add({{2}, {2}, k}, Rational(3));
  want_c.add({{1}, {1}, k}, Rational(2));
  o.require(p == want_p, "worked product coefficients {1,4,2}");
  o.require(c == want_c, "worked commutator {3, 2}");
  o.require(check_reaction_pair(a, b, {12}).pass(), "worked case against matrices");
  const double t = seconds_since(t0);
  o.require(t < 60.0, "runtime under one minute");
  std::ostringstream os;
  os << sw.pairs << " reaction pairs, " << t << " s";
  o.note(os.str());
  return o;
}

Outcome criterion6() {
  Outcome o;
  RandomRuleOptions opt;
  opt.reactions_only = true;
  opt.labels = {"A", "B", "C"};
  const auto rs = random_rules(61, 100, opt);
  std::size_t n = 0;
  for (std::size_t k = 0; k + 1 < rs.size(); k += 2, ++n) {
    const auto rep = edge_free_crosscheck(rs[k], rs[k + 1]);
    o.require(rep.pass, rs[k].name + ", " + rs[k + 1].name + ": " + rep.message);
  }
  o.note(std::to_string(n) + " edge-free pairs");
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto doc = builtin_mt_grammar();
  const HostFamily fam = enumerate_host_states(12, 4, doc.labels, 4, Semantics::clean);
  const GeneratorMatrix m = build_generator(doc.rules, fam, Semantics::clean, Diagonal::number_rule);
  std::size_t valid = 0, nonzero = 0;
  for (std::size_t j = 0; j < m.basis.size(); ++j) {
    if (!m.valid[j]) continue;
    ++valid;
    nonzero += m.columns[j].empty() ? 0 : 1;
    o.require(m.column_sum(j).is_zero(), "column of " + describe(m.basis[j], fam.alphabet));
  }
  o.require(valid > 0 && nonzero > 0, "some valid column moves probability");
  o.note(std::to_string(valid) + " of " + std::to_string(m.basis.size()) + " columns valid, " +
         std::to_string(nonzero) + " nonzero");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto ps = cyclic_pairs(random_corpus());
  std::size_t terms = 0;
  for (Semantics mode : {Semantics::keep, Semantics::clean})
    for (const auto& [a, b] : ps) {
      for (const auto& t : product_hat(a, b, mode).terms) {
        ++terms;
        o.require(t.weight > 0, "hat weight " + std::to_string(t.weight) + " in " + a.name + " . " + b.name);
      }
      for (const auto& s : {full_product(a, b, mode), commutator(a, b, mode, OperatorKind::full)})
        for (const auto& t : s.terms) {
          ++terms;
          o.require(t.weight != 0, "zero weight kept in " + a.name + " . " + b.name);
        }
    }
  o.note(std::to_string(terms) + " terms inspected");
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::vector<GrammarDocument> docs = {builtin_mt_grammar()};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GrammarDocument g;
    g.labels = {"A", "B"};
    for (auto& r : random_rules(seed, 10)) {
      for (const auto& s : r.rate.symbols()) g.rate_symbols.push_back(s);
      g.rules.push_back(std::move(r));
    }
    docs.push_back(std::move(g));
  }
  for (const auto& d : docs) {
    const std::string once = emit_grammar(d);
    const auto back = parse_grammar(once);
    o.require(back == d && emit_grammar(back) == once, "grammar round trip");
  }
  for (Semantics mode : {Semantics::keep, Semantics::clean})
    for (const auto& [a, b] : mt_pairs())
      for (OperatorKind kind : {OperatorKind::hat, OperatorKind::full}) {
        const RuleSum s = product(a, b, mode, kind);
        const std::string once = emit_rulesum(s, Format::json);
        const auto back = parse_rulesum(once);
        o.require(back == s && emit_rulesum(back, Format::json) == once, "rule sum round trip " + a.name);
      }

  const std::string cmd = std::string("\"") + GGALG_CLI_PATH + "\" paper-examples";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    o.require(false, "could not start the CLI");
    return o;
  }
  std::string text;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) text += buf;
  const int status = pclose(pipe);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);)
    if (line.rfind("FAIL", 0) == 0) o.note("paper-examples " + line);
  o.require(code == 0, "paper-examples exit code " + std::to_string(code));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 product equals sequential firing, keep mode", [] {
         const auto t0 = Clock::now();
         Outcome o = oracle_run(Semantics::keep);
         o.require(seconds_since(t0) < 300.0, "runtime under five minutes");
         return o;
       }},
      {"2 product equals sequential firing, clean mode", [] {
         const auto t0 = Clock::now();
         Outcome o = oracle_run(Semantics::clean);
         o.require(seconds_since(t0) < 300.0, "runtime under five minutes");
         return o;
       }},
      {"3 MT overlap counts", criterion3},
      {"4 commutator structure", criterion4},
      {"5 reaction product and commutator formulas", criterion5},
      {"6 edge-free rules agree with reaction formulas", criterion6},
      {"7 generator columns conserve probability", criterion7},
      {"8 weight signs", criterion8},
      {"9 IO round trips and paper-examples", criterion9},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << "criterion " << name << "\n";
    std::size_t shown = 0;
    for (const auto& n : o.notes)
      if (shown++ < 12) std::cout << "     " << n << "\n";
    std::cout.flush();
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria pass\n" : std::to_string(failed) + " criteria fail\n");
  return failed == 0 ? 0 : 1;
}
