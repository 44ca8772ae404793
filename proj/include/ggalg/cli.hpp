//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggalg/error.hpp"
#include "ggalg/fock_oracle.hpp"
#include "ggalg/grammar_io.hpp"
#include "ggalg/mt_examples.hpp"
#include "ggalg/random_rules.hpp"
#include "ggalg/reaction.hpp"
#include "ggalg/rule_algebra.hpp"

#ifndef GGALG_GOLDEN_DIR_DEFAULT
#define GGALG_GOLDEN_DIR_DEFAULT ""
#endif

namespace ggalg {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerification = 1,
  kExitParse = 2,
  kExitUnknownName = 3,
  kExitCapacity = 4,
};

struct RunConfig {
  Semantics semantics = Semantics::keep;
  bool semantics_given = false;
  OperatorKind kind = OperatorKind::hat;
  Format format = Format::text;
  int universe = 0;  // 0: derived from the sizing rule
  int max_host_nodes = 4;
  int max_edges = 3;
  std::uint64_t seed = 7;
  int random_rules = 0;
  int nmax = 12;
  int max_degree = 3;
};

class UnknownName : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Smallest universe in which no firing over the family can run out of
// indices: the host support, one hanging-edge index in keep mode, and
// every node the two rules of a pair can create.
inline int required_universe(const RunConfig& cfg, const std::vector<std::pair<Rule, Rule>>& pairs, Semantics mode) {
  int created = 0;
  for (const auto& [r2, r1] : pairs) {
    int c = 0;
    for (const Rule* r : {&r1, &r2})
      for (const auto& [id, l] : r->rhs.nodes) c += r->created(id) ? 1 : 0;
    created = std::max(created, c);
  }
  return cfg.max_host_nodes + (mode == Semantics::keep ? 1 : 0) + created;
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "builtin:mt" names the shipped microtubule grammar.
inline GrammarDocument load_grammar(const std::string& path) {
  if (path == "builtin:mt") return builtin_mt_grammar();
  const std::string text = read_file(path);
  try {
    return parse_grammar(text);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), e.column(), path);
  }
}

inline const Rule& rule_named(const GrammarDocument& g, const std::string& name) {
  if (const Rule* r = g.find(name)) return *r;
  throw UnknownName("no rule named '" + name + "'");
}

inline const Reaction& reaction_named(const ReactionSpec& s, const std::string& name) {
  if (const Reaction* r = s.find(name)) return *r;
  throw UnknownName("no reaction named '" + name + "'");
}

inline std::string golden_dir() {
  if (const char* env = std::getenv("GGALG_GOLDEN_DIR"); env && *env) return env;
  return GGALG_GOLDEN_DIR_DEFAULT;
}

struct VerifyRow {
  std::string pair;
  Semantics mode;
  std::size_t terms = 0;
  Report report;
};

inline int verify_pairs(const std::vector<std::pair<Rule, Rule>>& pairs, const std::vector<std::string>& labels,
                        const RunConfig& cfg, const std::vector<Semantics>& modes, const RuleSum* fixed_sum,
                        std::ostream& out) {
  bool all = true;
  for (Semantics mode : modes) {
    const int need = required_universe(cfg, pairs, mode);
    const int universe = cfg.universe > 0 ? cfg.universe : std::max(12, need);
    if (universe < need || universe > kMaxUniverse)
      throw CapacityError("universe " + std::to_string(universe) + " is too small for " + to_string(mode) +
                          " verification; hint: use --universe " + std::to_string(need) +
                          " or lower --max-host-nodes (limit " + std::to_string(kMaxUniverse) + ")");
    const HostFamily family = enumerate_host_states(universe, cfg.max_host_nodes, labels, cfg.max_edges, mode);
    out << "# " << to_string(mode) << " " << to_string(cfg.kind) << ": " << family.states.size()
        << " host classes, universe " << universe << "\n";
    for (const auto& [r2, r1] : pairs) {
      const RuleSum sum = fixed_sum ? *fixed_sum : product(r2, r1, mode, cfg.kind);
      const Report rep = check_product(sum, r2, r1, mode, cfg.kind, family);
      all = all && rep.pass;
      out << (rep.pass ? "PASS " : "FAIL ") << std::left << std::setw(6) << to_string(mode) << std::setw(24)
          << (r2.name + " . " + r1.name) << " terms=" << sum.size() << " states=" << rep.states_checked << "\n";
      if (!rep.pass) out << "  counterexample: " << rep.message << "\n";
    }
  }
  out << (all ? "all pairs pass\n" : "verification failed\n");
  return all ? kExitOk : kExitVerification;
}

}  // namespace detail

// Runs one command line (without the program name) and returns its exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ggalg: algebra of stochastic labelled graph grammar rules"};
  app.name("ggalg");
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig cfg;
  std::string semantics = "keep", kind = "hat", format = "text";
  app.add_option("--semantics", semantics, "hanging-edge semantics")->check(CLI::IsMember({"keep", "clean"}));
  app.add_option("--kind", kind, "operator kind")->check(CLI::IsMember({"hat", "full"}));
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json", "dot"}));
  app.add_option("--universe", cfg.universe, "host universe size (default: sizing rule, at least 12)")
      ->check(CLI::Range(1, kMaxUniverse));
  app.add_option("--max-host-nodes", cfg.max_host_nodes, "labelled nodes per host state")->check(CLI::Range(1, 16));
  app.add_option("--max-edges", cfg.max_edges, "edges per host state")->check(CLI::Range(0, 64));
  app.add_option("--seed", cfg.seed, "seed of the random rule corpus");
  app.add_option("--random-rules", cfg.random_rules, "verify this many random rules instead of a grammar")
      ->check(CLI::Range(0, 100000));
  app.add_option("--nmax", cfg.nmax, "Fock truncation per species")->check(CLI::Range(1, 64));
  app.add_option("--max-degree", cfg.max_degree, "largest stoichiometry in the reaction sweep")
      ->check(CLI::Range(0, 8));

  std::string grammar, r2name, r1name, sum_file, spec_file;

  auto* product_cmd = app.add_subcommand("product", "collected product: r2 fires after r1");
  product_cmd->add_option("grammar", grammar, "grammar file or builtin:mt")->required();
  product_cmd->add_option("r2", r2name)->required();
  product_cmd->add_option("r1", r1name)->required();

  auto* commutator_cmd = app.add_subcommand("commutator", "collected commutator [r2, r1]");
  commutator_cmd->add_option("grammar", grammar, "grammar file or builtin:mt")->required();
  commutator_cmd->add_option("r2", r2name)->required();
  commutator_cmd->add_option("r1", r1name)->required();

  auto* verify_cmd = app.add_subcommand("verify", "check products against sequential firing on host states");
  verify_cmd->add_option("grammar", grammar, "grammar file or builtin:mt");
  verify_cmd->add_option("r2", r2name, "restrict to one pair");
  verify_cmd->add_option("r1", r1name);
  verify_cmd->add_option("--sum", sum_file, "check this rule sum (json) instead of the computed product");

  auto* reactions_cmd = app.add_subcommand("reactions", "pure reaction operators");
  reactions_cmd->require_subcommand(1);
  auto* rx_product = reactions_cmd->add_subcommand("product", "normal-ordered product");
  rx_product->add_option("spec", spec_file)->required();
  rx_product->add_option("r2", r2name)->required();
  rx_product->add_option("r1", r1name)->required();
  auto* rx_commutator = reactions_cmd->add_subcommand("commutator", "commutator [r2, r1]");
  rx_commutator->add_option("spec", spec_file)->required();
  rx_commutator->add_option("r2", r2name)->required();
  rx_commutator->add_option("r1", r1name)->required();
  auto* rx_verify = reactions_cmd->add_subcommand("verify", "formulas against truncated Fock matrices");
  rx_verify->add_option("spec", spec_file, "reaction spec; without it, sweep all small reactions");

  auto* examples_cmd = app.add_subcommand("paper-examples", "reproduce the worked microtubule calculations");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitParse;
  }

  cfg.semantics = semantics == "clean" ? Semantics::clean : Semantics::keep;
  cfg.semantics_given = app.count("--semantics") > 0;
  cfg.kind = kind == "full" ? OperatorKind::full : OperatorKind::hat;
  cfg.format = format == "json" ? Format::json : format == "dot" ? Format::dot : Format::text;

  try {
    if (product_cmd->parsed() || commutator_cmd->parsed()) {
      const GrammarDocument g = detail::load_grammar(grammar);
      const Rule& r2 = detail::rule_named(g, r2name);
      const Rule& r1 = detail::rule_named(g, r1name);
      const RuleSum sum = product_cmd->parsed() ? product(r2, r1, cfg.semantics, cfg.kind)
                                                : commutator(r2, r1, cfg.semantics, cfg.kind);
      out << emit_rulesum(sum, cfg.format);
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      std::vector<std::pair<Rule, Rule>> pairs;
      std::vector<std::string> labels;
      if (cfg.random_rules > 0) {
        if (!grammar.empty()) throw CLI::ValidationError("verify", "give either a grammar or --random-rules, not both");
        const RandomRuleOptions opt;
        pairs = cyclic_pairs(random_rules(cfg.seed, static_cast<std::size_t>(cfg.random_rules), opt));
        labels = opt.labels;
        out << "# " << cfg.random_rules << " random rules, seed " << cfg.seed << "\n";
      } else {
        if (grammar.empty()) throw CLI::ValidationError("verify", "verify needs a grammar or --random-rules");
        const GrammarDocument g = detail::load_grammar(grammar);
        labels = g.labels;
        if (!r2name.empty() || !r1name.empty()) {
          if (r1name.empty()) throw CLI::ValidationError("verify", "verify takes both r2 and r1, or neither");
          pairs.emplace_back(detail::rule_named(g, r2name), detail::rule_named(g, r1name));
        } else {
          for (const auto& a : g.rules)
            for (const auto& b : g.rules) pairs.emplace_back(a, b);
        }
      }
      RuleSum fixed;
      if (!sum_file.empty()) {
        if (pairs.size() != 1) throw CLI::ValidationError("verify", "--sum needs exactly one rule pair");
        const std::string text = detail::read_file(sum_file);
        try {
          fixed = parse_rulesum(text);
        } catch (const ParseError& e) {
          throw ParseError(e.message(), e.line(), e.column(), sum_file);
        }
      }
      std::vector<Semantics> modes = {Semantics::keep, Semantics::clean};
      if (cfg.semantics_given) modes = {cfg.semantics};
      return detail::verify_pairs(pairs, labels, cfg, modes, sum_file.empty() ? nullptr : &fixed, out);
    }

    if (reactions_cmd->parsed()) {
      if (cfg.format == Format::dot) throw CLI::ValidationError("--format", "dot is not available for reactions");
      if (rx_product->parsed() || rx_commutator->parsed()) {
        const ReactionSpec spec = parse_reactions(detail::read_file(spec_file));
        const Reaction& r2 = detail::reaction_named(spec, r2name);
        const Reaction& r1 = detail::reaction_named(spec, r1name);
        const ReactionSum s = rx_product->parsed() ? reaction_product(r2, r1) : reaction_commutator(r2, r1);
        out << emit_reactionsum(s, spec.species, cfg.format);
        return kExitOk;
      }
      if (!spec_file.empty()) {
        const ReactionSpec spec = parse_reactions(detail::read_file(spec_file));
        const std::vector<int> nmax(spec.species.size(), cfg.nmax);
        bool all = true;
        for (const auto& r2 : spec.reactions)
          for (const auto& r1 : spec.reactions) {
            for (std::size_t i = 0; i < nmax.size(); ++i)
              if (r1.n[i] + r2.n[i] >= cfg.nmax || r1.m[i] + r2.m[i] > cfg.nmax)
                throw CapacityError("--nmax " + std::to_string(cfg.nmax) + " leaves no room for " + r2.name +
                                    " . " + r1.name + "; hint: raise --nmax");
            const auto c = check_reaction_pair(r2, r1, nmax);
            all = all && c.pass();
            out << (c.pass() ? "PASS " : "FAIL ") << r2.name << " . " << r1.name
                << (c.product_ok ? "" : " product mismatch") << (c.commutator_ok ? "" : " commutator mismatch")
                << "\n";
          }
        out << (all ? "all pairs pass\n" : "verification failed\n");
        return all ? kExitOk : kExitVerification;
      }
      if (2 * cfg.max_degree >= cfg.nmax)
        throw CapacityError("--nmax " + std::to_string(cfg.nmax) + " leaves no headroom for degree " +
                            std::to_string(cfg.max_degree) + "; hint: use --nmax " +
                            std::to_string(2 * cfg.max_degree + 1) + " or more");
      const ReactionSweep sw = sweep_reactions(2, cfg.max_degree, cfg.nmax);
      out << (sw.pass() ? "PASS " : "FAIL ") << sw.pairs << " ordered reaction pairs over 1 and 2 species, degree <= "
          << cfg.max_degree << ", Nmax " << cfg.nmax << "\n";
      if (!sw.pass()) out << "  first failure: " << sw.first_failure << "\n";
      return sw.pass() ? kExitOk : kExitVerification;
    }

    if (examples_cmd->parsed()) {
      auto checks = run_mt_examples();
      const GrammarDocument mt = builtin_mt_grammar();
      const std::string text =
          emit_rulesum(commutator(*mt.find("retract"), *mt.find("grow"), Semantics::keep, OperatorKind::hat),
                       Format::text);
      const std::string path = detail::golden_dir() + "/mt_commutator_retract_grow.txt";
      std::ifstream golden(path, std::ios::binary);
      std::ostringstream expected;
      if (golden) expected << golden.rdbuf();
      checks.push_back({"[W2,W1] text matches golden file", golden && expected.str() == text, false,
                        golden ? path : "missing " + path});
      for (const auto& c : checks)
        out << (c.informational ? "INFO " : c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      const bool ok = examples_pass(checks);
      out << (ok ? "all pinned checks pass\n" : "some pinned checks fail\n");
      return ok ? kExitOk : kExitVerification;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitParse;
  } catch (const UnknownName& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnknownName;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

}  // namespace ggalg
