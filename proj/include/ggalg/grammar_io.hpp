//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggalg/error.hpp"
#include "ggalg/graph.hpp"
#include "ggalg/json_locate.hpp"
#include "ggalg/rate.hpp"
#include "ggalg/reaction.hpp"
#include "ggalg/rule.hpp"
#include "ggalg/rule_algebra.hpp"

namespace ggalg {

using json = nlohmann::json;

struct GrammarDocument {
  std::vector<std::string> labels;
  std::vector<std::string> rate_symbols;
  std::vector<Rule> rules;

  bool operator==(const GrammarDocument&) const = default;

  const Rule* find(const std::string& name) const {
    for (const auto& r : rules)
      if (r.name == name) return &r;
    return nullptr;
  }
};

struct ReactionSpec {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;

  bool operator==(const ReactionSpec&) const = default;

  const Reaction* find(const std::string& name) const {
    for (const auto& r : reactions)
      if (r.name == name) return &r;
    return nullptr;
  }
};

enum class Format { text, json, dot };

inline const char* to_string(Format f) {
  switch (f) {
    case Format::text: return "text";
    case Format::json: return "json";
    case Format::dot: return "dot";
  }
  return "?";
}

namespace detail {

class Reader {
 public:
  explicit Reader(std::string text) : doc_(std::move(text)) {}

  const json& root() const { return doc_.root(); }
  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const { doc_.fail(ptr, msg); }

  const json& object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) fail(ptr + "/" + escape_pointer_token(k), "unknown key '" + k + "'");
    }
    return j;
  }
  const json& field(const json& obj, const std::string& ptr, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(ptr, std::string("missing key '") + key + "'");
    return *it;
  }
  const json& array(const json& j, const std::string& ptr) const {
    if (!j.is_array()) fail(ptr, "expected an array");
    return j;
  }
  std::string string(const json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
  }
  std::vector<std::string> strings(const json& j, const std::string& ptr) const {
    std::vector<std::string> out;
    std::size_t k = 0;
    for (const auto& v : array(j, ptr)) out.push_back(string(v, ptr + "/" + std::to_string(k++)));
    return out;
  }
  long long integer(const json& j, const std::string& ptr, long long lo, long long hi) const {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(hi))
      fail(ptr, "integer out of range");
    const long long v = j.get<long long>();
    if (v < lo || v > hi) fail(ptr, "integer out of range");
    return v;
  }
  NodeId id(const json& j, const std::string& ptr) const {
    return static_cast<NodeId>(integer(j, ptr, 0, std::numeric_limits<NodeId>::max()));
  }
  Edge edge(const json& j, const std::string& ptr) const {
    if (!j.is_array() || j.size() != 2) fail(ptr, "expected an edge [source, target]");
    return {id(j[0], ptr + "/0"), id(j[1], ptr + "/1")};
  }

 private:
  LocatedJson doc_;
};

// Reads {nodes, edges[, phantoms]}. A null alphabet accepts every label.
inline LabelledGraph read_graph(const Reader& in, const json& j, const std::string& ptr,
                                const std::set<std::string>* alphabet, bool phantoms_allowed) {
  if (phantoms_allowed)
    in.object(j, ptr, {"nodes", "edges", "phantoms"});
  else
    in.object(j, ptr, {"nodes", "edges"});
  LabelledGraph g;
  const auto& nodes = in.array(in.field(j, ptr, "nodes"), ptr + "/nodes");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::string np = ptr + "/nodes/" + std::to_string(k);
    in.object(nodes[k], np, {"id", "label"});
    const NodeId id = in.id(in.field(nodes[k], np, "id"), np + "/id");
    const std::string label = in.string(in.field(nodes[k], np, "label"), np + "/label");
    if (alphabet && !alphabet->count(label)) in.fail(np + "/label", "unknown label '" + label + "'");
    if (label.empty()) in.fail(np + "/label", "empty label");
    if (g.has_id(id)) in.fail(np + "/id", "duplicate node id " + std::to_string(id));
    g.add_node(id, label);
  }
  if (phantoms_allowed && j.contains("phantoms")) {
    const auto& ph = in.array(j["phantoms"], ptr + "/phantoms");
    for (std::size_t k = 0; k < ph.size(); ++k) {
      const std::string pp = ptr + "/phantoms/" + std::to_string(k);
      const NodeId id = in.id(ph[k], pp);
      if (g.has_id(id)) in.fail(pp, "duplicate node id " + std::to_string(id));
      g.add_phantom(id);
    }
  }
  const auto& edges = in.array(in.field(j, ptr, "edges"), ptr + "/edges");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string ep = ptr + "/edges/" + std::to_string(k);
    const Edge e = in.edge(edges[k], ep);
    for (NodeId end : {e.first, e.second})
      if (!g.has_id(end))
        in.fail(ep, "edge " + std::to_string(e.first) + "->" + std::to_string(e.second) +
                        " refers to undeclared node id " + std::to_string(end));
    if (!g.edges.insert(e).second)
      in.fail(ep, "duplicate edge " + std::to_string(e.first) + "->" + std::to_string(e.second));
  }
  return g;
}

inline std::set<Edge> read_forbidden(const Reader& in, const json& j, const std::string& ptr, const LabelledGraph& lhs) {
  std::set<Edge> out;
  const auto& arr = in.array(j, ptr);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string ep = ptr + "/" + std::to_string(k);
    const Edge e = in.edge(arr[k], ep);
    for (NodeId end : {e.first, e.second})
      if (!lhs.has_node(end))
        in.fail(ep, "forbidden edge " + std::to_string(e.first) + "->" + std::to_string(e.second) +
                        " refers to undeclared lhs node id " + std::to_string(end));
    if (!out.insert(e).second)
      in.fail(ep, "duplicate forbidden edge " + std::to_string(e.first) + "->" + std::to_string(e.second));
  }
  return out;
}

inline json graph_json(const LabelledGraph& g, bool with_phantoms) {
  json nodes = json::array();
  for (const auto& [id, label] : g.nodes) nodes.push_back({{"id", id}, {"label", label.name}});
  json edges = json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({a, b});
  json out = {{"nodes", nodes}, {"edges", edges}};
  if (with_phantoms) out["phantoms"] = g.phantoms;
  return out;
}

inline json edges_json(const std::set<Edge>& es) {
  json out = json::array();
  for (const auto& [a, b] : es) out.push_back({a, b});
  return out;
}

inline Rational parse_rational(const Reader& in, const json& j, const std::string& ptr) {
  const std::string s = in.string(j, ptr);
  try {
    std::size_t used = 0;
    const auto slash = s.find('/');
    const long long num = std::stoll(s.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? s.size() : slash)) throw std::invalid_argument(s);
    long long den = 1;
    if (slash != std::string::npos) {
      den = std::stoll(s.substr(slash + 1), &used);
      if (used != s.size() - slash - 1 || den <= 0) throw std::invalid_argument(s);
    }
    return Rational(num, den);
  } catch (const std::exception&) {
    in.fail(ptr, "malformed rational '" + s + "'");
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Grammars

inline GrammarDocument parse_grammar(const std::string& text) {
  detail::Reader in(text);
  const json& root = in.object(in.root(), "", {"labels", "rate_symbols", "rules"});
  GrammarDocument doc;
  doc.labels = in.strings(in.field(root, "", "labels"), "/labels");
  doc.rate_symbols = in.strings(in.field(root, "", "rate_symbols"), "/rate_symbols");
  std::set<std::string> alphabet, symbols, names;
  for (std::size_t k = 0; k < doc.labels.size(); ++k)
    if (doc.labels[k].empty() || !alphabet.insert(doc.labels[k]).second)
      in.fail("/labels/" + std::to_string(k), "duplicate or empty label '" + doc.labels[k] + "'");
  for (std::size_t k = 0; k < doc.rate_symbols.size(); ++k)
    if (doc.rate_symbols[k].empty() || !symbols.insert(doc.rate_symbols[k]).second)
      in.fail("/rate_symbols/" + std::to_string(k), "duplicate or empty rate symbol '" + doc.rate_symbols[k] + "'");

  const auto& rules = in.array(in.field(root, "", "rules"), "/rules");
  for (std::size_t k = 0; k < rules.size(); ++k) {
    const std::string rp = "/rules/" + std::to_string(k);
    const json& rj = in.object(rules[k], rp, {"name", "rate", "lhs", "rhs", "forbidden"});
    Rule r;
    r.name = in.string(in.field(rj, rp, "name"), rp + "/name");
    if (r.name.empty()) in.fail(rp + "/name", "empty rule name");
    if (!names.insert(r.name).second) in.fail(rp + "/name", "duplicate rule name '" + r.name + "'");
    const auto rate = in.strings(in.field(rj, rp, "rate"), rp + "/rate");
    for (std::size_t s = 0; s < rate.size(); ++s)
      if (!symbols.count(rate[s]))
        in.fail(rp + "/rate/" + std::to_string(s), "undeclared rate symbol '" + rate[s] + "'");
    r.rate = RateMonomial(rate);
    r.lhs = detail::read_graph(in, in.field(rj, rp, "lhs"), rp + "/lhs", &alphabet, false);
    r.rhs = detail::read_graph(in, in.field(rj, rp, "rhs"), rp + "/rhs", &alphabet, false);
    if (rj.contains("forbidden")) r.forbidden = detail::read_forbidden(in, rj["forbidden"], rp + "/forbidden", r.lhs);
    if (auto why = rule_violation(r)) in.fail(rp, "rule '" + r.name + "': " + *why);
    doc.rules.push_back(std::move(r));
  }
  return doc;
}

inline std::string emit_grammar(const GrammarDocument& doc) {
  json rules = json::array();
  for (const auto& r : doc.rules) {
    json rj = {{"name", r.name},
               {"rate", r.rate.symbols()},
               {"lhs", detail::graph_json(r.lhs, false)},
               {"rhs", detail::graph_json(r.rhs, false)}};
    if (!r.forbidden.empty()) rj["forbidden"] = detail::edges_json(r.forbidden);
    rules.push_back(std::move(rj));
  }
  return detail::dump({{"labels", doc.labels}, {"rate_symbols", doc.rate_symbols}, {"rules", rules}});
}

// The four structural microtubule rules.
inline GrammarDocument builtin_mt_grammar() {
  GrammarDocument doc;
  doc.labels = {"internal", "grow_end", "retract_end", "junct"};
  doc.rate_symbols = {"rho_grow", "rho_retract", "rho_bundle", "rho_sever"};

  Rule grow;
  grow.name = "grow";
  grow.rate = RateMonomial::symbol("rho_grow");
  grow.lhs.add_node(1, "grow_end");
  grow.rhs.add_node(1, "internal").add_node(2, "grow_end").add_edge(1, 2);

  Rule retract;
  retract.name = "retract";
  retract.rate = RateMonomial::symbol("rho_retract");
  retract.lhs.add_node(1, "retract_end").add_node(2, "internal").add_edge(1, 2);
  retract.rhs.add_node(2, "retract_end");

  // A growing end meets the middle of another chain and joins it.
  Rule bundle;
  bundle.name = "bundle";
  bundle.rate = RateMonomial::symbol("rho_bundle");
  bundle.lhs.add_node(1, "internal").add_node(2, "internal").add_node(3, "internal").add_node(4, "grow_end");
  bundle.lhs.add_edge(1, 2).add_edge(2, 3);
  bundle.rhs.add_node(1, "internal").add_node(2, "junct").add_node(3, "internal").add_node(4, "internal");
  bundle.rhs.add_edge(1, 2).add_edge(2, 3).add_edge(4, 2);

  Rule sever;
  sever.name = "sever";
  sever.rate = RateMonomial::symbol("rho_sever");
  sever.lhs.add_node(1, "internal").add_node(2, "internal").add_node(3, "internal");
  sever.lhs.add_edge(1, 2).add_edge(2, 3);
  sever.rhs.add_node(1, "internal").add_node(2, "grow_end").add_node(4, "retract_end").add_node(3, "internal");
  sever.rhs.add_edge(1, 2).add_edge(4, 3);

  doc.rules = {grow, retract, bundle, sever};
  return doc;
}

// ---------------------------------------------------------------------------
// Rule sums

namespace detail {

inline std::string text_graph(const LabelledGraph& g, const std::set<Edge>* forbidden) {
  std::string out = "(";
  bool first = true;
  for (NodeId id : g.ids()) {
    if (!first) out += ", ";
    first = false;
    auto it = g.nodes.find(id);
    out += std::to_string(id) + ":" + (it == g.nodes.end() ? std::string("_") : it->second.name);
  }
  std::vector<std::string> edges;
  for (const auto& [a, b] : g.edges) edges.push_back(std::to_string(a) + "->" + std::to_string(b));
  if (forbidden)
    for (const auto& [a, b] : *forbidden) edges.push_back("!" + std::to_string(a) + "->" + std::to_string(b));
  if (!edges.empty()) {
    out += "; ";
    for (std::size_t k = 0; k < edges.size(); ++k) out += (k ? ", " : "") + edges[k];
  }
  return out + ")";
}

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline void dot_cluster(std::ostringstream& os, const std::string& prefix, const std::string& title,
                        const LabelledGraph& g, const std::set<Edge>* forbidden) {
  os << "  subgraph cluster_" << prefix << " {\n";
  os << "    label=" << dot_quote(title) << ";\n";
  for (NodeId id : g.ids()) {
    auto it = g.nodes.find(id);
    const bool phantom = it == g.nodes.end();
    os << "    " << prefix << "_" << id << " [label="
       << dot_quote(std::to_string(id) + ":" + (phantom ? std::string("_") : it->second.name))
       << (phantom ? ", style=dashed" : "") << "];\n";
  }
  for (const auto& [a, b] : g.edges) os << "    " << prefix << "_" << a << " -> " << prefix << "_" << b << ";\n";
  if (forbidden)
    for (const auto& [a, b] : *forbidden)
      os << "    " << prefix << "_" << a << " -> " << prefix << "_" << b << " [style=dotted, color=red];\n";
  os << "  }\n";
}

}  // namespace detail

// One term per line: `weight · rate :: LHS => RHS`. Forbidden edges are
// written `!a->b` among the lhs edges, phantoms `id:_` among the rhs nodes.
inline std::string term_text(const RuleTerm& t) {
  return std::to_string(t.weight) + " · " + to_string(t.rule.rate) + " :: " +
         detail::text_graph(t.rule.lhs, &t.rule.forbidden) + " => " + detail::text_graph(t.rule.rhs, nullptr);
}

inline std::string rulesum_json(const RuleSum& sum) {
  json terms = json::array();
  for (const auto& t : sum.terms) {
    terms.push_back({{"weight", t.weight},
                     {"name", t.rule.name},
                     {"rate", {{"coefficient", to_string(t.rule.rate.coefficient())}, {"symbols", t.rule.rate.symbols()}}},
                     {"lhs", detail::graph_json(t.rule.lhs, true)},
                     {"rhs", detail::graph_json(t.rule.rhs, true)},
                     {"forbidden", detail::edges_json(t.rule.forbidden)}});
  }
  return detail::dump({{"terms", terms}});
}

inline std::string emit_rulesum(const RuleSum& sum, Format format) {
  switch (format) {
    case Format::text: {
      if (sum.empty()) return "0\n";
      std::string out;
      for (const auto& t : sum.terms) out += term_text(t) + "\n";
      return out;
    }
    case Format::json:
      return rulesum_json(sum);
    case Format::dot: {
      std::ostringstream os;
      os << "digraph rulesum {\n";
      for (std::size_t k = 0; k < sum.terms.size(); ++k) {
        const auto& t = sum.terms[k];
        const std::string head = "term " + std::to_string(k) + ": " + std::to_string(t.weight) + " · " +
                                 to_string(t.rule.rate);
        detail::dot_cluster(os, "t" + std::to_string(k) + "_lhs", head + " lhs", t.rule.lhs, &t.rule.forbidden);
        detail::dot_cluster(os, "t" + std::to_string(k) + "_rhs", head + " rhs", t.rule.rhs, nullptr);
      }
      os << "}\n";
      return os.str();
    }
  }
  return {};
}

// Reads the json rendering of a rule sum.
inline RuleSum parse_rulesum(const std::string& text) {
  detail::Reader in(text);
  const json& root = in.object(in.root(), "", {"terms"});
  const auto& terms = in.array(in.field(root, "", "terms"), "/terms");
  RuleSum out;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string tp = "/terms/" + std::to_string(k);
    const json& tj = in.object(terms[k], tp, {"weight", "name", "rate", "lhs", "rhs", "forbidden"});
    RuleTerm t;
    t.weight = in.integer(in.field(tj, tp, "weight"), tp + "/weight", std::numeric_limits<long long>::min(),
                          std::numeric_limits<long long>::max());
    t.rule.name = in.string(in.field(tj, tp, "name"), tp + "/name");
    const json& rj = in.object(in.field(tj, tp, "rate"), tp + "/rate", {"coefficient", "symbols"});
    t.rule.rate = RateMonomial(in.strings(in.field(rj, tp + "/rate", "symbols"), tp + "/rate/symbols"),
                               detail::parse_rational(in, in.field(rj, tp + "/rate", "coefficient"),
                                                      tp + "/rate/coefficient"));
    t.rule.lhs = detail::read_graph(in, in.field(tj, tp, "lhs"), tp + "/lhs", nullptr, true);
    t.rule.rhs = detail::read_graph(in, in.field(tj, tp, "rhs"), tp + "/rhs", nullptr, true);
    t.rule.forbidden = detail::read_forbidden(in, in.field(tj, tp, "forbidden"), tp + "/forbidden", t.rule.lhs);
    if (auto why = rule_violation(t.rule)) in.fail(tp, "term " + std::to_string(k) + ": " + *why);
    out.terms.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reactions

inline ReactionSpec parse_reactions(const std::string& text) {
  detail::Reader in(text);
  const json& root = in.object(in.root(), "", {"species", "reactions"});
  ReactionSpec spec;
  spec.species = in.strings(in.field(root, "", "species"), "/species");
  std::set<std::string> seen, names;
  for (std::size_t k = 0; k < spec.species.size(); ++k)
    if (spec.species[k].empty() || !seen.insert(spec.species[k]).second)
      in.fail("/species/" + std::to_string(k), "duplicate or empty species '" + spec.species[k] + "'");
  const auto& rs = in.array(in.field(root, "", "reactions"), "/reactions");
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const std::string rp = "/reactions/" + std::to_string(k);
    const json& rj = in.object(rs[k], rp, {"name", "m", "n", "rate"});
    Reaction r;
    r.name = in.string(in.field(rj, rp, "name"), rp + "/name");
    if (r.name.empty()) in.fail(rp + "/name", "empty reaction name");
    if (!names.insert(r.name).second) in.fail(rp + "/name", "duplicate reaction name '" + r.name + "'");
    for (const char* side : {"m", "n"}) {
      const std::string sp = rp + "/" + side;
      const auto& arr = in.array(in.field(rj, rp, side), sp);
      if (arr.size() != spec.species.size())
        in.fail(sp, std::string(side) + " has " + std::to_string(arr.size()) + " entries for " +
                        std::to_string(spec.species.size()) + " species");
      auto& dst = side[0] == 'm' ? r.m : r.n;
      for (std::size_t i = 0; i < arr.size(); ++i)
        dst.push_back(static_cast<int>(in.integer(arr[i], sp + "/" + std::to_string(i), 0, 64)));
    }
    r.k = RateMonomial(in.strings(in.field(rj, rp, "rate"), rp + "/rate"));
    spec.reactions.push_back(std::move(r));
  }
  return spec;
}

inline std::string emit_reactions(const ReactionSpec& spec) {
  json rs = json::array();
  for (const auto& r : spec.reactions) rs.push_back({{"name", r.name}, {"m", r.m}, {"n", r.n}, {"rate", r.k.symbols()}});
  return detail::dump({{"species", spec.species}, {"reactions", rs}});
}

namespace detail {

inline std::string text_side(const std::vector<int>& counts, const std::vector<std::string>& species) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (!out.empty()) out += " + ";
    out += (counts[i] == 1 ? std::string() : std::to_string(counts[i]) + " ") + species[i];
  }
  return out.empty() ? "∅" : out;
}

}  // namespace detail

inline std::string emit_reactionsum(const ReactionSum& sum, const std::vector<std::string>& species, Format format) {
  if (format == Format::json) {
    json terms = json::array();
    for (const auto& [key, c] : sum.terms())
      terms.push_back({{"m", key.m}, {"n", key.n}, {"coefficient", to_string(c)}, {"symbols", key.symbols}});
    return detail::dump({{"species", species}, {"terms", terms}});
  }
  if (sum.empty()) return "0\n";
  std::string out;
  for (const auto& [key, c] : sum.terms()) {
    out += to_string(c) + " · " + to_string(RateMonomial(key.symbols)) + " :: " +
           detail::text_side(key.m, species) + " -> " + detail::text_side(key.n, species) + "\n";
  }
  return out;
}

}  // namespace ggalg
