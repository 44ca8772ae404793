//
// ggalg - Copyright 2026 The ggalg Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ggalg/cli.hpp"

namespace {

using namespace ggalg;

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("ggalg_test_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path.string();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::string kMt = std::string(GGALG_SOURCE_DIR) + "/data/mt.ggml.json";

const char* kSpec = R"({"species": ["A"], "reactions": [
  {"name": "coag", "m": [2], "n": [1], "rate": ["k1"]},
  {"name": "frag", "m": [1], "n": [2], "rate": ["k2"]}]})";

}  // namespace

TEST(Cli, ProductRetractGrow) {
  const auto r = run({"product", kMt, "retract", "grow"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 2u);
}

TEST(Cli, CommutatorMatchesGoldenFile) {
  const auto r = run({"commutator", "builtin:mt", "retract", "grow"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(std::string(GGALG_SOURCE_DIR) + "/tests/golden/mt_commutator_retract_grow.txt"));
}

TEST(Cli, SelfCommutatorPrintsZero) {
  for (const char* kind : {"hat", "full"}) {
    const auto r = run({"--kind", kind, "commutator", kMt, "grow", "grow"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "0\n");
  }
}

TEST(Cli, OutputIsDeterministic) {
  for (const char* fmt : {"text", "json", "dot"}) {
    const auto a = run({"--format", fmt, "--semantics", "clean", "product", kMt, "sever", "bundle"});
    const auto b = run({"--format", fmt, "--semantics", "clean", "product", kMt, "sever", "bundle"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, JsonOutputParsesBack) {
  const auto r = run({"--format", "json", "--kind", "full", "product", kMt, "sever", "grow"});
  ASSERT_EQ(r.code, 0);
  const auto doc = builtin_mt_grammar();
  EXPECT_EQ(parse_rulesum(r.out), product(*doc.find("sever"), *doc.find("grow"), Semantics::keep, OperatorKind::full));
}

TEST(Cli, ParseErrorExitCode) {
  const std::string bad = temp_file("bad.json", "{\"labels\": [\"a\"],\n \"rate_symbols\": [], \"rules\": [\n"
                                                "{\"name\": \"r\", \"rate\": [], \"lhs\": {\"nodes\": [{\"id\": 1, "
                                                "\"label\": \"q\"}], \"edges\": []}, \"rhs\": {\"nodes\": [], "
                                                "\"edges\": []}}]}");
  const auto r = run({"product", bad, "r", "r"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unknown label 'q'"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("ggalg_test_bad.json:3:64: unknown label"), std::string::npos) << r.err;
  EXPECT_EQ(run({"product", "/nonexistent/x.json", "a", "b"}).code, 2);
  EXPECT_EQ(run({"--semantics", "sloppy", "product", kMt, "grow", "grow"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, UnknownNameExitCode) {
  const auto r = run({"product", kMt, "grow", "shrink"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("shrink"), std::string::npos);
  const std::string spec = temp_file("spec.json", kSpec);
  EXPECT_EQ(run({"reactions", "product", spec, "coag", "nope"}).code, 3);
}

TEST(Cli, CapacityExitCode) {
  const auto r = run({"--universe", "5", "verify", kMt, "grow", "grow"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("hint"), std::string::npos);
  const std::string spec = temp_file("spec_cap.json", kSpec);
  EXPECT_EQ(run({"--nmax", "3", "reactions", "verify", spec}).code, 4);
  EXPECT_EQ(run({"--nmax", "6", "reactions", "verify"}).code, 4);
}

TEST(Cli, VerifyOnePairBothModes) {
  const auto r = run({"--max-host-nodes", "3", "--max-edges", "2", "verify", kMt, "retract", "grow"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS keep"), std::string::npos);
  EXPECT_NE(r.out.find("PASS clean"), std::string::npos);
  EXPECT_NE(r.out.find("all pairs pass"), std::string::npos);
}

TEST(Cli, VerifyFullKind) {
  const auto r = run({"--kind", "full", "--semantics", "clean", "--max-host-nodes", "3", "--max-edges", "2", "verify",
                      kMt, "sever", "grow"});
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, VerifyRejectsAWrongSum) {
  // Drop one term of the true product: some host state must disagree.
  const auto doc = builtin_mt_grammar();
  RuleSum s = product_hat(*doc.find("retract"), *doc.find("grow"), Semantics::keep);
  ASSERT_EQ(s.size(), 2u);
  s.terms.pop_back();
  const std::string path = temp_file("wrong.json", emit_rulesum(s, Format::json));
  const auto r = run({"--semantics", "keep", "--max-host-nodes", "3", "--max-edges", "2", "verify", kMt, "retract",
                      "grow", "--sum", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("counterexample"), std::string::npos) << r.out;
}

TEST(Cli, VerifyRandomRules) {
  const auto r = run({"--random-rules", "6", "--max-host-nodes", "3", "--max-edges", "2", "verify"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(run({"--random-rules", "6", "verify", kMt}).code, 2);
}

TEST(Cli, ReactionCommands) {
  const std::string spec = temp_file("spec_ok.json", kSpec);
  const auto p = run({"reactions", "product", spec, "coag", "frag"});
  EXPECT_EQ(p.code, 0);
  EXPECT_EQ(p.out, "2 · k1*k2 :: A -> A\n4 · k1*k2 :: 2 A -> 2 A\n1 · k1*k2 :: 3 A -> 3 A\n");
  const auto c = run({"reactions", "commutator", spec, "coag", "frag"});
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(c.out, "2 · k1*k2 :: A -> A\n3 · k1*k2 :: 2 A -> 2 A\n");
  const auto v = run({"reactions", "verify", spec});
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_EQ(run({"--format", "dot", "reactions", "product", spec, "coag", "frag"}).code, 2);
}

TEST(Cli, ReactionSweep) {
  const auto r = run({"--max-degree", "2", "--nmax", "8", "reactions", "verify"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("PASS 6642 ordered reaction pairs", 0), 0u) << r.out;
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("paper-examples"), std::string::npos);
}

TEST(Cli, SubprocessProduct) {
  const std::string out = std::filesystem::temp_directory_path() / "ggalg_test_subprocess.txt";
  const std::string cmd = std::string("\"") + GGALG_CLI_PATH + "\" commutator builtin:mt retract grow > \"" + out + "\"";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(out), slurp(std::string(GGALG_SOURCE_DIR) + "/tests/golden/mt_commutator_retract_grow.txt"));
}
