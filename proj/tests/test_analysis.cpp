#include <gtest/gtest.h>

#include <string>

#include "premlog/analysis.hpp"
#include "premlog/parser.hpp"

using namespace premlog;

namespace {

Program parse_ok(const std::string& text) {
  ParseResult pr = parse_program(text);
  EXPECT_TRUE(pr.ok()) << render_diagnostics(pr.diagnostics);
  return std::move(*pr.program);
}

const char* kPost =
    "path(X, Y, D) :- arc(X, Y, D).\n"
    "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy.\n"
    "shortestpath(X, Y, D) :- path(X, Y, D), X = a, is_min((X, Y), D).\n";

const char* kPushed =
    "path(X, Y, D) :- arc(X, Y, D).\n"
    "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy, is_min((X, Y), D).\n"
    "shortestpath(X, Y, D) :- path(X, Y, D), X = a.\n";

}  // namespace

TEST(analyze, strata_in_dependency_order) {
  AnalysisResult a = analyze(parse_ok(kPost));
  ASSERT_TRUE(a.ok()) << render_diagnostics(a.diagnostics);
  ASSERT_EQ(a.strata.levels.size(), 3u);
  EXPECT_EQ(a.strata.levels[0], std::vector<std::string>{"arc"});
  EXPECT_EQ(a.strata.levels[1], std::vector<std::string>{"path"});
  EXPECT_EQ(a.strata.levels[2], std::vector<std::string>{"shortestpath"});
  EXPECT_LT(a.scc_of.at("arc"), a.scc_of.at("path"));
  EXPECT_LT(a.scc_of.at("path"), a.scc_of.at("shortestpath"));
}

TEST(analyze, rule_kinds_exit_recursive_exit) {
  AnalysisResult a = analyze(parse_ok(kPost));
  ASSERT_EQ(a.strata.rule_kinds.size(), 3u);
  EXPECT_EQ(a.strata.rule_kinds[0], RuleKind::exit);
  EXPECT_EQ(a.strata.rule_kinds[1], RuleKind::recursive);
  EXPECT_EQ(a.strata.rule_kinds[2], RuleKind::exit);
}

TEST(analyze, extensional_and_intensional_sets) {
  AnalysisResult a = analyze(parse_ok(std::string("arc(a, b, 1).\n") + kPost));
  EXPECT_EQ(a.extensional, std::set<std::string>{"arc"});
  EXPECT_EQ(a.intensional, (std::set<std::string>{"path", "shortestpath"}));
  EXPECT_EQ(a.arities.at("arc"), 3u);
  EXPECT_EQ(a.arities.at("shortestpath"), 3u);
}

TEST(analyze, post_constraint_resolves_against_body_atom) {
  AnalysisResult a = analyze(parse_ok(kPost));
  ASSERT_EQ(a.extrema.size(), 1u);
  const ResolvedExtrema& r = a.extrema[0];
  EXPECT_EQ(r.rule_index, 2u);
  EXPECT_FALSE(r.pushed);
  EXPECT_EQ(r.constraint.target, "path");
  EXPECT_EQ(r.constraint.group_positions, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.constraint.cost_position, 2u);
  EXPECT_EQ(r.constraint.kind, ExtremaKind::min);
}

TEST(analyze, pushed_constraint_resolves_against_head) {
  AnalysisResult a = analyze(parse_ok(kPushed));
  ASSERT_TRUE(a.ok()) << render_diagnostics(a.diagnostics);
  ASSERT_EQ(a.extrema.size(), 1u);
  const ResolvedExtrema& r = a.extrema[0];
  EXPECT_EQ(r.rule_index, 1u);
  EXPECT_TRUE(r.pushed);
  EXPECT_EQ(r.constraint.target, "path");
  ASSERT_NE(a.find_extrema(1, 3), nullptr);
  EXPECT_EQ(a.find_extrema(0, 0), nullptr);
}

TEST(analyze, negation_in_recursion_is_unstratifiable) {
  StratifyResult s = stratify(parse_ok("q(a).\np(X) :- q(X), not p(X).\n"));
  ASSERT_FALSE(s.ok());
  EXPECT_EQ(s.diagnostics[0].code, DiagCode::unstratifiable_negation);
}

TEST(analyze, stratified_negation_is_accepted) {
  StratifyResult s = stratify(parse_ok(
      "arc(a, b, 1).\n"
      "path(X, Y, D) :- arc(X, Y, D).\n"
      "betterpath(X, Y, D) :- path(X, Y, D), path(X, Y, Dxy), Dxy < D.\n"
      "shortestpath(X, Y, D) :- path(X, Y, D), not betterpath(X, Y, D).\n"));
  EXPECT_TRUE(s.ok()) << render_diagnostics(s.diagnostics);
}

TEST(analyze, unpushed_extrema_inside_recursion_is_rejected) {
  AnalysisResult a = analyze(parse_ok(
      "p(a, 1).\n"
      "p(X, D) :- p(X, D0), D = D0 + 1, is_min((X), D0).\n"));
  ASSERT_FALSE(a.ok());
  EXPECT_EQ(a.diagnostics[0].code, DiagCode::unpushed_extrema_in_recursion);
}

TEST(analyze, unresolvable_extrema_is_invalid) {
  AnalysisResult a = analyze(parse_ok(
      "q(a).\nr(1).\n"
      "p(X) :- q(X), r(D), D > 0, is_min((X), D).\n"));
  ASSERT_FALSE(a.ok());
  EXPECT_EQ(a.diagnostics[0].code, DiagCode::invalid_extrema);
}

TEST(analyze, multiple_extrema_per_rule_rejected) {
  AnalysisResult a = analyze(parse_ok(
      "q(a, 1).\n"
      "p(X, D) :- q(X, D), is_min((X), D), is_max((X), D).\n"));
  ASSERT_FALSE(a.ok());
  EXPECT_EQ(a.diagnostics[0].code, DiagCode::invalid_extrema);
}

TEST(classify_rules, fact_only_program_has_no_kinds) {
  EXPECT_TRUE(classify_rules(parse_ok("arc(a, b, 1).\n")).empty());
}

TEST(classify_rules, mutual_recursion_marks_both_rules) {
  std::vector<RuleKind> kinds = classify_rules(parse_ok(
      "e(a).\n"
      "p(X) :- e(X).\n"
      "p(X) :- q(X).\n"
      "q(X) :- p(X).\n"));
  ASSERT_EQ(kinds.size(), 3u);
  EXPECT_EQ(kinds[0], RuleKind::exit);
  EXPECT_EQ(kinds[1], RuleKind::recursive);
  EXPECT_EQ(kinds[2], RuleKind::recursive);
}

TEST(analyze, rule_order_does_not_change_strata) {
  const char* reordered =
      "shortestpath(X, Y, D) :- path(X, Y, D), X = a, is_min((X, Y), D).\n"
      "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy.\n"
      "path(X, Y, D) :- arc(X, Y, D).\n";
  AnalysisResult a = analyze(parse_ok(kPost));
  AnalysisResult b = analyze(parse_ok(reordered));
  EXPECT_EQ(a.strata.levels, b.strata.levels);
  EXPECT_EQ(b.strata.rule_kinds,
            (std::vector<RuleKind>{RuleKind::exit, RuleKind::recursive, RuleKind::exit}));
}

TEST(stratify, pushed_program_is_accepted) {
  StratifyResult s = stratify(parse_ok(kPushed));
  ASSERT_TRUE(s.ok()) << render_diagnostics(s.diagnostics);
  EXPECT_EQ(s.strata->levels.size(), 3u);
}
