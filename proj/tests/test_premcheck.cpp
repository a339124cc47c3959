#include <gtest/gtest.h>

#include <string>

#include "premlog/parser.hpp"
#include "premlog/premcheck.hpp"

using namespace premlog;

namespace {

Program parse_ok(const std::string& text) {
  ParseResult pr = parse_program(text);
  EXPECT_TRUE(pr.ok()) << render_diagnostics(pr.diagnostics);
  return std::move(*pr.program);
}

Value sym(const char* s) { return Value::symbol(s); }
Value num(long long n) { return Value::number(Rational(n)); }

const char* kNonPrem =
    "p(a, 1).\n"
    "p(a, 3).\n"
    "p(X, D2) :- p(X, D), D2 = 10 - D, is_min((X), D2).\n";

const char* kPushedSp =
    "arc(a, b, 1).\narc(b, c, 2).\narc(a, c, 5).\n"
    "path(X, Y, D) :- arc(X, Y, D).\n"
    "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy, is_min((X, Y), D).\n";

}  // namespace

TEST(check_step, detects_the_min_complement_violation) {
  Program p = parse_ok(kNonPrem);
  ExtremaConstraint gamma = find_extrema_sites(p)[0].constraint;
  Interpretation i;
  i.rel("p").insert(Tuple{sym("a"), num(1)});
  i.rel("p").insert(Tuple{sym("a"), num(3)});

  StepVerdict v = check_step(gamma, {p.rules[0]}, i, 1);
  EXPECT_FALSE(v.prem_holds);
  EXPECT_FALSE(v.iprem_holds);
  EXPECT_FALSE(v.rprem_holds);
  ASSERT_EQ(v.only_in_gamma_t_i.size(), 1u);
  EXPECT_EQ(v.only_in_gamma_t_i[0], (Tuple{sym("a"), num(7)}));
  ASSERT_EQ(v.only_in_gamma_t_gamma_i.size(), 1u);
  EXPECT_EQ(v.only_in_gamma_t_gamma_i[0], (Tuple{sym("a"), num(9)}));
  EXPECT_FALSE(v.truncated);
}

TEST(check_step, additive_costs_satisfy_prem_without_iprem) {
  Program p = parse_ok(
      "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy, is_min((X, Y), D).\n");
  ExtremaConstraint gamma = find_extrema_sites(p)[0].constraint;
  Interpretation i;
  i.rel("path").insert(Tuple{sym("a"), sym("b"), num(1)});
  i.rel("path").insert(Tuple{sym("a"), sym("b"), num(4)});
  i.rel("arc").insert(Tuple{sym("b"), sym("c"), num(2)});

  StepVerdict v = check_step(gamma, p.rules, i, 1);
  EXPECT_TRUE(v.prem_holds);
  EXPECT_FALSE(v.iprem_holds);  // T(I) still carries the beaten (a, c, 6)
  EXPECT_TRUE(v.rprem_holds);
  EXPECT_TRUE(v.only_in_gamma_t_i.empty());
}

TEST(check_step, cost_independent_rule_is_intrinsically_premappable) {
  Program p = parse_ok(
      "path(X, Y, D2) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D2 = 2 * Dzy, is_min((X, Y), D2).\n");
  ExtremaConstraint gamma = find_extrema_sites(p)[0].constraint;
  Interpretation i;
  i.rel("path").insert(Tuple{sym("a"), sym("b"), num(1)});
  i.rel("path").insert(Tuple{sym("a"), sym("b"), num(5)});
  i.rel("arc").insert(Tuple{sym("b"), sym("c"), num(2)});

  StepVerdict v = check_step(gamma, p.rules, i, 1);
  EXPECT_TRUE(v.prem_holds);
  EXPECT_TRUE(v.iprem_holds);
  EXPECT_TRUE(v.rprem_holds);
}

TEST(check_run, pushed_shortest_path_holds_on_every_step) {
  PremReport r = check_run(parse_ok(kPushedSp));
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.partial);
  EXPECT_FALSE(r.violated_at.has_value());
  ASSERT_FALSE(r.steps.empty());
  for (const StepVerdict& v : r.steps) EXPECT_TRUE(v.prem_holds);
  EXPECT_EQ(r.radical_fraction, Rational(1));
}

TEST(check_run, min_complement_violates_at_step_one) {
  PremReport r = check_run(parse_ok(kNonPrem));
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.violated_at.has_value());
  EXPECT_EQ(*r.violated_at, 1u);
  const StepVerdict& v = r.steps[0];
  ASSERT_EQ(v.only_in_gamma_t_i.size(), 1u);
  EXPECT_EQ(v.only_in_gamma_t_i[0], (Tuple{sym("a"), num(7)}));
  EXPECT_EQ(r.intrinsic_fraction, Rational(0));
}

TEST(check_run, nothing_pushed_is_an_error) {
  try {
    check_run(parse_ok("arc(a, b, 1).\n"));
    FAIL() << "expected unresolved_constraint";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unresolved_constraint);
  }
}

TEST(check_run, distinct_pushed_constraints_are_rejected) {
  Program p = parse_ok(
      "p(a, 1).\n"
      "p(X, D2) :- p(X, D), D2 = D + 1, is_min((X), D2).\n"
      "q(a, 1).\n"
      "q(X, D2) :- q(X, D), D2 = D + 1, is_max((X), D2).\n");
  try {
    check_run(p);
    FAIL() << "expected invalid_argument";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

TEST(check_run, capped_run_reports_partial_evidence) {
  Program p = parse_ok(
      "count(a, 0).\n"
      "count(X, D2) :- count(X, D), D2 = D + 1, is_max((X), D2).\n");
  EvalOptions opts;
  opts.max_iterations = 10;
  PremReport r = check_run(p, opts);
  EXPECT_TRUE(r.partial);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.radical_fraction, Rational(1));
  EXPECT_LT(r.intrinsic_fraction, Rational(1));
  EXPECT_FALSE(r.disclaimer.empty());
}

TEST(check_run, report_json_is_deterministic) {
  std::string a = prem_report_to_json(check_run(parse_ok(kPushedSp))).dump(2);
  std::string b = prem_report_to_json(check_run(parse_ok(kPushedSp))).dump(2);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("holds-on-this-run"), std::string::npos);
  EXPECT_NE(a.find("disclaimer"), std::string::npos);
}

TEST(check_run, violation_json_names_both_sides) {
  json obj = prem_report_to_json(check_run(parse_ok(kNonPrem)));
  EXPECT_EQ(obj["overall"], "violated-at-step-1");
  const json& cx = obj["steps"][0]["counterexamples"];
  ASSERT_EQ(cx["gamma_T_I"].size(), 1u);
  ASSERT_EQ(cx["gamma_T_gamma_I"].size(), 1u);
}

TEST(check_step, counterexample_lists_are_capped_and_flagged) {
  std::string text;
  for (int g = 1; g <= 15; ++g) {
    text += "p(g" + std::to_string(g) + ", 1).\n";
    text += "p(g" + std::to_string(g) + ", 3).\n";
  }
  text += "p(X, D2) :- p(X, D), D2 = 10 - D, is_min((X), D2).\n";
  Program p = parse_ok(text);
  ExtremaConstraint gamma = find_extrema_sites(p)[0].constraint;
  Interpretation i;
  for (const auto& [pred, rel] : p.facts) i.data()[pred] = rel;

  StepVerdict v = check_step(gamma, {p.rules[0]}, i, 1);
  EXPECT_FALSE(v.prem_holds);
  EXPECT_TRUE(v.truncated);
  EXPECT_EQ(v.only_in_gamma_t_i.size(), kCounterexampleCap);
}
