#include <gtest/gtest.h>

#include <string>

#include "premlog/analysis.hpp"
#include "premlog/format.hpp"
#include "premlog/parser.hpp"
#include "premlog/rewrite.hpp"

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

ExtremaConstraint post_constraint(const Program& p) {
  std::vector<ResolvedExtrema> sites = find_extrema_sites(p);
  EXPECT_EQ(sites.size(), 1u);
  return sites[0].constraint;
}

}  // namespace

TEST(push_extrema, post_form_becomes_pushed_form) {
  Program p = parse_ok(kPost);
  Program out = push_extrema(post_constraint(p), p);
  EXPECT_EQ(out, parse_ok(kPushed));
  EXPECT_EQ(format_program(out), kPushed);
}

TEST(push_extrema, non_recursive_target_is_identity) {
  Program p = parse_ok(
      "q(a, 1).\nq(a, 3).\n"
      "best(X, D) :- q(X, D), is_min((X), D).\n");
  Program out = push_extrema(post_constraint(p), p);
  EXPECT_EQ(out, p);
}

TEST(push_extrema, missing_constraint_is_inapplicable) {
  Program p = parse_ok(kPushed);  // only a pushed site, no post-constraint
  ExtremaConstraint gamma = find_extrema_sites(p)[0].constraint;
  try {
    push_extrema(gamma, p);
    FAIL() << "expected rewrite_inapplicable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rewrite_inapplicable);
  }
}

TEST(push_extrema, facts_are_untouched) {
  Program p = parse_ok(std::string("arc(a, b, 1).\narc(b, c, 2).\n") + kPost);
  Program out = push_extrema(post_constraint(p), p);
  EXPECT_EQ(out.facts, p.facts);
}

TEST(transfer_out, pushed_form_becomes_post_form) {
  Program p = parse_ok(kPushed);
  Program out = transfer_out(p);
  EXPECT_EQ(out, parse_ok(kPost));
  EXPECT_EQ(format_program(out), kPost);
}

TEST(transfer_out, without_pushed_site_is_inapplicable) {
  try {
    transfer_out(parse_ok(kPost));
    FAIL() << "expected rewrite_inapplicable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rewrite_inapplicable);
  }
}

TEST(transfer_out, roundtrip_restores_original) {
  Program p = parse_ok(kPost);
  EXPECT_EQ(transfer_out(push_extrema(post_constraint(p), p)), p);
}

TEST(negation_encoding, post_constraint_becomes_stratified_negation) {
  Program p = parse_ok(kPost);
  Program out = negation_encoding(post_constraint(p), p);
  const char* expected =
      "path(X, Y, D) :- arc(X, Y, D).\n"
      "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy.\n"
      "shortestpath(X, Y, D) :- path(X, Y, D), X = a, not __better_path(X, Y, D).\n"
      "__better_path(X, Y, D) :- path(X, Y, D2), path(X, Y, D), D2 < D.\n";
  EXPECT_EQ(format_program(out), expected);
  for (const Rule& r : out.rules)
    for (const BodyLiteral& lit : r.body)
      EXPECT_FALSE(std::holds_alternative<ExtremaLiteral>(lit));
  EXPECT_TRUE(stratify(out).ok());
}

TEST(negation_encoding, max_flips_the_comparison) {
  Program p = parse_ok(
      "q(a, 1).\nq(a, 3).\n"
      "best(X, D) :- q(X, D), is_max((X), D).\n");
  Program out = negation_encoding(post_constraint(p), p);
  ASSERT_EQ(out.rules.size(), 2u);
  const Rule& aux = out.rules[1];
  EXPECT_EQ(aux.head.pred, "__better_q");
  ASSERT_TRUE(std::holds_alternative<Comparison>(aux.body[2]));
  EXPECT_EQ(std::get<Comparison>(aux.body[2]).op, CmpOp::gt);
}

TEST(negation_encoding, extrema_free_program_is_identity) {
  Program p = parse_ok("q(a).\np(X) :- q(X).\n");
  ExtremaConstraint gamma;
  gamma.target = "p";
  gamma.cost_position = 0;
  EXPECT_EQ(negation_encoding(gamma, p), p);
}

TEST(negation_encoding, aux_predicate_collision_is_inapplicable) {
  Program p = parse_ok(std::string("__better_path(a, b, 1).\n") + kPost);
  try {
    negation_encoding(post_constraint(p), p);
    FAIL() << "expected rewrite_inapplicable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rewrite_inapplicable);
  }
}

TEST(negation_encoding, pushed_site_is_inapplicable) {
  Program p = parse_ok(kPushed);
  try {
    negation_encoding(find_extrema_sites(p)[0].constraint, p);
    FAIL() << "expected rewrite_inapplicable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rewrite_inapplicable);
  }
}

TEST(push_equality, specializes_exit_rule_and_drops_equality) {
  Program p = parse_ok(kPushed);
  Program out = push_equality("X", Term::constant(Value::symbol("a")), p);
  const char* expected =
      "path(a, Y, D) :- arc(a, Y, D).\n"
      "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy, is_min((X, Y), D).\n"
      "shortestpath(X, Y, D) :- path(X, Y, D).\n";
  EXPECT_EQ(format_program(out), expected);
}

TEST(push_equality, recomputed_column_is_refused) {
  Program p = parse_ok(
      "path(X, Y, D) :- arc(X, Y, D).\n"
      "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy.\n"
      "reach5(X, Y, D) :- path(X, Y, D), D = 5.\n");
  try {
    push_equality("D", Term::constant(Value::number(Rational(5))), p);
    FAIL() << "expected rewrite_inapplicable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rewrite_inapplicable);
  }
}

TEST(push_equality, missing_equality_is_inapplicable) {
  Program p = parse_ok(kPushed);
  try {
    push_equality("X", Term::constant(Value::symbol("zzz")), p);
    FAIL() << "expected rewrite_inapplicable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rewrite_inapplicable);
  }
}

TEST(push_equality, non_constant_rhs_is_invalid_argument) {
  Program p = parse_ok(kPushed);
  try {
    push_equality("X", Term::variable("Y"), p);
    FAIL() << "expected invalid_argument";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

TEST(make_rewrite_plan, aligns_edits_insertions_and_deletions) {
  Program before = parse_ok(kPost);
  Program after = push_extrema(post_constraint(before), before);
  RewritePlan plan =
      make_rewrite_plan(RewriteKind::push, post_constraint(before), before, after, true);
  EXPECT_EQ(plan.kind, RewriteKind::push);
  EXPECT_TRUE(plan.pushed);
  ASSERT_EQ(plan.affected.size(), 2u);  // recursive rule edited, final rule edited
  for (const auto& [b, a] : plan.affected) {
    EXPECT_TRUE(b.has_value());
    EXPECT_TRUE(a.has_value());
  }

  Program enc = negation_encoding(post_constraint(before), before);
  RewritePlan plan2 =
      make_rewrite_plan(RewriteKind::negation, post_constraint(before), before, enc, false);
  bool has_insertion = false;
  for (const auto& [b, a] : plan2.affected)
    if (!b.has_value() && a.has_value()) has_insertion = true;
  EXPECT_TRUE(has_insertion);
}
