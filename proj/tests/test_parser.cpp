#include <gtest/gtest.h>

#include <string>
#include <variant>

#include "premlog/ast.hpp"
#include "premlog/csv.hpp"
#include "premlog/format.hpp"
#include "premlog/parser.hpp"

using namespace premlog;

namespace {

Program parse_ok(const std::string& text) {
  ParseResult pr = parse_program(text);
  EXPECT_TRUE(pr.ok()) << render_diagnostics(pr.diagnostics);
  return std::move(*pr.program);
}

const char* kR1 =
    "path(X, Y, D) :- arc(X, Y, D).\n"
    "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy.\n"
    "shortestpath(X, Y, D) :- path(X, Y, D), X = a, is_min((X, Y), D).\n";

const char* kR2 =
    "path(X, Y, D) :- arc(X, Y, D).\n"
    "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy, is_min((X, Y), D).\n"
    "shortestpath(X, Y, D) :- path(X, Y, D), X = a.\n";

}  // namespace

TEST(parse, recursive_rule_with_pushed_extrema) {
  Program p = parse_ok(
      "path(X, Y, D) :- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy, is_min((X, Y), D).\n");
  ASSERT_EQ(p.rules.size(), 1u);
  const Rule& r = p.rules[0];
  EXPECT_EQ(r.head.pred, "path");
  ASSERT_EQ(r.body.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<Atom>(r.body[0]));
  EXPECT_TRUE(std::holds_alternative<Atom>(r.body[1]));
  ASSERT_TRUE(std::holds_alternative<Binding>(r.body[2]));
  const Binding& b = std::get<Binding>(r.body[2]);
  EXPECT_EQ(b.var, "D");
  EXPECT_EQ(b.expr.op, ArithExpr::Op::add);
  ASSERT_TRUE(std::holds_alternative<ExtremaLiteral>(r.body[3]));
  const ExtremaLiteral& e = std::get<ExtremaLiteral>(r.body[3]);
  EXPECT_EQ(e.kind, ExtremaKind::min);
  EXPECT_EQ(e.group_vars, (std::vector<std::string>{"X", "Y"}));
  EXPECT_EQ(e.cost_var, "D");
}

TEST(parse, empty_input_is_empty_program) {
  Program p = parse_ok("");
  EXPECT_TRUE(p.rules.empty());
  EXPECT_TRUE(p.facts.empty());
}

TEST(parse, unsafe_rule_diagnostic) {
  ParseResult pr = parse_program("p(X) :- q(Y).\n");
  ASSERT_FALSE(pr.diagnostics.empty());
  EXPECT_EQ(pr.diagnostics[0].code, DiagCode::unsafe_rule);
}

TEST(parse, facts_and_negation_and_comparison) {
  Program p = parse_ok(
      "arc(a, b, 1).\n"
      "betterpath(X, Y, D) :- path(X, Y, D), path(X, Y, Dxy), Dxy < D.\n"
      "shortestpath(X, Y, D) :- path(X, Y, D), not betterpath(X, Y, D).\n");
  ASSERT_NE(p.facts.find("arc"), p.facts.end());
  EXPECT_EQ(p.facts.at("arc").size(), 1u);
  ASSERT_EQ(p.rules.size(), 2u);
  ASSERT_TRUE(std::holds_alternative<Comparison>(p.rules[0].body[2]));
  EXPECT_EQ(std::get<Comparison>(p.rules[0].body[2]).op, CmpOp::lt);
  ASSERT_TRUE(std::holds_alternative<Negation>(p.rules[1].body[1]));
  EXPECT_EQ(std::get<Negation>(p.rules[1].body[1]).atom.pred, "betterpath");
}

TEST(parse, decimal_literal_is_exact_rational) {
  Program p = parse_ok("p(X, D2) :- p(X, D), D2 = 3.14 * D.\n");
  const Binding& b = std::get<Binding>(p.rules[0].body[1]);
  ASSERT_EQ(b.expr.op, ArithExpr::Op::mul);
  ASSERT_EQ(b.expr.lhs->op, ArithExpr::Op::constant);
  EXPECT_EQ(b.expr.lhs->val.num(), Rational(157, 50));
}

TEST(parse, diagnostics_carry_spans_within_bounds) {
  std::string text = "p(X) :- q(X), r(\n";
  ParseResult pr = parse_program(text);
  ASSERT_FALSE(pr.diagnostics.empty());
  for (const Diagnostic& d : pr.diagnostics) {
    EXPECT_LE(d.span.start, d.span.end);
    EXPECT_LE(d.span.end, text.size());
  }
}

TEST(parse, syntax_error_reports_code) {
  ParseResult pr = parse_program("p(X :- q(X).\n");
  ASSERT_FALSE(pr.ok());
  bool has_syntax = false;
  for (const Diagnostic& d : pr.diagnostics)
    if (d.code == DiagCode::syntax_error || d.code == DiagCode::lexical_error) has_syntax = true;
  EXPECT_TRUE(has_syntax);
}

TEST(parse, arity_conflict_detected) {
  ParseResult pr = parse_program("p(a).\np(a, b).\n");
  ASSERT_FALSE(pr.ok());
  EXPECT_EQ(pr.diagnostics[0].code, DiagCode::arity_mismatch);
}

TEST(format, empty_program_is_empty_text) {
  EXPECT_EQ(format_program(Program{}), "");
}

TEST(format, canonical_three_lines_for_r2) {
  Program p = parse_ok(kR2);
  EXPECT_EQ(format_program(p), kR2);
}

TEST(format, fact_formatting) {
  Program p = parse_ok("arc(a, b, 1).\n");
  EXPECT_EQ(format_program(p), "arc(a, b, 1).\n");
}

TEST(format, roundtrip_structural_equality) {
  for (const char* text : {kR1, kR2}) {
    Program p = parse_ok(text);
    Program q = parse_ok(format_program(p));
    EXPECT_EQ(p, q);
  }
  Program odd = parse_ok(
      "q(a, 3.14).\n"
      "p(X, D2) :- q(X, D), D2 = (D + 1) * 2 - 6 / 3, D2 > 0, not r(X), is_max((X), D2).\n"
      "r(b).\n");
  EXPECT_EQ(parse_ok(format_program(odd)), odd);
}

TEST(format, determinism_byte_for_byte) {
  Program p1 = parse_ok(kR1);
  Program p2 = parse_ok(kR1);
  EXPECT_EQ(format_program(p1), format_program(p2));
}

TEST(load_facts, parses_rows) {
  CsvResult r = load_facts("arc", 3, "a,b,1\nb,c,2");
  ASSERT_TRUE(r.ok()) << render_diagnostics(r.diagnostics);
  EXPECT_EQ(r.relation->size(), 2u);
  EXPECT_TRUE(r.relation->contains(
      Tuple{Value::symbol("a"), Value::symbol("b"), Value::number(Rational(1))}));
}

TEST(load_facts, duplicate_rows_collapse) {
  CsvResult r = load_facts("arc", 3, "a,b,1\na,b,1\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.relation->size(), 1u);
}

TEST(load_facts, arity_mismatch_reports_row) {
  CsvResult r = load_facts("arc", 3, "a,b\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].code, DiagCode::csv_error);
  EXPECT_NE(r.diagnostics[0].message.find("1"), std::string::npos);
}

TEST(load_facts, numeric_shaped_fields_become_numbers) {
  CsvResult r = load_facts("p", 2, "x,0.5\n");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.relation->contains(Tuple{Value::symbol("x"), Value::number(Rational(1, 2))}));
}
