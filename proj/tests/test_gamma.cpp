#include <gtest/gtest.h>

#include <random>

#include "premlog/errors.hpp"
#include "premlog/gamma.hpp"

using namespace premlog;

namespace {

Value sym(const char* s) { return Value::symbol(s); }
Value num(std::int64_t n) { return Value::number(Rational(n)); }

ExtremaConstraint min_xy() {
  ExtremaConstraint g;
  g.kind = ExtremaKind::min;
  g.target = "path";
  g.group_by = {"X", "Y"};
  g.cost = "D";
  g.group_positions = {0, 1};
  g.cost_position = 2;
  return g;
}

ExtremaConstraint global_min1() {
  ExtremaConstraint g;
  g.kind = ExtremaKind::min;
  g.target = "p";
  g.group_by = {};
  g.cost = "D";
  g.group_positions = {};
  g.cost_position = 0;
  return g;
}

Relation rel3(std::initializer_list<std::tuple<const char*, const char*, std::int64_t>> rows) {
  Relation r;
  for (auto& [a, b, d] : rows) r.insert(Tuple{sym(a), sym(b), num(d)});
  return r;
}

}  // namespace

TEST(apply_gamma, per_group_min) {
  Relation in = rel3({{"a", "b", 3}, {"a", "b", 5}, {"a", "c", 2}});
  Relation expect = rel3({{"a", "b", 3}, {"a", "c", 2}});
  EXPECT_EQ(apply_gamma(min_xy(), in), expect);
}

TEST(apply_gamma, empty_relation) {
  Relation in;
  EXPECT_EQ(apply_gamma(min_xy(), in), Relation());
}

TEST(apply_gamma, global_min_with_empty_group_by) {
  Relation in;
  in.insert(Tuple{num(3)});
  in.insert(Tuple{num(7)});
  in.insert(Tuple{num(3)});  // set semantics collapses the tie before gamma
  Relation expect;
  expect.insert(Tuple{num(3)});
  EXPECT_EQ(apply_gamma(global_min1(), in), expect);
}

TEST(apply_gamma, ties_keep_all_minimal_tuples) {
  // Two distinct tuples sharing group and minimal cost both survive.
  ExtremaConstraint g;
  g.kind = ExtremaKind::min;
  g.target = "p";
  g.group_by = {"X"};
  g.cost = "D";
  g.group_positions = {0};
  g.cost_position = 2;
  Relation in;
  in.insert(Tuple{sym("a"), sym("u"), num(1)});
  in.insert(Tuple{sym("a"), sym("v"), num(1)});
  in.insert(Tuple{sym("a"), sym("w"), num(2)});
  Relation expect;
  expect.insert(Tuple{sym("a"), sym("u"), num(1)});
  expect.insert(Tuple{sym("a"), sym("v"), num(1)});
  EXPECT_EQ(apply_gamma(g, in), expect);
}

TEST(apply_gamma, max_variant) {
  ExtremaConstraint g = min_xy();
  g.kind = ExtremaKind::max;
  Relation in = rel3({{"a", "b", 3}, {"a", "b", 5}, {"a", "c", 2}});
  Relation expect = rel3({{"a", "b", 5}, {"a", "c", 2}});
  EXPECT_EQ(apply_gamma(g, in), expect);
}

TEST(apply_gamma, arity_mismatch_rejected) {
  Relation in;
  in.insert(Tuple{sym("a"), num(1)});  // arity 2, constraint expects >= 3
  try {
    apply_gamma(min_xy(), in);
    FAIL() << "expected arity_mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::arity_mismatch);
  }
}

TEST(apply_gamma, symbol_cost_rejected) {
  Relation in;
  in.insert(Tuple{sym("a"), sym("b"), sym("notanumber")});
  EXPECT_THROW(apply_gamma(min_xy(), in), Error);
}

TEST(gamma_on_interpretation, passes_through_other_predicates) {
  Interpretation i;
  i.data()["path"] = rel3({{"a", "b", 3}, {"a", "b", 5}});
  i.data()["arc"] = rel3({{"x", "y", 9}});
  Interpretation out = gamma_on_interpretation(min_xy(), i);
  EXPECT_EQ(*out.find("path"), rel3({{"a", "b", 3}}));
  EXPECT_EQ(*out.find("arc"), rel3({{"x", "y", 9}}));
}

TEST(gamma_on_interpretation, missing_target_becomes_empty) {
  Interpretation i;
  i.data()["arc"] = rel3({{"x", "y", 9}});
  Interpretation out = gamma_on_interpretation(min_xy(), i);
  EXPECT_EQ(out, i);  // equality ignores empty relations
  const Relation* tgt = out.find("path");
  if (tgt) EXPECT_TRUE(tgt->empty());
}

TEST(gamma_on_interpretation, idempotent) {
  Interpretation i;
  i.data()["path"] = rel3({{"a", "b", 3}, {"a", "b", 5}});
  Interpretation once = gamma_on_interpretation(min_xy(), i);
  Interpretation twice = gamma_on_interpretation(min_xy(), once);
  EXPECT_EQ(once, twice);
}

TEST(gamma_properties, contraction_idempotence_coverage_duality) {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 200; ++it) {
    Relation in;
    std::size_t rows = rng() % 20;
    for (std::size_t r = 0; r < rows; ++r) {
      const char* g1 = (rng() % 3 == 0) ? "a" : (rng() % 2 ? "b" : "c");
      in.insert(Tuple{sym(g1), sym("t"), num(static_cast<std::int64_t>(rng() % 15) - 7)});
    }
    ExtremaConstraint g = min_xy();
    g.group_positions = {0};
    g.group_by = {"X"};
    Relation out = apply_gamma(g, in);
    // contraction
    for (const Tuple& t : out) EXPECT_TRUE(in.contains(t));
    // idempotence
    EXPECT_EQ(apply_gamma(g, out), out);
    // group coverage
    std::set<std::string> groups_in, groups_out;
    for (const Tuple& t : in) groups_in.insert(t[0].to_string());
    for (const Tuple& t : out) groups_out.insert(t[0].to_string());
    EXPECT_EQ(groups_in, groups_out);
    // min/max duality on negated costs
    ExtremaConstraint gmax = g;
    gmax.kind = ExtremaKind::max;
    Relation negated;
    for (const Tuple& t : in)
      negated.insert(Tuple{t[0], t[1], Value::number(Rational(0) - t[2].num())});
    Relation max_of_neg = apply_gamma(gmax, negated);
    Relation neg_of_min;
    for (const Tuple& t : out)
      neg_of_min.insert(Tuple{t[0], t[1], Value::number(Rational(0) - t[2].num())});
    EXPECT_EQ(max_of_neg, neg_of_min);
  }
}
