#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "premlog/analysis.hpp"
#include "premlog/corpus.hpp"
#include "premlog/csv.hpp"
#include "premlog/eval.hpp"
#include "premlog/parser.hpp"
#include "premlog/premcheck.hpp"
#include "premlog/reference.hpp"
#include "premlog/rewrite.hpp"

using namespace premlog;

namespace {

std::string corpus_dir() { return PREMLOG_CORPUS_DIR; }

std::vector<Fixture> fixtures() { return load_manifest(corpus_dir() + "/manifest.json"); }

Program parse_ok(const std::string& text) {
  ParseResult pr = parse_program(text);
  EXPECT_TRUE(pr.ok()) << render_diagnostics(pr.diagnostics);
  return std::move(*pr.program);
}

// Materializes a fixture: parse the program, bind csv facts, run the generator.
Program materialize(const Fixture& f) {
  Program p = parse_ok(f.program_text);
  AnalysisResult an = analyze(p);
  for (const auto& [pred, file] : f.facts) {
    CsvResult r = load_facts(pred, an.arities.at(pred),
                             detail::read_text_file(corpus_dir() + "/" + file));
    EXPECT_TRUE(r.ok()) << f.name << ": " << render_diagnostics(r.diagnostics);
    for (const Tuple& t : *r.relation) p.facts[pred].insert(t);
  }
  if (f.generator)
    p.facts[*f.generated_pred] =
        generate_graph(f.generator->nodes, f.generator->density, f.generator->cost_lo,
                       f.generator->cost_hi, f.generator->seed, f.generator->acyclic);
  return p;
}

// The fixture's pushed variant: unchanged when a pushed site exists, else the
// unique post-constraint pushed into the recursion.
Program pushed_variant(Program p) {
  std::vector<ResolvedExtrema> sites = find_extrema_sites(p);
  for (const ResolvedExtrema& s : sites)
    if (s.pushed) return p;
  EXPECT_FALSE(sites.empty());
  return push_extrema(sites.front().constraint, p);
}

const Fixture& by_name(const std::vector<Fixture>& all, const std::string& name) {
  for (const Fixture& f : all)
    if (f.name == name) return f;
  ADD_FAILURE() << "no fixture named " << name;
  static Fixture nil;
  return nil;
}

}  // namespace

TEST(manifest, loads_with_unique_names) {
  std::vector<Fixture> all = fixtures();
  EXPECT_GE(all.size(), 16u);
  std::set<std::string> names;
  for (const Fixture& f : all) {
    EXPECT_TRUE(names.insert(f.name).second) << "duplicate " << f.name;
    EXPECT_FALSE(f.program_text.empty()) << f.name;
  }
}

TEST(manifest, missing_file_is_io_error) {
  try {
    load_manifest(corpus_dir() + "/no_such_manifest.json");
    FAIL() << "expected io_error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
}

TEST(manifest, every_fixture_parses_as_designed) {
  for (const Fixture& f : fixtures()) {
    ParseResult pr = parse_program(f.program_text);
    if (f.name == "unsafe") {
      ASSERT_FALSE(pr.ok());
      EXPECT_EQ(pr.diagnostics[0].code, DiagCode::unsafe_rule);
    } else {
      EXPECT_TRUE(pr.ok()) << f.name << ": " << render_diagnostics(pr.diagnostics);
    }
  }
}

TEST(manifest, tags_hold_for_every_fixture) {
  for (const Fixture& f : fixtures()) {
    if (f.name == "unsafe") continue;  // does not parse; covered above
    SCOPED_TRACE(f.name);
    Program p = materialize(f);

    if (has_tag(f, "prem-holds") || has_tag(f, "iprem") || has_tag(f, "rprem") ||
        has_tag(f, "non-prem")) {
      EvalOptions opts;
      opts.max_iterations = 30;  // keep divergent fixtures cheap; partial is fine
      PremReport r = check_run(pushed_variant(p), opts);
      if (has_tag(f, "prem-holds")) EXPECT_TRUE(r.holds);
      if (has_tag(f, "non-prem")) {
        EXPECT_FALSE(r.holds);
        EXPECT_TRUE(r.violated_at.has_value());
      }
      if (has_tag(f, "iprem")) EXPECT_EQ(r.intrinsic_fraction, Rational(1));
      if (has_tag(f, "rprem")) {
        EXPECT_EQ(r.radical_fraction, Rational(1));
        EXPECT_LT(r.intrinsic_fraction, Rational(1));
      }
    }

    if (has_tag(f, "diverges-unpushed")) {
      EvalOptions off;
      off.push_enabled = false;
      off.max_iterations = 30;
      EXPECT_EQ(evaluate(p, off).status, TermStatus::iteration_cap);
      EvalOptions on;
      on.max_iterations = 100000;
      EXPECT_EQ(evaluate(pushed_variant(p), on).status, TermStatus::fixpoint);
    }
  }
}

TEST(manifest, non_term_max_diverges_even_when_pushed) {
  Program p = materialize(by_name(fixtures(), "non_term_max"));
  EvalOptions opts;
  opts.max_iterations = 30;
  EXPECT_EQ(evaluate(p, opts).status, TermStatus::iteration_cap);
  opts.push_enabled = false;
  EXPECT_EQ(evaluate(p, opts).status, TermStatus::iteration_cap);
}

TEST(splitmix64, matches_the_published_vector) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFULL);
}

TEST(generate_graph, single_node_has_no_arcs) {
  EXPECT_TRUE(generate_graph(1, Rational(1), Rational(1), Rational(9), 7, false).empty());
  EXPECT_TRUE(generate_graph(1, Rational(1), Rational(1), Rational(9), 7, true).empty());
}

TEST(generate_graph, same_seed_same_graph) {
  Relation a = generate_graph(20, Rational(1, 4), Rational(1), Rational(20), 42, false);
  Relation b = generate_graph(20, Rational(1, 4), Rational(1), Rational(20), 42, false);
  EXPECT_EQ(a, b);
}

TEST(generate_graph, full_density_yields_the_complete_graph) {
  EXPECT_EQ(generate_graph(5, Rational(1), Rational(3), Rational(3), 9, false).size(), 20u);
  Relation dag = generate_graph(5, Rational(1), Rational(3), Rational(3), 9, true);
  EXPECT_EQ(dag.size(), 10u);
  for (const Tuple& t : dag) EXPECT_EQ(t[2], Value::number(Rational(3)));
}

TEST(generate_graph, acyclic_arcs_point_to_higher_indices) {
  Relation dag = generate_graph(30, Rational(1, 2), Rational(1), Rational(9), 5, true);
  ASSERT_FALSE(dag.empty());
  for (const Tuple& t : dag) {
    int from = std::stoi(t[0].symbol_name().substr(1));
    int to = std::stoi(t[1].symbol_name().substr(1));
    EXPECT_LT(from, to);
  }
}

TEST(generate_graph, costs_stay_inside_the_bounds) {
  Relation g = generate_graph(15, Rational(1, 2), Rational(3), Rational(7), 11, false);
  ASSERT_FALSE(g.empty());
  for (const Tuple& t : g) {
    EXPECT_FALSE(t[2].num() < Rational(3));
    EXPECT_FALSE(Rational(7) < t[2].num());
    EXPECT_TRUE(t[2].num().is_integer());
  }
}

TEST(generate_graph, rejects_invalid_parameters) {
  auto expect_invalid = [](auto&& fn) {
    try {
      fn();
      FAIL() << "expected invalid_argument";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
    }
  };
  expect_invalid([] { generate_graph(0, Rational(1, 2), Rational(1), Rational(9), 0, false); });
  expect_invalid([] { generate_graph(5, Rational(0), Rational(1), Rational(9), 0, false); });
  expect_invalid([] { generate_graph(5, Rational(3, 2), Rational(1), Rational(9), 0, false); });
  expect_invalid([] { generate_graph(5, Rational(1, 2), Rational(0), Rational(9), 0, false); });
  expect_invalid([] { generate_graph(5, Rational(1, 2), Rational(9), Rational(1), 0, false); });
  expect_invalid([] { generate_graph(5, Rational(1, 2), Rational(1, 2), Rational(9), 0, false); });
}

TEST(generate_graph, seed_77_golden_graph) {
  Relation g = generate_graph(8, Rational(1, 2), Rational(1), Rational(9), 77, false);
  EXPECT_EQ(g.size(), 30u);
  EXPECT_TRUE(g.contains(
      Tuple{Value::symbol("n0"), Value::symbol("n1"), Value::number(Rational(1))}));
  EXPECT_TRUE(g.contains(
      Tuple{Value::symbol("n7"), Value::symbol("n5"), Value::number(Rational(1))}));
  EXPECT_TRUE(g.contains(
      Tuple{Value::symbol("n0"), Value::symbol("n5"), Value::number(Rational(2))}));
}

TEST(generate_graph, generated_dag_agrees_with_the_oracle) {
  Relation arcs = generate_graph(50, Rational(1, 4), Rational(1), Rational(9), 123, true);
  Program p = parse_ok(detail::read_text_file(corpus_dir() + "/sp_unpushed.dl"));
  p.facts["arc"] = arcs;
  OracleResult r = oracle_post_constraint(p, 100);
  ASSERT_TRUE(r.ok());
  std::set<std::string> all;
  for (int i = 0; i < 50; ++i) all.insert("n" + std::to_string(i));
  EXPECT_EQ(*r.relation, oracle_shortest_paths(arcs, all));
}

TEST(generate_graph, seed_77_graph_is_cyclic_so_unpushed_evaluation_caps) {
  std::vector<Fixture> all = fixtures();
  const Fixture& f = by_name(all, "diverge_rand8");
  ASSERT_TRUE(f.generator.has_value());
  EXPECT_EQ(*f.generated_pred, "arc");
  EXPECT_EQ(f.generator->seed, 77u);
  EXPECT_FALSE(f.generator->acyclic);
  Program p = materialize(f);
  EvalOptions opts;
  opts.push_enabled = false;
  opts.max_iterations = 30;
  EXPECT_EQ(evaluate(p, opts).status, TermStatus::iteration_cap);
}
