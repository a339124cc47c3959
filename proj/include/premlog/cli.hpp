#pragma once

#include <algorithm>
#include <chrono>
#include <exception>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "premlog/analysis.hpp"
#include "premlog/ast.hpp"
#include "premlog/corpus.hpp"
#include "premlog/csv.hpp"
#include "premlog/errors.hpp"
#include "premlog/eval.hpp"
#include "premlog/format.hpp"
#include "premlog/parser.hpp"
#include "premlog/premcheck.hpp"
#include "premlog/reference.hpp"
#include "premlog/rewrite.hpp"
#include "premlog/serialize.hpp"

namespace premlog::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;          // bad flags, unreadable files, inapplicable rewrites, runtime eval errors
inline constexpr int kExitParse = 2;          // program or CSV parse failure
inline constexpr int kExitStratification = 3; // stratification / safety violations
inline constexpr int kExitCap = 4;            // iteration cap reached, --strict
inline constexpr int kExitViolation = 5;      // PreM violated (--strict) or nonempty diff

struct CliConfig {
  std::string subcommand;  // run | rewrite | check-prem | diff
  std::string program_path;
  std::vector<std::pair<std::string, std::string>> facts;  // (predicate, csv path)
  std::string engine = "seminaive";
  bool push = true;
  std::size_t max_iters = 100000;
  std::string format = "table";  // json | csv | table
  bool strict = false;
  std::vector<std::string> queries;
  std::string mode;        // rewrite: push | unpush | negation | equality
  std::string trace_path;  // dump FixpointTrace JSON here when nonempty
};

namespace detail {

struct LoadedProgram {
  Program program;
  AnalysisResult analysis;
};

// Parse-shaped problems (bad tokens, bad syntax, bad CSV) exit 2; semantic
// problems in a structurally valid program (safety, arity conflicts,
// stratification) exit 3.
inline int exit_for_diagnostics(const ParseResult& pr) {
  for (const Diagnostic& d : pr.diagnostics)
    if (d.code == DiagCode::lexical_error || d.code == DiagCode::syntax_error ||
        d.code == DiagCode::csv_error)
      return kExitParse;
  if (pr.diagnostics.empty()) return kExitParse;  // no program, no diagnostics
  return kExitStratification;
}

// Shared front half of every subcommand: read + parse the program (exit 2 on
// failure), bind --facts CSVs (unknown predicate -> exit 1, malformed CSV ->
// exit 2), then gate on analysis (exit 3). Returns 0 on success.
inline int load(const CliConfig& cfg, bool bind_facts, bool gate_analysis, LoadedProgram& out,
                std::ostream& err) {
  std::string text;
  try {
    text = premlog::detail::read_text_file(cfg.program_path);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  ParseResult pr = parse_program(text);
  if (!pr.ok()) {
    err << render_diagnostics(pr.diagnostics);
    return exit_for_diagnostics(pr);
  }
  out.program = std::move(*pr.program);

  if (bind_facts && !cfg.facts.empty()) {
    AnalysisResult prelim = analyze(out.program);
    for (const auto& [pred, path] : cfg.facts) {
      auto arity = prelim.arities.find(pred);
      if (arity == prelim.arities.end()) {
        err << "unknown predicate in --facts binding: " << pred << "\n";
        return kExitUsage;
      }
      std::string rows;
      try {
        rows = premlog::detail::read_text_file(path);
      } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitUsage;
      }
      CsvResult cr = load_facts(pred, arity->second, rows);
      if (!cr.ok()) {
        err << render_diagnostics(cr.diagnostics);
        return kExitParse;
      }
      Relation& dst = out.program.facts[pred];
      for (const Tuple& t : *cr.relation) dst.insert(t);
    }
  }

  if (gate_analysis) {
    out.analysis = analyze(out.program);
    if (!out.analysis.ok()) {
      err << render_diagnostics(out.analysis.diagnostics);
      return kExitStratification;
    }
  }
  return kExitOk;
}

inline std::optional<EvalOptions> make_options(const CliConfig& cfg, std::ostream& err) {
  EvalOptions o;
  if (cfg.engine == "naive") {
    o.engine = EvalOptions::Engine::naive;
  } else if (cfg.engine == "seminaive") {
    o.engine = EvalOptions::Engine::seminaive;
  } else {
    err << "unknown --engine: " << cfg.engine << " (expected naive|seminaive)\n";
    return std::nullopt;
  }
  o.push_enabled = cfg.push;
  o.max_iterations = cfg.max_iters;
  o.trace_enabled = !cfg.trace_path.empty();
  return o;
}

inline int write_trace_file(const std::string& path, const std::vector<FixpointTrace>& traces,
                            std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "cannot write trace file: " << path << "\n";
    return kExitUsage;
  }
  f << traces_to_json(traces).dump(2) << "\n";
  return kExitOk;
}

inline std::size_t tuple_count(const Interpretation& interp) {
  std::size_t n = 0;
  for (const auto& [pred, rel] : interp.data()) n += rel.size();
  return n;
}

inline void stats_line(std::ostream& err, const std::string& label, const CliConfig& cfg,
                       bool push, const EvalResult& res, double wall_ms) {
  err << "stats:";
  if (!label.empty()) err << " side=" << label;
  err << " engine=" << cfg.engine << " push=" << (push ? "on" : "off")
      << " iterations=" << res.iterations << " tuples=" << tuple_count(res.interp)
      << " derivations=" << res.stats.derivations << " wall_ms=" << std::fixed
      << std::setprecision(2) << wall_ms << "\n";
  err.unsetf(std::ios::floatfield);
}

// Interpretation printing shared by run: --query narrows the output (queried
// predicates appear even when empty in json); otherwise all nonempty
// relations print.
inline void print_interpretation(const CliConfig& cfg, const Interpretation& interp,
                                 std::ostream& out) {
  if (cfg.queries.empty()) {
    if (cfg.format == "json")
      out << interpretation_to_json(interp).dump(2) << "\n";
    else if (cfg.format == "csv")
      out << interpretation_to_csv(interp);
    else
      out << interpretation_to_table(interp);
    return;
  }
  std::set<std::string> qs(cfg.queries.begin(), cfg.queries.end());
  if (cfg.format == "json") {
    json o = json::object();
    for (const std::string& q : qs) {
      const Relation* rel = interp.find(q);
      o[q] = rel ? relation_to_json(*rel) : json::array();
    }
    out << o.dump(2) << "\n";
    return;
  }
  Interpretation filtered;
  for (const std::string& q : qs) {
    const Relation* rel = interp.find(q);
    if (rel && !rel->empty()) filtered.data()[q] = *rel;
  }
  if (cfg.format == "csv")
    out << interpretation_to_csv(filtered);
  else
    out << interpretation_to_table(filtered);
}

inline const ResolvedExtrema* first_site(const std::vector<ResolvedExtrema>& sites, bool pushed) {
  for (const ResolvedExtrema& s : sites)
    if (s.pushed == pushed) return &s;
  return nullptr;
}

// The first `V = const` (or `const = V`) equality comparison in the program,
// as (variable, constant term) for push_equality.
inline std::optional<std::pair<std::string, Term>> find_equality(const Program& p) {
  for (const Rule& r : p.rules) {
    for (const BodyLiteral& lit : r.body) {
      const Comparison* c = std::get_if<Comparison>(&lit);
      if (!c || c->op != CmpOp::eq) continue;
      if (c->lhs.op == ArithExpr::Op::variable && c->rhs.op == ArithExpr::Op::constant)
        return std::make_pair(c->lhs.var, Term::constant(c->rhs.val));
      if (c->lhs.op == ArithExpr::Op::constant && c->rhs.op == ArithExpr::Op::variable)
        return std::make_pair(c->rhs.var, Term::constant(c->lhs.val));
    }
  }
  return std::nullopt;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::LoadedProgram lp;
  if (int rc = detail::load(cfg, /*bind_facts=*/true, /*gate_analysis=*/true, lp, err); rc != 0)
    return rc;
  std::optional<EvalOptions> opts = detail::make_options(cfg, err);
  if (!opts) return kExitUsage;

  EvalResult res;
  auto t0 = std::chrono::steady_clock::now();
  try {
    res = evaluate(lp.program, *opts);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  detail::stats_line(err, "", cfg, cfg.push, res, detail::elapsed_ms(t0));

  if (!cfg.trace_path.empty())
    if (int rc = detail::write_trace_file(cfg.trace_path, res.traces, err); rc != 0) return rc;

  detail::print_interpretation(cfg, res.interp, out);

  if (res.status == TermStatus::iteration_cap) {
    err << "warning: iteration cap (" << cfg.max_iters << ") reached before fixpoint\n";
    if (cfg.strict) return kExitCap;
  }
  return kExitOk;
}

inline int cmd_rewrite(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::LoadedProgram lp;
  if (int rc = detail::load(cfg, /*bind_facts=*/false, /*gate_analysis=*/false, lp, err); rc != 0)
    return rc;
  const Program& p = lp.program;
  try {
    Program result;
    if (cfg.mode == "push") {
      std::vector<ResolvedExtrema> sites = find_extrema_sites(p);
      const ResolvedExtrema* site = detail::first_site(sites, /*pushed=*/false);
      if (!site) {
        err << "rewrite inapplicable: no unpushed extrema constraint in the program\n";
        return kExitUsage;
      }
      result = push_extrema(site->constraint, p);
    } else if (cfg.mode == "unpush") {
      result = transfer_out(p);
    } else if (cfg.mode == "negation") {
      std::vector<ResolvedExtrema> sites = find_extrema_sites(p);
      const ResolvedExtrema* site = detail::first_site(sites, /*pushed=*/false);
      if (!site) {
        err << "rewrite inapplicable: no unpushed extrema constraint in the program\n";
        return kExitUsage;
      }
      result = negation_encoding(site->constraint, p);
    } else if (cfg.mode == "equality") {
      std::optional<std::pair<std::string, Term>> eq = detail::find_equality(p);
      if (!eq) {
        err << "rewrite inapplicable: no variable = constant comparison in the program\n";
        return kExitUsage;
      }
      result = push_equality(eq->first, eq->second, p);
    } else {
      err << "unknown --mode: " << cfg.mode << " (expected push|unpush|negation|equality)\n";
      return kExitUsage;
    }
    out << format_program(result);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

inline int cmd_check_prem(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::LoadedProgram lp;
  if (int rc = detail::load(cfg, /*bind_facts=*/true, /*gate_analysis=*/true, lp, err); rc != 0)
    return rc;
  Program p = std::move(lp.program);

  // check-prem accepts a program whose constraint is still a post-constraint:
  // a pushable constraint is pushed first, then verified.
  std::vector<ResolvedExtrema> sites = find_extrema_sites(p);
  if (!detail::first_site(sites, /*pushed=*/true)) {
    const ResolvedExtrema* site = detail::first_site(sites, /*pushed=*/false);
    if (!site) {
      err << "nothing to check: the program has no extrema constraint\n";
      return kExitUsage;
    }
    try {
      p = push_extrema(site->constraint, p);
    } catch (const Error& e) {
      err << e.what() << "\n";
      return kExitUsage;
    }
  }

  std::optional<EvalOptions> opts = detail::make_options(cfg, err);
  if (!opts) return kExitUsage;

  PremReport report;
  try {
    report = check_run(p, *opts);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  if (!cfg.trace_path.empty()) {
    EvalOptions topts = *opts;
    topts.trace_enabled = true;
    topts.push_enabled = true;
    try {
      EvalResult res = evaluate(p, topts);
      if (int rc = detail::write_trace_file(cfg.trace_path, res.traces, err); rc != 0) return rc;
    } catch (const Error& e) {
      err << e.what() << "\n";
      return kExitUsage;
    }
  }

  out << prem_report_to_json(report).dump(2) << "\n";
  if (cfg.strict && !report.holds) return kExitViolation;
  if (cfg.strict && report.partial) return kExitCap;
  return kExitOk;
}

inline int cmd_diff(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::LoadedProgram lp;
  if (int rc = detail::load(cfg, /*bind_facts=*/true, /*gate_analysis=*/true, lp, err); rc != 0)
    return rc;
  Program base = std::move(lp.program);

  Program unpushed, pushed;
  try {
    std::vector<ResolvedExtrema> sites = find_extrema_sites(base);
    if (const ResolvedExtrema* up = detail::first_site(sites, /*pushed=*/false)) {
      unpushed = base;
      pushed = push_extrema(up->constraint, base);
    } else if (detail::first_site(sites, /*pushed=*/true)) {
      pushed = base;
      unpushed = transfer_out(base);
    } else {
      err << "diff inapplicable: the program has no extrema constraint\n";
      return kExitUsage;
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  const Rule* final_rule = find_post_constraint_rule(unpushed);
  if (!final_rule) {
    err << "diff inapplicable: no post-constraint final rule\n";
    return kExitUsage;
  }
  const std::string final_pred = final_rule->head.pred;

  std::optional<EvalOptions> base_opts = detail::make_options(cfg, err);
  if (!base_opts) return kExitUsage;
  EvalOptions uo = *base_opts;
  uo.push_enabled = false;  // evaluate the program as written, post-constraint applied after
  uo.trace_enabled = false;
  EvalOptions po = uo;
  po.push_enabled = true;

  EvalResult ru, rp;
  std::exception_ptr exc_u, exc_p;
  auto t0 = std::chrono::steady_clock::now();
  std::thread unpushed_thread([&] {
    try {
      ru = evaluate(unpushed, uo);
    } catch (...) {
      exc_u = std::current_exception();
    }
  });
  try {
    rp = evaluate(pushed, po);
  } catch (...) {
    exc_p = std::current_exception();
  }
  unpushed_thread.join();
  double wall = detail::elapsed_ms(t0);

  for (std::exception_ptr exc : {exc_p, exc_u}) {
    if (!exc) continue;
    try {
      std::rethrow_exception(exc);
    } catch (const std::exception& e) {
      err << e.what() << "\n";
      return kExitUsage;
    }
  }
  detail::stats_line(err, "unpushed", cfg, false, ru, wall);
  detail::stats_line(err, "pushed", cfg, true, rp, wall);

  const Relation* rel_p = rp.interp.find(final_pred);
  const Relation empty_rel;
  const Relation& pushed_rel = rel_p ? *rel_p : empty_rel;

  const bool u_cap = ru.status == TermStatus::iteration_cap;
  const bool p_cap = rp.status == TermStatus::iteration_cap;
  if (u_cap || p_cap) {
    const std::string reason =
        u_cap ? "unpushed variant hit the iteration cap" : "pushed variant hit the iteration cap";
    if (cfg.format == "json") {
      json o = json::object();
      o["final_predicate"] = final_pred;
      o["comparable"] = false;
      o["reason"] = reason;
      o["unpushed_iterations"] = ru.iterations;
      o["pushed_iterations"] = rp.iterations;
      if (!p_cap) o["pushed"] = relation_to_json(pushed_rel);
      out << o.dump(2) << "\n";
    } else if (cfg.format == "csv") {
      out << "incomparable," << reason << "\n";
      if (!p_cap)
        for (const Tuple& t : pushed_rel.sorted()) {
          out << "pushed";
          for (const Value& v : t) out << "," << premlog::detail::csv_field(v);
          out << "\n";
        }
    } else {
      out << "final predicate: " << final_pred << "\n";
      out << "incomparable: " << reason << " (" << (u_cap ? ru.iterations : rp.iterations)
          << " iterations)\n";
      if (!p_cap) {
        out << "pushed result:\n";
        for (const Tuple& t : pushed_rel.sorted()) out << "  " << tuple_to_string(t) << "\n";
      }
    }
    return cfg.strict ? kExitCap : kExitOk;
  }

  const Relation* rel_u = ru.interp.find(final_pred);
  std::vector<Tuple> su = rel_u ? rel_u->sorted() : std::vector<Tuple>{};
  std::vector<Tuple> sp = pushed_rel.sorted();
  std::vector<Tuple> only_u, only_p;
  std::set_difference(su.begin(), su.end(), sp.begin(), sp.end(), std::back_inserter(only_u),
                      tuple_canonical_less);
  std::set_difference(sp.begin(), sp.end(), su.begin(), su.end(), std::back_inserter(only_p),
                      tuple_canonical_less);
  const bool identical = only_u.empty() && only_p.empty();

  if (cfg.format == "json") {
    json o = json::object();
    o["final_predicate"] = final_pred;
    o["comparable"] = true;
    o["identical"] = identical;
    json ju = json::array();
    for (const Tuple& t : only_u) ju.push_back(tuple_to_json(t));
    json jp = json::array();
    for (const Tuple& t : only_p) jp.push_back(tuple_to_json(t));
    o["only_in_unpushed"] = std::move(ju);
    o["only_in_pushed"] = std::move(jp);
    out << o.dump(2) << "\n";
  } else if (cfg.format == "csv") {
    for (const Tuple& t : only_u) {
      out << "only_in_unpushed";
      for (const Value& v : t) out << "," << premlog::detail::csv_field(v);
      out << "\n";
    }
    for (const Tuple& t : only_p) {
      out << "only_in_pushed";
      for (const Value& v : t) out << "," << premlog::detail::csv_field(v);
      out << "\n";
    }
  } else {
    out << "final predicate: " << final_pred << "\n";
    if (identical) {
      out << "identical (" << sp.size() << (sp.size() == 1 ? " tuple)\n" : " tuples)\n");
    } else {
      out << "only in unpushed (" << only_u.size() << "):\n";
      for (const Tuple& t : only_u) out << "  " << tuple_to_string(t) << "\n";
      out << "only in pushed (" << only_p.size() << "):\n";
      for (const Tuple& t : only_p) out << "  " << tuple_to_string(t) << "\n";
    }
  }
  return identical ? kExitOk : kExitViolation;
}

inline int dispatch(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.subcommand == "run") return cmd_run(cfg, out, err);
  if (cfg.subcommand == "rewrite") return cmd_rewrite(cfg, out, err);
  if (cfg.subcommand == "check-prem") return cmd_check_prem(cfg, out, err);
  if (cfg.subcommand == "diff") return cmd_diff(cfg, out, err);
  err << "unknown subcommand: " << cfg.subcommand << "\n";
  return kExitUsage;
}

}  // namespace premlog::cli
