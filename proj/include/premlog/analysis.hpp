#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "premlog/ast.hpp"
#include "premlog/diagnostics.hpp"
#include "premlog/gamma.hpp"

namespace premlog {

enum class RuleKind { exit, recursive };

enum class EdgePolarity { positive, negated, constrained };

struct DependencyEdge {
  std::string from;  // head predicate
  std::string to;    // body / target predicate
  EdgePolarity polarity = EdgePolarity::positive;
  bool pushed = false;  // constrained edges: resolved against the head atom
  std::size_t rule_index = 0;
};

struct DependencyGraph {
  std::vector<std::string> nodes;
  std::vector<DependencyEdge> edges;
};

// An extrema literal bound to its target atom. `pushed` means the literal's
// variables were resolved against the rule head (the shape produced by
// push_extrema); otherwise they resolved against a positive body atom and the
// literal is a post-constraint on that atom's predicate.
struct ResolvedExtrema {
  std::size_t rule_index = 0;
  std::size_t literal_index = 0;
  ExtremaConstraint constraint;
  bool pushed = false;
};

struct Strata {
  std::vector<std::vector<std::string>> levels;  // one SCC per level, topological order
  std::vector<RuleKind> rule_kinds;              // aligned with Program::rules
};

struct AnalysisResult {
  std::map<std::string, std::size_t> arities;
  std::set<std::string> extensional;  // predicates with facts
  std::set<std::string> intensional;  // predicates with rule heads
  DependencyGraph graph;
  Strata strata;
  std::map<std::string, std::size_t> scc_of;  // predicate -> level index
  std::vector<ResolvedExtrema> extrema;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }

  const ResolvedExtrema* find_extrema(std::size_t rule_index, std::size_t literal_index) const {
    for (const ResolvedExtrema& r : extrema)
      if (r.rule_index == rule_index && r.literal_index == literal_index) return &r;
    return nullptr;
  }
};

namespace detail {

// Binds an extrema literal's variables to argument positions of `atom`.
// Succeeds only if every group variable and the cost variable occur in the
// atom (first occurrence wins, which keeps positions distinct).
inline std::optional<ExtremaConstraint> bind_extrema(const ExtremaLiteral& lit, const Atom& atom) {
  auto position_of = [&](const std::string& var) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < atom.args.size(); ++i)
      if (atom.args[i].is_variable() && atom.args[i].var == var) return i;
    return std::nullopt;
  };
  ExtremaConstraint c;
  c.kind = lit.kind;
  c.target = atom.pred;
  c.group_by = lit.group_vars;
  c.cost = lit.cost_var;
  for (const std::string& v : lit.group_vars) {
    std::optional<std::size_t> pos = position_of(v);
    if (!pos) return std::nullopt;
    c.group_positions.push_back(*pos);
  }
  std::optional<std::size_t> pos = position_of(lit.cost_var);
  if (!pos) return std::nullopt;
  c.cost_position = *pos;
  return c;
}

}  // namespace detail

// Resolves one extrema literal: the first positive body atom covering all of
// its variables wins (post-constraint form); failing that, the head atom
// (pushed form); failing both, nullopt. The resolution is purely syntactic,
// so a pushed program read back from text resolves the same way it was
// written by the rewriter.
inline std::optional<ResolvedExtrema> resolve_extrema_literal(const Rule& rule,
                                                              std::size_t literal_index) {
  const ExtremaLiteral* lit = std::get_if<ExtremaLiteral>(&rule.body[literal_index]);
  if (!lit) return std::nullopt;
  for (const BodyLiteral& bl : rule.body) {
    const Atom* atom = std::get_if<Atom>(&bl);
    if (!atom) continue;
    if (std::optional<ExtremaConstraint> c = detail::bind_extrema(*lit, *atom)) {
      ResolvedExtrema r;
      r.literal_index = literal_index;
      r.constraint = std::move(*c);
      r.pushed = false;
      return r;
    }
  }
  if (std::optional<ExtremaConstraint> c = detail::bind_extrema(*lit, rule.head)) {
    ResolvedExtrema r;
    r.literal_index = literal_index;
    r.constraint = std::move(*c);
    r.pushed = true;
    return r;
  }
  return std::nullopt;
}

inline DependencyGraph dependency_graph(const Program& p) {
  DependencyGraph g;
  std::set<std::string> nodes;
  for (const auto& [pred, _] : p.facts) nodes.insert(pred);
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    const Rule& rule = p.rules[i];
    nodes.insert(rule.head.pred);
    for (std::size_t j = 0; j < rule.body.size(); ++j) {
      const BodyLiteral& lit = rule.body[j];
      if (const Atom* a = std::get_if<Atom>(&lit)) {
        nodes.insert(a->pred);
        g.edges.push_back({rule.head.pred, a->pred, EdgePolarity::positive, false, i});
      } else if (const Negation* n = std::get_if<Negation>(&lit)) {
        nodes.insert(n->atom.pred);
        g.edges.push_back({rule.head.pred, n->atom.pred, EdgePolarity::negated, false, i});
      } else if (std::get_if<ExtremaLiteral>(&lit)) {
        if (std::optional<ResolvedExtrema> r = resolve_extrema_literal(rule, j)) {
          nodes.insert(r->constraint.target);
          g.edges.push_back(
              {rule.head.pred, r->constraint.target, EdgePolarity::constrained, r->pushed, i});
        }
      }
    }
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  return g;
}

namespace detail {

// Iterative Tarjan; emits SCCs in topological order (dependencies first),
// which is exactly stratum evaluation order since edges point head -> body.
class SccFinder {
 public:
  explicit SccFinder(const DependencyGraph& g) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) id_[g.nodes[i]] = i;
    adj_.resize(g.nodes.size());
    for (const DependencyEdge& e : g.edges) {
      std::size_t from = id_.at(e.from), to = id_.at(e.to);
      adj_[from].push_back(to);
    }
    names_ = g.nodes;
  }

  std::vector<std::vector<std::string>> run() {
    std::size_t n = names_.size();
    index_.assign(n, kUnvisited);
    low_.assign(n, 0);
    on_stack_.assign(n, false);
    for (std::size_t v = 0; v < n; ++v)
      if (index_[v] == kUnvisited) strongconnect(v);
    return sccs_;
  }

 private:
  static constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);

  void strongconnect(std::size_t root) {
    struct Frame {
      std::size_t v;
      std::size_t next_edge;
    };
    std::vector<Frame> call;
    call.push_back({root, 0});
    visit(root);
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next_edge < adj_[f.v].size()) {
        std::size_t w = adj_[f.v][f.next_edge++];
        if (index_[w] == kUnvisited) {
          visit(w);
          call.push_back({w, 0});
        } else if (on_stack_[w]) {
          low_[f.v] = std::min(low_[f.v], index_[w]);
        }
      } else {
        if (low_[f.v] == index_[f.v]) {
          std::vector<std::string> scc;
          while (true) {
            std::size_t w = stack_.back();
            stack_.pop_back();
            on_stack_[w] = false;
            scc.push_back(names_[w]);
            if (w == f.v) break;
          }
          std::sort(scc.begin(), scc.end());
          sccs_.push_back(std::move(scc));
        }
        std::size_t v = f.v;
        call.pop_back();
        if (!call.empty()) low_[call.back().v] = std::min(low_[call.back().v], low_[v]);
      }
    }
  }

  void visit(std::size_t v) {
    index_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = true;
  }

  std::map<std::string, std::size_t> id_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> index_, low_, stack_;
  std::vector<bool> on_stack_;
  std::size_t counter_ = 0;
  std::vector<std::vector<std::string>> sccs_;
};

}  // namespace detail

// Full analysis: signatures, dependency graph, SCC partition in evaluation
// order, per-rule exit/recursive classification, extrema resolution, and the
// stratification checks (negation and unpushed extrema may not close a cycle).
inline AnalysisResult analyze(const Program& p) {
  AnalysisResult res;
  res.arities = predicate_signatures(p);
  for (const auto& [pred, rel] : p.facts)
    if (!rel.empty()) res.extensional.insert(pred);
  for (const Rule& r : p.rules) res.intensional.insert(r.head.pred);

  res.graph = dependency_graph(p);
  res.strata.levels = detail::SccFinder(res.graph).run();
  for (std::size_t i = 0; i < res.strata.levels.size(); ++i)
    for (const std::string& pred : res.strata.levels[i]) res.scc_of[pred] = i;

  // Rule kinds: recursive iff some positive body atom's predicate shares the
  // head's SCC.
  res.strata.rule_kinds.reserve(p.rules.size());
  for (const Rule& rule : p.rules) {
    std::size_t head_scc = res.scc_of.at(rule.head.pred);
    RuleKind kind = RuleKind::exit;
    for (const BodyLiteral& lit : rule.body) {
      const Atom* a = std::get_if<Atom>(&lit);
      if (a && res.scc_of.at(a->pred) == head_scc) {
        kind = RuleKind::recursive;
        break;
      }
    }
    res.strata.rule_kinds.push_back(kind);
  }

  // Extrema resolution; at most one extrema literal per rule is supported.
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    const Rule& rule = p.rules[i];
    std::size_t count = 0;
    for (std::size_t j = 0; j < rule.body.size(); ++j) {
      if (!std::holds_alternative<ExtremaLiteral>(rule.body[j])) continue;
      ++count;
      const auto& lit = std::get<ExtremaLiteral>(rule.body[j]);
      if (count > 1) {
        res.diagnostics.push_back({DiagCode::invalid_extrema,
                                   "multiple extrema literals in one rule are unsupported",
                                   lit.span});
        continue;
      }
      std::optional<ResolvedExtrema> r = resolve_extrema_literal(rule, j);
      if (!r) {
        res.diagnostics.push_back(
            {DiagCode::invalid_extrema,
             "extrema literal does not match any body atom or the head: its group and cost "
             "variables must all occur in one atom",
             lit.span});
        continue;
      }
      r->rule_index = i;
      res.extrema.push_back(std::move(*r));
    }
  }

  // Stratification violations.
  for (const DependencyEdge& e : res.graph.edges) {
    if (res.scc_of.at(e.from) != res.scc_of.at(e.to)) continue;
    if (e.polarity == EdgePolarity::negated) {
      res.diagnostics.push_back({DiagCode::unstratifiable_negation,
                                 "negation of " + e.to + " inside the recursive component of " +
                                     e.from,
                                 p.rules[e.rule_index].span});
    } else if (e.polarity == EdgePolarity::constrained && !e.pushed) {
      res.diagnostics.push_back(
          {DiagCode::unpushed_extrema_in_recursion,
           "extrema constraint on " + e.to + " inside the recursive component of " + e.from +
               " (only constraints introduced by the push rewrite may sit inside recursion)",
           p.rules[e.rule_index].span});
    }
  }

  return res;
}

// Spec-surface helpers over analyze().
inline std::vector<RuleKind> classify_rules(const Program& p) {
  return analyze(p).strata.rule_kinds;
}

struct StratifyResult {
  std::optional<Strata> strata;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return strata.has_value() && diagnostics.empty(); }
};

inline StratifyResult stratify(const Program& p) {
  AnalysisResult res = analyze(p);
  StratifyResult out;
  out.diagnostics = res.diagnostics;
  if (out.diagnostics.empty()) out.strata = std::move(res.strata);
  return out;
}

}  // namespace premlog
