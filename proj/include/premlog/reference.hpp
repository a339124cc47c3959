#pragma once

#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "premlog/ast.hpp"
#include "premlog/errors.hpp"
#include "premlog/eval.hpp"
#include "premlog/rational.hpp"
#include "premlog/rewrite.hpp"
#include "premlog/value.hpp"

namespace premlog {

struct OracleResult {
  std::optional<Relation> relation;  // nullopt: iteration cap exceeded
  std::size_t iterations = 0;

  bool ok() const { return relation.has_value(); }
};

// The last rule carrying a post-constraint: an extrema literal, or the
// stratified-negation encoding of one (negation of a __better_ predicate).
// Null when the program has neither.
inline const Rule* find_post_constraint_rule(const Program& p) {
  const Rule* final_rule = nullptr;
  for (const Rule& r : p.rules) {
    for (const BodyLiteral& lit : r.body) {
      if (std::holds_alternative<ExtremaLiteral>(lit)) {
        final_rule = &r;
      } else if (const Negation* n = std::get_if<Negation>(&lit)) {
        if (n->atom.pred.rfind(kBetterPrefix, 0) == 0) final_rule = &r;
      }
    }
  }
  return final_rule;
}

// Evaluates the unpushed program as written — naive engine, no constraint
// pushing, iteration cap — and returns the final-rule predicate's relation.
// The final rule is the one carrying the post-constraint (an extrema literal,
// or the stratified-negation encoding of one).
inline OracleResult oracle_post_constraint(const Program& p, std::size_t cap) {
  const Rule* final_rule = find_post_constraint_rule(p);
  if (!final_rule)
    throw Error(ErrorCode::invalid_argument,
                "oracle_post_constraint: no post-constraint final rule found");

  EvalOptions opts;
  opts.engine = EvalOptions::Engine::naive;
  opts.push_enabled = false;
  opts.max_iterations = cap;
  EvalResult res = evaluate(p, opts);

  OracleResult out;
  out.iterations = res.iterations;
  if (res.status == TermStatus::iteration_cap) return out;
  const Relation* rel = res.interp.find(final_rule->head.pred);
  out.relation = rel ? *rel : Relation();
  return out;
}

namespace detail {

struct ArcList {
  std::vector<Value> nodes;                               // dense ids -> values
  std::map<std::size_t, std::vector<std::pair<std::size_t, Rational>>> out;  // u -> (v, cost)
};

// Shared input validation/shaping for both solvers; deliberately simple code
// that does not touch any eval machinery.
inline ArcList shape_arcs(const Relation& arcs) {
  ArcList g;
  std::map<std::string, std::size_t> sym_ids;
  std::map<Rational, std::size_t> num_ids;  // numbers allowed as nodes too
  auto id_of = [&](const Value& v) -> std::size_t {
    if (v.is_symbol()) {
      auto [it, fresh] = sym_ids.emplace(v.symbol_name(), g.nodes.size());
      if (fresh) g.nodes.push_back(v);
      return it->second;
    }
    auto [it, fresh] = num_ids.emplace(v.num(), g.nodes.size());
    if (fresh) g.nodes.push_back(v);
    return it->second;
  };
  for (const Tuple& t : arcs) {
    if (t.size() != 3)
      throw Error(ErrorCode::arity_mismatch, "arc relation must have arity 3 (from, to, cost)");
    if (!t[2].is_number() || !t[2].num().is_positive())
      throw Error(ErrorCode::invalid_argument,
                  "arc costs must be strictly positive numbers, got " + t[2].to_string());
    g.out[id_of(t[0])].emplace_back(id_of(t[1]), t[2].num());
  }
  return g;
}

}  // namespace detail

// Minimum path cost over paths of at least one arc (so (s,s,d) appears
// exactly when s lies on a cycle, d being the cheapest such loop) from every
// source to every reachable node. Classical repeated relaxation: with
// strictly positive costs, optimal walks are simple, so |nodes| rounds
// suffice; the loop stops as soon as a round changes nothing.
inline Relation oracle_shortest_paths(const Relation& arcs, const std::set<std::string>& sources) {
  detail::ArcList g = detail::shape_arcs(arcs);
  Relation out;
  for (const std::string& s : sources) {
    Value sv = Value::symbol(s);
    std::size_t sid = g.nodes.size();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i] == sv) sid = i;
    if (sid == g.nodes.size()) continue;  // source not in the graph: nothing reachable

    std::vector<std::optional<Rational>> dist(g.nodes.size());
    auto seed = g.out.find(sid);
    if (seed == g.out.end()) continue;
    for (const auto& [v, c] : seed->second)
      if (!dist[v] || c < *dist[v]) dist[v] = c;

    for (std::size_t round = 0; round < g.nodes.size(); ++round) {
      bool changed = false;
      for (const auto& [u, edges] : g.out) {
        if (!dist[u]) continue;
        for (const auto& [v, c] : edges) {
          Rational cand = *dist[u] + c;
          if (!dist[v] || cand < *dist[v]) {
            dist[v] = cand;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }

    for (std::size_t v = 0; v < g.nodes.size(); ++v)
      if (dist[v]) out.insert(Tuple{sv, g.nodes[v], Value::number(*dist[v])});
  }
  return out;
}

// Second, structurally different solver (priority queue / Dijkstra) used to
// cross-check oracle_shortest_paths. Same ">= 1 arc" semantics.
inline Relation oracle_shortest_paths_pq(const Relation& arcs,
                                         const std::set<std::string>& sources) {
  detail::ArcList g = detail::shape_arcs(arcs);
  Relation out;
  for (const std::string& s : sources) {
    Value sv = Value::symbol(s);
    std::size_t sid = g.nodes.size();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i] == sv) sid = i;
    if (sid == g.nodes.size()) continue;

    using Entry = std::pair<Rational, std::size_t>;
    auto cmp = [](const Entry& a, const Entry& b) { return b.first < a.first; };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    std::vector<std::optional<Rational>> best(g.nodes.size());
    std::vector<bool> settled(g.nodes.size(), false);

    auto seed = g.out.find(sid);
    if (seed == g.out.end()) continue;
    for (const auto& [v, c] : seed->second) {
      if (!best[v] || c < *best[v]) {
        best[v] = c;
        heap.emplace(c, v);
      }
    }
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (settled[u]) continue;
      settled[u] = true;
      auto it = g.out.find(u);
      if (it == g.out.end()) continue;
      for (const auto& [v, c] : it->second) {
        Rational cand = d + c;
        if (settled[v] || (best[v] && !(cand < *best[v]))) continue;
        best[v] = cand;
        heap.emplace(cand, v);
      }
    }
    for (std::size_t v = 0; v < g.nodes.size(); ++v)
      if (best[v]) out.insert(Tuple{sv, g.nodes[v], Value::number(*best[v])});
  }
  return out;
}

}  // namespace premlog
