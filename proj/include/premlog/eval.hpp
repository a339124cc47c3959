#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "premlog/analysis.hpp"
#include "premlog/ast.hpp"
#include "premlog/diagnostics.hpp"
#include "premlog/errors.hpp"
#include "premlog/gamma.hpp"
#include "premlog/value.hpp"

namespace premlog {

// ---------------------------------------------------------------------------
// Options and results
// ---------------------------------------------------------------------------

struct EvalOptions {
  enum class Engine { naive, seminaive };

  Engine engine = Engine::seminaive;
  bool push_enabled = true;
  std::size_t max_iterations = 100000;  // per recursive component
  bool trace_enabled = false;
};

enum class TermStatus { fixpoint, iteration_cap };

struct EvalStats {
  std::size_t derivations = 0;  // head rows produced by fixpoint/exit sweeps
  std::size_t joins = 0;        // tuples enumerated while matching body atoms

  EvalStats& operator+=(const EvalStats& o) {
    derivations += o.derivations;
    joins += o.joins;
    return *this;
  }
};

// One fixpoint iteration as seen by the PreM checker: the un-selected union
// U_k = T(I_{k-1})upcup I_{k-1} cup E and the constrained state I_k = gamma(U_k)
// (or U_k itself when no constraint is being pushed). Snapshot 0 holds the
// initialization pair (E, gamma(E)).
struct IterationSnapshot {
  Interpretation pre_gamma;
  Interpretation post_gamma;
  std::size_t delta_size = 0;
  std::size_t derivations = 0;
};

struct FixpointTrace {
  std::vector<std::string> scc;  // predicates of the recursive component
  Interpretation env;            // lower-stratum relations the component reads
  std::vector<IterationSnapshot> snapshots;
};

struct EvalResult {
  Interpretation interp;
  std::size_t iterations = 0;  // max over recursive components
  TermStatus status = TermStatus::fixpoint;
  std::vector<FixpointTrace> traces;  // one per recursive component if traced
  EvalStats stats;
};

// Result of evaluating a single component (see naive_fixpoint/seminaive_fixpoint).
struct SccResult {
  Interpretation slice;  // final relations for the component's predicates
  std::size_t iterations = 0;
  TermStatus status = TermStatus::fixpoint;
  std::optional<FixpointTrace> trace;
  EvalStats stats;
};

// ---------------------------------------------------------------------------
// Compiled expressions and rule plans
// ---------------------------------------------------------------------------

namespace detail {

struct CompiledExpr {
  ArithExpr::Op op = ArithExpr::Op::constant;
  Value constant;
  int slot = -1;
  std::unique_ptr<CompiledExpr> lhs, rhs;

  Value eval(const std::vector<Value>& slots) const {
    switch (op) {
      case ArithExpr::Op::constant: return constant;
      case ArithExpr::Op::variable: return slots[static_cast<std::size_t>(slot)];
      default: break;
    }
    // Leaf operands are read in place; only nested expressions recurse.
    Value la, lb;
    const Value& a = lhs->op == ArithExpr::Op::variable
                         ? slots[static_cast<std::size_t>(lhs->slot)]
                         : lhs->op == ArithExpr::Op::constant ? lhs->constant
                                                              : (la = lhs->eval(slots));
    const Value& b = rhs->op == ArithExpr::Op::variable
                         ? slots[static_cast<std::size_t>(rhs->slot)]
                         : rhs->op == ArithExpr::Op::constant ? rhs->constant
                                                              : (lb = rhs->eval(slots));
    if (!a.is_number() || !b.is_number())
      throw Error(ErrorCode::sort_mismatch, "arithmetic on a symbol");
    switch (op) {
      case ArithExpr::Op::add: return Value::number(a.num() + b.num());
      case ArithExpr::Op::sub: return Value::number(a.num() - b.num());
      case ArithExpr::Op::mul: return Value::number(a.num() * b.num());
      case ArithExpr::Op::div:
        if (b.num().is_zero()) throw Error(ErrorCode::division_by_zero, "division by zero");
        return Value::number(a.num() / b.num());
      default: throw Error(ErrorCode::invalid_argument, "malformed expression");
    }
  }
};

inline CompiledExpr compile_expr(const ArithExpr& e, const std::map<std::string, int>& slots) {
  CompiledExpr c;
  c.op = e.op;
  switch (e.op) {
    case ArithExpr::Op::constant:
      c.constant = e.val;
      break;
    case ArithExpr::Op::variable: {
      auto it = slots.find(e.var);
      if (it == slots.end())
        throw Error(ErrorCode::invalid_argument, "unbound variable " + e.var + " in expression");
      c.slot = it->second;
      break;
    }
    default:
      c.lhs = std::make_unique<CompiledExpr>(compile_expr(*e.lhs, slots));
      c.rhs = std::make_unique<CompiledExpr>(compile_expr(*e.rhs, slots));
      break;
  }
  return c;
}

inline bool eval_comparison(CmpOp op, const Value& a, const Value& b) {
  if (op == CmpOp::eq || op == CmpOp::ne) {
    if (a.kind() != b.kind())
      throw Error(ErrorCode::sort_mismatch, "equality between a number and a symbol");
    return (a == b) == (op == CmpOp::eq);
  }
  if (!a.is_number() || !b.is_number())
    throw Error(ErrorCode::sort_mismatch, "order comparison requires numbers");
  const Rational& x = a.num();
  const Rational& y = b.num();
  switch (op) {
    case CmpOp::lt: return x < y;
    case CmpOp::le: return x <= y;
    case CmpOp::gt: return y < x;
    case CmpOp::ge: return y <= x;
    default: return false;
  }
}

struct PlanStep {
  enum class Kind { atom, negation, filter, bind };

  Kind kind = Kind::atom;

  // atom / negation
  std::string pred;
  std::size_t literal_index = 0;  // position in the rule body (delta override key)
  std::vector<int> bind_slot;     // per arg, -1 if this arg does not bind
  std::vector<int> check_slot;    // per arg, -1 if no bound-variable check
  std::vector<std::optional<Value>> check_const;  // per arg constant check
  std::vector<std::size_t> key_positions;         // sorted; nonempty => probe by index
  std::vector<char> in_key;                       // per arg: covered by the probe key

  // filter
  CmpOp op = CmpOp::eq;
  CompiledExpr lhs, rhs;

  // bind
  int target_slot = -1;
  CompiledExpr expr;
};

struct RulePlan {
  const Rule* rule = nullptr;
  std::size_t num_slots = 0;
  std::vector<PlanStep> steps;
  std::vector<int> head_slot;  // per head arg, -1 if constant
  std::vector<std::optional<Value>> head_const;

  // Body-resolved extrema constraint: the rule's rows are grouped and only
  // the best-cost rows are emitted. Pushed (head-resolved) literals never
  // reach the plan; the engine owns them.
  bool has_group = false;
  ExtremaKind group_kind = ExtremaKind::min;
  std::vector<int> group_slots;
  int cost_slot = -1;
};

inline RulePlan compile_rule(const Rule& rule) {
  RulePlan plan;
  plan.rule = &rule;
  std::map<std::string, int> slots;
  int next_slot = 0;
  auto alloc = [&](const std::string& v) {
    int s = next_slot++;
    slots.emplace(v, s);
    return s;
  };
  auto slot_of = [&](const std::string& v) -> int {
    auto it = slots.find(v);
    return it == slots.end() ? -1 : it->second;
  };

  std::optional<ResolvedExtrema> group;

  auto place_atom = [&](const Atom& a, std::size_t li) {
    PlanStep s;
    s.kind = PlanStep::Kind::atom;
    s.pred = a.pred;
    s.literal_index = li;
    std::size_t n = a.args.size();
    s.bind_slot.assign(n, -1);
    s.check_slot.assign(n, -1);
    s.check_const.assign(n, std::nullopt);
    s.in_key.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const Term& t = a.args[i];
      if (t.is_constant()) {
        s.check_const[i] = t.val;
        s.key_positions.push_back(i);
        s.in_key[i] = 1;
        continue;
      }
      int sl = slot_of(t.var);
      if (sl >= 0) {
        s.check_slot[i] = sl;
        // A variable first bound by an earlier position of this same atom is
        // not usable as a probe key (its value is only known per tuple).
        bool bound_within_atom = false;
        for (std::size_t j = 0; j < i; ++j)
          if (s.bind_slot[j] == sl) bound_within_atom = true;
        if (!bound_within_atom) {
          s.key_positions.push_back(i);
          s.in_key[i] = 1;
        }
      } else {
        s.bind_slot[i] = alloc(t.var);
      }
    }
    plan.steps.push_back(std::move(s));
  };

  // Tries to place a non-atom literal; fails if its variables are not all
  // bound yet (it is retried after later atoms bind more variables).
  auto try_place = [&](const BodyLiteral& lit, std::size_t li) -> bool {
    if (const Comparison* c = std::get_if<Comparison>(&lit)) {
      std::set<std::string> vars;
      c->lhs.collect_vars(vars);
      c->rhs.collect_vars(vars);
      for (const std::string& v : vars)
        if (slot_of(v) < 0) return false;
      PlanStep s;
      s.kind = PlanStep::Kind::filter;
      s.literal_index = li;
      s.op = c->op;
      s.lhs = compile_expr(c->lhs, slots);
      s.rhs = compile_expr(c->rhs, slots);
      plan.steps.push_back(std::move(s));
      return true;
    }
    if (const Binding* b = std::get_if<Binding>(&lit)) {
      std::set<std::string> vars;
      b->expr.collect_vars(vars);
      for (const std::string& v : vars)
        if (slot_of(v) < 0) return false;
      PlanStep s;
      s.kind = PlanStep::Kind::bind;
      s.literal_index = li;
      s.expr = compile_expr(b->expr, slots);
      s.target_slot = alloc(b->var);
      plan.steps.push_back(std::move(s));
      return true;
    }
    if (const Negation* n = std::get_if<Negation>(&lit)) {
      for (const Term& t : n->atom.args)
        if (t.is_variable() && slot_of(t.var) < 0) return false;
      PlanStep s;
      s.kind = PlanStep::Kind::negation;
      s.pred = n->atom.pred;
      s.literal_index = li;
      std::size_t na = n->atom.args.size();
      s.bind_slot.assign(na, -1);
      s.check_slot.assign(na, -1);
      s.check_const.assign(na, std::nullopt);
      for (std::size_t i = 0; i < na; ++i) {
        const Term& t = n->atom.args[i];
        if (t.is_constant())
          s.check_const[i] = t.val;
        else
          s.check_slot[i] = slot_of(t.var);
      }
      plan.steps.push_back(std::move(s));
      return true;
    }
    return true;  // extrema literals are handled outside
  };

  std::vector<std::pair<const BodyLiteral*, std::size_t>> pending;
  auto flush = [&] {
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto it = pending.begin(); it != pending.end();) {
        if (try_place(*it->first, it->second)) {
          it = pending.erase(it);
          progress = true;
        } else {
          ++it;
        }
      }
    }
  };

  for (std::size_t li = 0; li < rule.body.size(); ++li) {
    const BodyLiteral& lit = rule.body[li];
    if (const Atom* a = std::get_if<Atom>(&lit)) {
      place_atom(*a, li);
      flush();
    } else if (std::holds_alternative<ExtremaLiteral>(lit)) {
      std::optional<ResolvedExtrema> r = resolve_extrema_literal(rule, li);
      if (!r)
        throw Error(ErrorCode::unresolved_constraint,
                    "extrema literal in rule for " + rule.head.pred + " cannot be resolved");
      if (!r->pushed) {
        if (plan.has_group)
          throw Error(ErrorCode::invalid_argument,
                      "multiple extrema literals in one rule are unsupported");
        plan.has_group = true;
        plan.group_kind = r->constraint.kind;
        group = std::move(r);
      }
    } else if (!try_place(lit, li)) {
      pending.emplace_back(&lit, li);
    }
  }
  flush();
  if (!pending.empty())
    throw Error(ErrorCode::invalid_argument,
                "unsafe rule for " + rule.head.pred + " reached evaluation");

  for (const Term& t : rule.head.args) {
    if (t.is_constant()) {
      plan.head_slot.push_back(-1);
      plan.head_const.push_back(t.val);
    } else {
      int sl = slot_of(t.var);
      if (sl < 0)
        throw Error(ErrorCode::invalid_argument,
                    "unsafe head variable " + t.var + " in rule for " + rule.head.pred);
      plan.head_slot.push_back(sl);
      plan.head_const.push_back(std::nullopt);
    }
  }

  if (group) {
    for (const std::string& v : group->constraint.group_by) {
      int sl = slot_of(v);
      if (sl < 0)
        throw Error(ErrorCode::invalid_argument, "unbound extrema group variable " + v);
      plan.group_slots.push_back(sl);
    }
    plan.cost_slot = slot_of(group->constraint.cost);
    if (plan.cost_slot < 0)
      throw Error(ErrorCode::invalid_argument,
                  "unbound extrema cost variable " + group->constraint.cost);
  }

  plan.num_slots = static_cast<std::size_t>(next_slot);
  return plan;
}

// ---------------------------------------------------------------------------
// Hash indexes, built lazily per (relation, column set) and dropped whenever
// the underlying relations change (the engines clear the cache between
// fixpoint iterations; mutation is always batched between sweeps, so stored
// tuple addresses never dangle while an index is live).
// ---------------------------------------------------------------------------

struct Index {
  std::unordered_map<Tuple, std::vector<const Tuple*>, TupleHash> buckets;
};

class IndexCache {
 public:
  const Index& get(const Relation& rel, const std::vector<std::size_t>& positions) {
    std::uint64_t mask = 0;
    for (std::size_t p : positions) mask |= std::uint64_t{1} << (p & 63);
    auto& per = cache_[&rel];
    auto it = per.find(mask);
    if (it != per.end()) return it->second;
    Index ix;
    for (const Tuple& t : rel) {
      Tuple key;
      for (std::size_t p : positions) key.push_back(t[p]);
      ix.buckets[std::move(key)].push_back(&t);
    }
    return per.emplace(mask, std::move(ix)).first->second;
  }

  void clear() { cache_.clear(); }

 private:
  std::map<const Relation*, std::map<std::uint64_t, Index>> cache_;
};

inline const Relation& empty_relation() {
  static const Relation r;
  return r;
}

// ---------------------------------------------------------------------------
// Plan execution
// ---------------------------------------------------------------------------

// Per run_plan call: the index each keyed atom step probes, resolved once so
// the row loop does no cache lookups. Null for empty relations (nothing to
// probe) and for scan/non-atom steps.
inline std::vector<const Index*> resolve_indexes(const RulePlan& plan,
                                                 const std::vector<const Relation*>& rels,
                                                 IndexCache& cache) {
  std::vector<const Index*> ix(plan.steps.size(), nullptr);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& s = plan.steps[i];
    if (s.kind == PlanStep::Kind::atom && !s.key_positions.empty() && !rels[i]->empty())
      ix[i] = &cache.get(*rels[i], s.key_positions);
  }
  return ix;
}

template <class RowFn>
void exec_steps(const RulePlan& plan, const std::vector<const Relation*>& rels,
                const std::vector<const Index*>& step_ix, EvalStats& stats,
                std::vector<Value>& slots, std::size_t idx, const RowFn& row) {
  if (idx == plan.steps.size()) {
    row();
    return;
  }
  const PlanStep& s = plan.steps[idx];
  switch (s.kind) {
    case PlanStep::Kind::atom: {
      const Relation& rel = *rels[idx];
      std::size_t n = s.bind_slot.size();
      auto try_tuple = [&](const Tuple& t) {
        ++stats.joins;
        if (t.size() != n) return;
        for (std::size_t i = 0; i < n; ++i) {
          if (s.in_key[i]) {
            if (s.bind_slot[i] >= 0) slots[static_cast<std::size_t>(s.bind_slot[i])] = t[i];
            continue;  // equality guaranteed by the probe key
          }
          if (s.check_const[i]) {
            if (!(t[i] == *s.check_const[i])) return;
          } else if (s.check_slot[i] >= 0) {
            if (!(t[i] == slots[static_cast<std::size_t>(s.check_slot[i])])) return;
          } else if (s.bind_slot[i] >= 0) {
            slots[static_cast<std::size_t>(s.bind_slot[i])] = t[i];
          }
        }
        exec_steps(plan, rels, step_ix, stats, slots, idx + 1, row);
      };
      if (s.key_positions.empty()) {
        for (const Tuple& t : rel) try_tuple(t);
      } else {
        if (!step_ix[idx]) return;  // empty relation: no index, no matches
        Tuple key;
        for (std::size_t p : s.key_positions)
          key.push_back(s.check_const[p] ? *s.check_const[p]
                                         : slots[static_cast<std::size_t>(s.check_slot[p])]);
        auto it = step_ix[idx]->buckets.find(key);
        if (it == step_ix[idx]->buckets.end()) return;
        for (const Tuple* t : it->second) try_tuple(*t);
      }
      return;
    }
    case PlanStep::Kind::negation: {
      Tuple t;
      for (std::size_t i = 0; i < s.check_slot.size(); ++i)
        t.push_back(s.check_const[i] ? *s.check_const[i]
                                     : slots[static_cast<std::size_t>(s.check_slot[i])]);
      if (!rels[idx]->contains(t)) exec_steps(plan, rels, step_ix, stats, slots, idx + 1, row);
      return;
    }
    case PlanStep::Kind::filter: {
      if (eval_comparison(s.op, s.lhs.eval(slots), s.rhs.eval(slots)))
        exec_steps(plan, rels, step_ix, stats, slots, idx + 1, row);
      return;
    }
    case PlanStep::Kind::bind: {
      slots[static_cast<std::size_t>(s.target_slot)] = s.expr.eval(slots);
      exec_steps(plan, rels, step_ix, stats, slots, idx + 1, row);
      return;
    }
  }
}

// Runs a plan and hands every derived head tuple to `sink`. Body-resolved
// extrema grouping is applied here: only the best-cost rows (ties included)
// of this rule application are emitted.
// Hands each satisfying slot assignment to the sink without materializing the
// head tuple, for callers that can admit or reject rows from slots directly.
// Only valid for plans without a body-resolved extrema group.
template <class RowSink>
void run_plan_raw(const RulePlan& plan, const std::vector<const Relation*>& rels, IndexCache& cache,
                  EvalStats& stats, RowSink&& sink) {
  std::vector<const Index*> step_ix = resolve_indexes(plan, rels, cache);
  std::vector<Value> slots(plan.num_slots);
  exec_steps(plan, rels, step_ix, stats, slots, 0, [&] { sink(slots); });
}

template <class Sink>
void run_plan(const RulePlan& plan, const std::vector<const Relation*>& rels, IndexCache& cache,
              EvalStats& stats, Sink&& sink) {
  std::vector<const Index*> step_ix = resolve_indexes(plan, rels, cache);
  std::vector<Value> slots(plan.num_slots);
  auto head_of = [&]() {
    Tuple h;
    for (std::size_t i = 0; i < plan.head_slot.size(); ++i)
      h.push_back(plan.head_slot[i] >= 0 ? slots[static_cast<std::size_t>(plan.head_slot[i])]
                                         : *plan.head_const[i]);
    return h;
  };
  if (!plan.has_group) {
    exec_steps(plan, rels, step_ix, stats, slots, 0, [&] { sink(head_of()); });
    return;
  }
  struct Row {
    Tuple key;
    Rational cost;
    Tuple head;
  };
  std::vector<Row> rows;
  exec_steps(plan, rels, step_ix, stats, slots, 0, [&] {
    Row r;
    for (int sl : plan.group_slots) r.key.push_back(slots[static_cast<std::size_t>(sl)]);
    const Value& cv = slots[static_cast<std::size_t>(plan.cost_slot)];
    if (!cv.is_number())
      throw Error(ErrorCode::sort_mismatch, "extrema cost variable holds a symbol");
    r.cost = cv.num();
    r.head = head_of();
    rows.push_back(std::move(r));
  });
  std::unordered_map<Tuple, Rational, TupleHash> best;
  for (const Row& r : rows) {
    auto [it, fresh] = best.emplace(r.key, r.cost);
    if (fresh) continue;
    bool better = plan.group_kind == ExtremaKind::min ? r.cost < it->second : it->second < r.cost;
    if (better) it->second = r.cost;
  }
  for (const Row& r : rows)
    if (r.cost == best.at(r.key)) sink(Tuple(r.head));
}

// Resolves the relation every atom/negation step reads: the component's
// working slice for component predicates, the enclosing environment
// otherwise, with one step optionally overridden to read a delta relation.
inline std::vector<const Relation*> bind_step_relations(
    const RulePlan& plan, const std::set<std::string>& scc_preds, const Interpretation& working,
    const Interpretation& env, const Interpretation* delta = nullptr,
    std::size_t driver_literal = static_cast<std::size_t>(-1)) {
  std::vector<const Relation*> rels(plan.steps.size(), &empty_relation());
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& s = plan.steps[i];
    if (s.kind != PlanStep::Kind::atom && s.kind != PlanStep::Kind::negation) continue;
    const Relation* r = nullptr;
    if (delta && s.kind == PlanStep::Kind::atom && s.literal_index == driver_literal) {
      r = delta->find(s.pred);
    } else if (scc_preds.count(s.pred)) {
      r = working.find(s.pred);
    } else {
      r = env.find(s.pred);
    }
    rels[i] = r ? r : &empty_relation();
  }
  return rels;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Immediate consequence operator: one application of all rules against a
// fixed interpretation. Pushed extrema literals are markers for the engine's
// gamma and are skipped; body-resolved extrema apply per rule.
// ---------------------------------------------------------------------------

inline Interpretation immediate_consequence(const std::vector<Rule>& rules,
                                            const Interpretation& i, EvalStats* stats = nullptr) {
  EvalStats local;
  EvalStats& st = stats ? *stats : local;
  detail::IndexCache cache;
  Interpretation derived;
  std::set<std::string> no_scc;
  for (const Rule& rule : rules) {
    detail::RulePlan plan = detail::compile_rule(rule);
    std::vector<const Relation*> rels =
        detail::bind_step_relations(plan, no_scc, i, i);
    Relation& out = derived.rel(rule.head.pred);
    detail::run_plan(plan, rels, cache, st, [&](Tuple t) {
      ++st.derivations;
      out.insert(std::move(t));
    });
  }
  return derived;
}

inline Interpretation immediate_consequence(const Program& p, const Interpretation& i) {
  return immediate_consequence(p.rules, i);
}

// ---------------------------------------------------------------------------
// Component evaluation
// ---------------------------------------------------------------------------

namespace detail {

struct SccContext {
  const Program* program = nullptr;
  std::set<std::string> preds;
  std::vector<std::size_t> exit_rules;  // rule indices, program order
  std::vector<std::size_t> rec_rules;
  std::map<std::string, ExtremaConstraint> gammas;  // pushed constraints by target
};

inline SccContext make_scc_context(const Program& p, const std::vector<std::string>& scc_preds) {
  SccContext ctx;
  ctx.program = &p;
  ctx.preds.insert(scc_preds.begin(), scc_preds.end());
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    const Rule& rule = p.rules[i];
    if (!ctx.preds.count(rule.head.pred)) continue;
    bool recursive = false;
    for (const BodyLiteral& lit : rule.body) {
      const Atom* a = std::get_if<Atom>(&lit);
      if (a && ctx.preds.count(a->pred)) {
        recursive = true;
        break;
      }
    }
    (recursive ? ctx.rec_rules : ctx.exit_rules).push_back(i);
    for (std::size_t j = 0; j < rule.body.size(); ++j) {
      if (!std::holds_alternative<ExtremaLiteral>(rule.body[j])) continue;
      std::optional<ResolvedExtrema> r = resolve_extrema_literal(rule, j);
      if (!r)
        throw Error(ErrorCode::unresolved_constraint,
                    "extrema literal in rule for " + rule.head.pred + " cannot be resolved");
      if (!r->pushed) continue;
      auto [it, fresh] = ctx.gammas.emplace(r->constraint.target, r->constraint);
      if (!fresh && !same_constraint(it->second, r->constraint))
        throw Error(ErrorCode::invalid_argument,
                    "conflicting pushed extrema constraints on " + r->constraint.target);
    }
  }
  return ctx;
}

// gamma-maintained insertion used by the seminaive engine. Keeps, per group,
// only the best-cost tuples seen so far; worse arrivals are dropped before
// storage and an improving arrival retracts the group's stored tuples (also
// scrubbing them from the delta being built).
enum class InsertOutcome { improving, tie, duplicate, dropped };

// members invariant: when empty, the group's stored tuples are exactly the one
// tuple implied by the group key plus `best` (possible only for constraints
// whose group and cost columns tile the whole tuple); when non-empty, it lists
// every stored tuple of the group.
struct GroupState {
  Rational best;
  std::vector<Tuple> members;
};

struct Applier {
  Interpretation* stored = nullptr;
  const std::map<std::string, ExtremaConstraint>* gammas = nullptr;  // may be null: plain
  std::map<std::string, std::unordered_map<Tuple, GroupState, TupleHash>> groups;

  // Per-predicate pointers resolved once, so the per-tuple path skips the
  // string-keyed lookups. All referents live in node-based containers, whose
  // element addresses are stable for the applier's lifetime.
  struct Slot {
    const std::string* pred = nullptr;
    Relation* rel = nullptr;
    std::unordered_map<Tuple, GroupState, TupleHash>* gmap = nullptr;
    const ExtremaConstraint* g = nullptr;  // null: plain set semantics
    // Coverage: group and cost columns together tile [0, tile_arity) exactly.
    // A tuple of that arity is then fully determined by (group key, cost).
    bool tiles = false;
    std::size_t tile_arity = 0;
    std::vector<int> col_to_key;  // column -> group-key index; -1 = cost column

    bool covering(const Tuple& t) const { return tiles && t.size() == tile_arity; }
  };

  Slot& slot(const std::string& pred) {
    auto [it, fresh] = slots_.try_emplace(pred);
    Slot& s = it->second;
    if (fresh) {
      s.pred = &it->first;
      s.rel = &stored->rel(pred);
      if (gammas) {
        auto git = gammas->find(pred);
        if (git != gammas->end()) {
          s.g = &git->second;
          s.gmap = &groups[pred];
          resolve_coverage(s);
        }
      }
    }
    return s;
  }

  // True when insert() could store the tuple or change the group; false when
  // it would certainly answer dropped or duplicate. A group's best cost only
  // tightens while a batch applies, so a rejection here stays a rejection —
  // sweeps use this to drop the bulk of re-derivations before batching them.
  bool admissible(const Slot& s, const Tuple& t) const {
    if (!s.g) return !s.rel->contains(t);
    Rational cost = checked_cost(*s.g, *s.pred, t);
    auto it = s.gmap->find(group_key(*s.g, *s.pred, t));
    if (it == s.gmap->end()) return true;
    const GroupState& st = it->second;
    if (cost == st.best) {
      if (st.members.empty()) return !s.covering(t);  // covering tie == the stored tuple
      return !s.rel->contains(t);
    }
    return s.g->kind == ExtremaKind::min ? cost < st.best : st.best < cost;
  }

  InsertOutcome insert(Slot& s, const Tuple& t, Interpretation* delta_scrub) {
    if (!s.g) return s.rel->insert(t) ? InsertOutcome::improving : InsertOutcome::duplicate;

    Rational cost = checked_cost(*s.g, *s.pred, t);
    Tuple key = group_key(*s.g, *s.pred, t);
    auto it = s.gmap->find(key);
    if (it == s.gmap->end()) {
      s.rel->insert(t);
      GroupState st{cost, {}};
      if (!s.covering(t)) st.members.push_back(t);
      s.gmap->emplace(std::move(key), std::move(st));
      return InsertOutcome::improving;
    }
    GroupState& st = it->second;
    if (cost == st.best) {
      if (st.members.empty()) {
        if (s.covering(t)) return InsertOutcome::duplicate;  // identical to the stored tuple
        if (!s.rel->insert(t)) return InsertOutcome::duplicate;
        st.members.push_back(implied_tuple(s, it->first.data(), st.best));
        st.members.push_back(t);
        return InsertOutcome::tie;
      }
      if (s.rel->insert(t)) {
        st.members.push_back(t);
        return InsertOutcome::tie;
      }
      return InsertOutcome::duplicate;
    }
    bool better = s.g->kind == ExtremaKind::min ? cost < st.best : st.best < cost;
    if (!better) return InsertOutcome::dropped;
    if (st.members.empty()) {
      retract(s, implied_tuple(s, it->first.data(), st.best), delta_scrub);
    } else {
      for (const Tuple& m : st.members) retract(s, m, delta_scrub);
      st.members.clear();
    }
    st.best = cost;
    if (!s.covering(t)) st.members.push_back(t);
    s.rel->insert(t);
    return InsertOutcome::improving;
  }

  InsertOutcome insert(const std::string& pred, const Tuple& t, Interpretation* delta_scrub) {
    return insert(slot(pred), t, delta_scrub);
  }

  static Rational checked_cost(const ExtremaConstraint& g, const std::string& pred,
                               const Tuple& t) {
    if (g.cost_position >= t.size())
      throw Error(ErrorCode::arity_mismatch, "extrema cost position out of range for " + pred);
    const Value& cv = t[g.cost_position];
    if (!cv.is_number())
      throw Error(ErrorCode::sort_mismatch, "extrema cost column of " + pred + " holds a symbol");
    return cv.num();
  }

  static Tuple group_key(const ExtremaConstraint& g, const std::string& pred, const Tuple& t) {
    Tuple key;
    for (std::size_t p : g.group_positions) {
      if (p >= t.size())
        throw Error(ErrorCode::arity_mismatch, "extrema group position out of range for " + pred);
      key.push_back(t[p]);
    }
    return key;
  }

  // The single stored tuple of a member-free group, rebuilt from its key
  // columns and best cost. Valid only for slots whose constraint tiles the
  // tuple.
  static Tuple implied_tuple(const Slot& s, const Value* key, const Rational& best) {
    Tuple t;
    for (std::size_t c = 0; c < s.tile_arity; ++c) {
      int k = s.col_to_key[c];
      if (k >= 0)
        t.push_back(key[static_cast<std::size_t>(k)]);
      else
        t.push_back(Value::number(best));
    }
    return t;
  }

 private:
  static void resolve_coverage(Slot& s) {
    std::size_t n = s.g->group_positions.size() + 1;
    std::vector<int> map(n, -2);
    if (s.g->cost_position >= n) return;
    map[s.g->cost_position] = -1;
    for (std::size_t i = 0; i < s.g->group_positions.size(); ++i) {
      std::size_t p = s.g->group_positions[i];
      if (p >= n || map[p] != -2) return;
      map[p] = static_cast<int>(i);
    }
    s.tiles = true;
    s.tile_arity = n;
    s.col_to_key = std::move(map);
  }

  static void retract(Slot& s, const Tuple& t, Interpretation* delta_scrub) {
    s.rel->erase(t);
    if (delta_scrub) {
      auto dit = delta_scrub->data().find(*s.pred);
      if (dit != delta_scrub->data().end()) dit->second.erase(t);
    }
  }

  std::map<std::string, Slot> slots_;
};

// Open-addressing group-best table for the covering fast lane: keys are a
// fixed number of columns (at most kKeyWidth), probing is linear over a
// power-of-two slot array, and there is no deletion (a group's best only
// tightens, it is never removed). A returned entry pointer stays valid until
// the next find_or_insert call, which may grow the table.
class FlatGroups {
 public:
  static constexpr std::size_t kKeyWidth = 3;

  struct Entry {
    std::size_t hash = 0;  // 0 marks an empty slot; stored hashes are nonzero
    Rational best;
    Value key[kKeyWidth];
  };

  explicit FlatGroups(std::size_t width) : width_(width), slots_(1024) {}

  std::pair<Entry*, bool> find_or_insert(const Value* key) {
    if (entries_ * 4 >= slots_.size() * 3) grow();
    std::size_t h = hash_key(key, width_);
    std::size_t mask = slots_.size() - 1;
    std::size_t i = h & mask;
    while (true) {
      Entry& e = slots_[i];
      if (e.hash == 0) {
        e.hash = h;
        for (std::size_t w = 0; w < width_; ++w) e.key[w] = key[w];
        ++entries_;
        return {&e, true};
      }
      if (e.hash == h && keys_equal(e.key, key)) return {&e, false};
      i = (i + 1) & mask;
    }
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const Entry& e : slots_)
      if (e.hash != 0) fn(e);
  }

  std::size_t size() const { return entries_; }

 private:
  // FNV over the column hashes, then scattered so the low bits that pick the
  // probe start are well mixed.
  static std::size_t hash_key(const Value* key, std::size_t width) {
    std::size_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < width; ++i) h = (h ^ key[i].hash()) * 0x100000001B3ULL;
    h ^= h >> 30;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 27;
    return h ? h : 1;
  }

  bool keys_equal(const Value* a, const Value* b) const {
    for (std::size_t i = 0; i < width_; ++i)
      if (!(a[i] == b[i])) return false;
    return true;
  }

  void grow() {
    std::vector<Entry> old = std::move(slots_);
    slots_.assign(old.size() * 2, Entry{});
    std::size_t mask = slots_.size() - 1;
    for (Entry& e : old) {
      if (e.hash == 0) continue;
      std::size_t i = e.hash & mask;
      while (slots_[i].hash != 0) i = (i + 1) & mask;
      slots_[i] = std::move(e);
    }
  }

  std::size_t width_;
  std::vector<Entry> slots_;
  std::size_t entries_ = 0;
};

inline void merge_into(Interpretation& dst, const Interpretation& src) {
  for (const auto& [pred, rel] : src.data()) {
    Relation& out = dst.rel(pred);
    for (const Tuple& t : rel) out.insert(t);
  }
}

inline std::size_t count_new(const Interpretation& next, const Interpretation& prev) {
  std::size_t n = 0;
  for (const auto& [pred, rel] : next.data())
    for (const Tuple& t : rel)
      if (!prev.contains(pred, t)) ++n;
  return n;
}

inline Interpretation apply_gammas(const std::map<std::string, ExtremaConstraint>& gammas,
                                   Interpretation u) {
  for (const auto& [target, g] : gammas) {
    const Relation* r = u.find(target);
    if (r && !r->empty()) u.data()[target] = apply_gamma(g, *r);
  }
  return u;
}

struct CompiledRule {
  RulePlan plan;
  std::vector<std::size_t> driver_literals;  // positive body atoms in the component
};

inline SccResult run_scc(const SccContext& ctx, const EvalOptions& opts,
                         const Interpretation& env) {
  const Program& p = *ctx.program;
  SccResult out;
  Interpretation& stored = out.slice;
  EvalStats& stats = out.stats;
  const bool tracing = opts.trace_enabled;
  const bool gammas_active = opts.push_enabled && !ctx.gammas.empty();

  IndexCache cache;

  // E: facts of the component's predicates plus one pass over the exit rules
  // (whose bodies read only lower strata).
  Interpretation exitset;
  for (const std::string& pred : ctx.preds) {
    auto it = p.facts.find(pred);
    if (it != p.facts.end()) exitset.data()[pred] = it->second;
  }
  std::size_t exit_derivations = 0;
  for (std::size_t ri : ctx.exit_rules) {
    const Rule& rule = p.rules[ri];
    RulePlan plan = compile_rule(rule);
    std::vector<const Relation*> rels = bind_step_relations(plan, ctx.preds, stored, env);
    Relation& dst = exitset.rel(rule.head.pred);
    run_plan(plan, rels, cache, stats, [&](Tuple t) {
      ++stats.derivations;
      ++exit_derivations;
      dst.insert(std::move(t));
    });
  }

  if (tracing) {
    out.trace.emplace();
    out.trace->scc.assign(ctx.preds.begin(), ctx.preds.end());
    std::set<std::string> read;
    for (std::size_t ri : ctx.exit_rules) {
      for (const BodyLiteral& lit : p.rules[ri].body) {
        if (const Atom* a = std::get_if<Atom>(&lit)) read.insert(a->pred);
        if (const Negation* n = std::get_if<Negation>(&lit)) read.insert(n->atom.pred);
      }
    }
    for (std::size_t ri : ctx.rec_rules) {
      for (const BodyLiteral& lit : p.rules[ri].body) {
        if (const Atom* a = std::get_if<Atom>(&lit)) read.insert(a->pred);
        if (const Negation* n = std::get_if<Negation>(&lit)) read.insert(n->atom.pred);
      }
    }
    for (const std::string& pred : read) {
      if (ctx.preds.count(pred)) continue;
      if (const Relation* r = env.find(pred)) out.trace->env.data()[pred] = *r;
    }
  }

  // Non-recursive component: one pass, then any pushed constraint acts as a
  // plain post-selection.
  if (ctx.rec_rules.empty()) {
    stored = std::move(exitset);
    if (!ctx.gammas.empty()) stored = apply_gammas(ctx.gammas, std::move(stored));
    if (tracing && out.trace) out.trace->snapshots.clear(), out.trace.reset();
    return out;
  }

  std::vector<CompiledRule> rec;
  for (std::size_t ri : ctx.rec_rules) {
    CompiledRule cr;
    cr.plan = compile_rule(p.rules[ri]);
    for (const PlanStep& s : cr.plan.steps)
      if (s.kind == PlanStep::Kind::atom && ctx.preds.count(s.pred))
        cr.driver_literals.push_back(s.literal_index);
    rec.push_back(std::move(cr));
  }

  // Full sweep of T over the recursive rules against `base`; derived rows go
  // to `emit`. Used by the naive engine every iteration and by the seminaive
  // engine for verification sweeps and trace materialization.
  auto full_sweep = [&](const Interpretation& base, EvalStats& st, auto&& emit) {
    for (CompiledRule& cr : rec) {
      std::vector<const Relation*> rels = bind_step_relations(cr.plan, ctx.preds, base, env);
      run_plan(cr.plan, rels, cache, st, [&](Tuple t) { emit(cr.plan.rule->head.pred, std::move(t)); });
    }
  };

  if (opts.engine == EvalOptions::Engine::naive) {
    stored = exitset;
    if (gammas_active) stored = apply_gammas(ctx.gammas, std::move(stored));
    if (tracing)
      out.trace->snapshots.push_back(
          {exitset, stored, stored.total_tuples(), exit_derivations});
    while (true) {
      if (out.iterations >= opts.max_iterations) {
        out.status = TermStatus::iteration_cap;
        break;
      }
      ++out.iterations;
      std::size_t derivs_before = stats.derivations;
      Interpretation u = stored;
      merge_into(u, exitset);
      full_sweep(stored, stats, [&](const std::string& pred, Tuple t) {
        ++stats.derivations;
        u.rel(pred).insert(std::move(t));
      });
      Interpretation next = gammas_active ? apply_gammas(ctx.gammas, u) : u;
      if (tracing)
        out.trace->snapshots.push_back(
            {u, next, count_new(next, stored), stats.derivations - derivs_before});
      bool done = next == stored;
      stored = std::move(next);
      cache.clear();
      if (done) break;
    }
  } else {
    Applier ap;
    ap.stored = &stored;
    if (gammas_active) ap.gammas = &ctx.gammas;
    for (const auto& [pred, rel] : exitset.data()) {
      Applier::Slot& s = ap.slot(pred);
      for (const Tuple& t : rel) ap.insert(s, t, nullptr);
    }
    Interpretation delta = stored;
    if (tracing)
      out.trace->snapshots.push_back(
          {exitset, stored, delta.total_tuples(), exit_derivations});

    // Per-rule head admission data. When the head predicate carries a pushed
    // constraint whose columns all fall inside the head, a candidate can be
    // admitted or rejected straight from the join's slot assignment, before
    // the head tuple is ever materialized.
    struct RuleSink {
      Applier::Slot* slot = nullptr;
      bool direct = false;
      bool covering = false;                  // head arity matches the slot's tiling
      std::vector<int> group_slot;            // per group position: slot index, or -1
      std::vector<const Value*> group_const;  // constant used when the slot index is -1
      int cost_slot = -1;
      const Value* cost_const = nullptr;
    };
    std::vector<RuleSink> sinks(rec.size());
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const RulePlan& plan = rec[k].plan;
      RuleSink& rs = sinks[k];
      rs.slot = &ap.slot(plan.rule->head.pred);
      const ExtremaConstraint* g = rs.slot->g;
      std::size_t arity = plan.head_slot.size();
      if (!g || plan.has_group || g->cost_position >= arity) continue;
      bool inside = true;
      for (std::size_t p : g->group_positions) inside = inside && p < arity;
      if (!inside) continue;
      rs.direct = true;
      rs.covering = rs.slot->tiles && arity == rs.slot->tile_arity;
      for (std::size_t p : g->group_positions) {
        rs.group_slot.push_back(plan.head_slot[p]);
        rs.group_const.push_back(plan.head_slot[p] >= 0 ? nullptr : &*plan.head_const[p]);
      }
      rs.cost_slot = plan.head_slot[g->cost_position];
      if (rs.cost_slot < 0) rs.cost_const = &*plan.head_const[g->cost_position];
    }

    // Covering fast lane. When every recursive rule writes through a pushed
    // constraint that tiles its head, each group stores exactly one tuple,
    // implied by (key, best) — so admission and application fuse into a single
    // probe of a flat table, the head relations stop being maintained
    // per-insert, and they are rebuilt from the tables only when a sweep needs
    // to scan them. Requires that the deferred (table-backed) predicates are
    // only ever read through the delta: each rule may read a deferred
    // predicate in at most one atom, and that atom must be the rule's only
    // driver. Observable behavior (results, delta sequence, iteration and
    // derivation counts) matches the general lane; tracing needs the general
    // lane's materialized states.
    bool fast = !tracing && gammas_active && !rec.empty();
    for (const RuleSink& rs : sinks)
      fast = fast && rs.direct && rs.covering &&
             rs.slot->g->group_positions.size() <= FlatGroups::kKeyWidth;
    std::set<std::string> deferred;
    if (fast) {
      for (const RuleSink& rs : sinks) deferred.insert(*rs.slot->pred);
      for (const CompiledRule& cr : rec) {
        std::size_t reads = 0;
        for (const PlanStep& s : cr.plan.steps) {
          if (s.kind == PlanStep::Kind::atom && deferred.count(s.pred)) ++reads;
          if (s.kind == PlanStep::Kind::negation && deferred.count(s.pred)) fast = false;
        }
        if (reads > 1 || (reads == 1 && cr.driver_literals.size() != 1)) fast = false;
      }
    }
    std::map<std::string, FlatGroups> tables;
    if (fast) {
      // Seeding went through the general insert; groups holding listed
      // members (possible only with mixed-arity seeds) disqualify the lane.
      for (const std::string& pred : deferred) {
        std::size_t width = ap.slot(pred).g->group_positions.size();
        FlatGroups& fg = tables.emplace(pred, FlatGroups(width)).first->second;
        for (const auto& [key, st] : ap.groups[pred]) {
          if (!st.members.empty()) {
            fast = false;
            break;
          }
          fg.find_or_insert(key.data()).first->best = st.best;
        }
        if (!fast) break;
      }
      if (!fast) tables.clear();
    }

    std::vector<std::pair<Applier::Slot*, Tuple>> batch;
    Tuple key_scratch;

    if (fast) {
      std::vector<FlatGroups*> sink_fg;
      for (const RuleSink& rs : sinks) sink_fg.push_back(&tables.at(*rs.slot->pred));

      Interpretation new_delta;
      Relation* nd_rel = nullptr;
      const std::string* nd_pred = nullptr;
      auto delta_rel_for = [&](const Applier::Slot& s) -> Relation& {
        if (nd_pred != s.pred) {
          nd_pred = s.pred;
          nd_rel = &new_delta.rel(*s.pred);
        }
        return *nd_rel;
      };
      bool changed = false;
      bool dirty = false;  // tables have advanced past the stored relations
      std::array<Value, FlatGroups::kKeyWidth> key_buf;

      // Fused admission + application for one derived row. An improving entry
      // scrubs the group's previous winner from the delta being built, exactly
      // like the general lane's batched insert.
      auto fast_row = [&](std::size_t k, const std::vector<Value>& slots) {
        const RuleSink& rs = sinks[k];
        const Applier::Slot& s = *rs.slot;
        const Value& cv =
            rs.cost_slot >= 0 ? slots[static_cast<std::size_t>(rs.cost_slot)] : *rs.cost_const;
        if (!cv.is_number())
          throw Error(ErrorCode::sort_mismatch,
                      "extrema cost column of " + *s.pred + " holds a symbol");
        Rational cost = cv.num();
        for (std::size_t i = 0; i < rs.group_slot.size(); ++i)
          key_buf[i] = rs.group_slot[i] >= 0 ? slots[static_cast<std::size_t>(rs.group_slot[i])]
                                             : *rs.group_const[i];
        auto [e, fresh] = sink_fg[k]->find_or_insert(key_buf.data());
        if (!fresh) {
          if (cost == e->best) return;  // identical to the group's stored tuple
          bool better = s.g->kind == ExtremaKind::min ? cost < e->best : e->best < cost;
          if (!better) return;
          delta_rel_for(s).erase(Applier::implied_tuple(s, e->key, e->best));
        }
        e->best = cost;
        changed = true;
        dirty = true;
        delta_rel_for(s).insert(Applier::implied_tuple(s, e->key, cost));
      };

      auto fast_sweep = [&](EvalStats& st, bool count, const Interpretation* d) {
        for (std::size_t k = 0; k < rec.size(); ++k) {
          CompiledRule& cr = rec[k];
          auto drive = [&](const Interpretation* dd, std::size_t driver) {
            std::vector<const Relation*> rels =
                bind_step_relations(cr.plan, ctx.preds, stored, env, dd, driver);
            run_plan_raw(cr.plan, rels, cache, st, [&](const std::vector<Value>& slots) {
              if (count) ++st.derivations;
              fast_row(k, slots);
            });
          };
          if (d) {
            for (std::size_t driver : cr.driver_literals) drive(d, driver);
          } else {
            drive(nullptr, static_cast<std::size_t>(-1));
          }
        }
      };

      // Rebuilds each deferred predicate's relation from its table, for the
      // sweeps (and the final result) that read it as a scan source.
      auto materialize = [&]() {
        if (!dirty) return;
        for (const std::string& pred : deferred) {
          Applier::Slot& s = ap.slot(pred);
          Relation fresh_rel;
          tables.at(pred).for_each([&](const FlatGroups::Entry& e) {
            fresh_rel.insert(Applier::implied_tuple(s, e.key, e.best));
          });
          *s.rel = std::move(fresh_rel);
        }
        dirty = false;
      };

      while (true) {
        if (out.iterations >= opts.max_iterations) {
          out.status = TermStatus::iteration_cap;
          break;
        }
        ++out.iterations;
        bool verify = delta.total_tuples() == 0;
        new_delta = Interpretation();
        nd_pred = nullptr;
        nd_rel = nullptr;
        changed = false;
        if (verify) {
          materialize();
          EvalStats scratch;  // verification work is not charged to the run
          fast_sweep(scratch, false, nullptr);
          for (const auto& [pred, rel] : exitset.data()) {
            auto ti = tables.find(pred);
            if (ti == tables.end()) {
              Applier::Slot& es = ap.slot(pred);
              for (const Tuple& t : rel) {
                if (!ap.admissible(es, t)) continue;
                InsertOutcome o = ap.insert(es, t, &new_delta);
                if (o == InsertOutcome::improving) {
                  new_delta.rel(pred).insert(t);
                  changed = true;
                } else if (o == InsertOutcome::tie) {
                  changed = true;
                }
              }
              continue;
            }
            Applier::Slot& s = ap.slot(pred);
            for (const Tuple& t : rel) {
              Rational cost = Applier::checked_cost(*s.g, pred, t);
              Tuple key = Applier::group_key(*s.g, pred, t);
              auto [e, fresh] = ti->second.find_or_insert(key.data());
              if (!fresh) {
                if (cost == e->best) continue;
                bool better = s.g->kind == ExtremaKind::min ? cost < e->best : e->best < cost;
                if (!better) continue;
                delta_rel_for(s).erase(Applier::implied_tuple(s, e->key, e->best));
              }
              e->best = cost;
              changed = true;
              dirty = true;
              delta_rel_for(s).insert(Applier::implied_tuple(s, e->key, cost));
            }
          }
        } else {
          fast_sweep(stats, true, &delta);
        }
        delta = std::move(new_delta);
        cache.clear();
        if (verify && !changed) break;
      }
      materialize();
    } else {
      // Slot-level replica of Applier::admissible for direct sinks. The one
      // divergence: a tie in a group with listed members passes (insert() then
      // answers duplicate, which never marks the iteration as changed).
      auto row_admissible = [&](const RuleSink& rs, const std::vector<Value>& slots) -> bool {
        const Applier::Slot& s = *rs.slot;
        const Value& cv =
            rs.cost_slot >= 0 ? slots[static_cast<std::size_t>(rs.cost_slot)] : *rs.cost_const;
        if (!cv.is_number())
          throw Error(ErrorCode::sort_mismatch,
                      "extrema cost column of " + *s.pred + " holds a symbol");
        Rational cost = cv.num();
        key_scratch.clear();
        for (std::size_t i = 0; i < rs.group_slot.size(); ++i)
          key_scratch.push_back(rs.group_slot[i] >= 0
                                    ? slots[static_cast<std::size_t>(rs.group_slot[i])]
                                    : *rs.group_const[i]);
        auto it = s.gmap->find(key_scratch);
        if (it == s.gmap->end()) return true;
        const GroupState& st = it->second;
        if (cost == st.best) return !(st.members.empty() && rs.covering);
        return s.g->kind == ExtremaKind::min ? cost < st.best : st.best < cost;
      };

      auto head_tuple = [](const RulePlan& plan, const std::vector<Value>& slots) {
        Tuple h;
        for (std::size_t i = 0; i < plan.head_slot.size(); ++i)
          h.push_back(plan.head_slot[i] >= 0 ? slots[static_cast<std::size_t>(plan.head_slot[i])]
                                             : *plan.head_const[i]);
        return h;
      };

      // One pass of a recursive rule against `stored` (optionally driving one
      // literal from the delta), feeding admissible candidates into `batch`.
      // Derivations are counted only on delta sweeps; verification sweeps
      // charge their joins to a scratch counter instead.
      auto sweep_rule = [&](CompiledRule& cr, const RuleSink& rs, EvalStats& st, bool count,
                            const Interpretation* d, std::size_t driver) {
        std::vector<const Relation*> rels =
            bind_step_relations(cr.plan, ctx.preds, stored, env, d, driver);
        if (cr.plan.has_group) {
          run_plan(cr.plan, rels, cache, st, [&](Tuple t) {
            if (count) ++st.derivations;
            if (ap.admissible(*rs.slot, t)) batch.emplace_back(rs.slot, std::move(t));
          });
        } else if (rs.direct) {
          run_plan_raw(cr.plan, rels, cache, st, [&](const std::vector<Value>& slots) {
            if (count) ++st.derivations;
            if (row_admissible(rs, slots)) batch.emplace_back(rs.slot, head_tuple(cr.plan, slots));
          });
        } else {
          run_plan_raw(cr.plan, rels, cache, st, [&](const std::vector<Value>& slots) {
            if (count) ++st.derivations;
            Tuple t = head_tuple(cr.plan, slots);
            if (ap.admissible(*rs.slot, t)) batch.emplace_back(rs.slot, std::move(t));
          });
        }
      };
      auto sweep_rules = [&](EvalStats& st, bool count, const Interpretation* d) {
        for (std::size_t k = 0; k < rec.size(); ++k) {
          if (d) {
            for (std::size_t driver : rec[k].driver_literals)
              sweep_rule(rec[k], sinks[k], st, count, d, driver);
          } else {
            sweep_rule(rec[k], sinks[k], st, count, nullptr, static_cast<std::size_t>(-1));
          }
        }
      };

      while (true) {
        if (out.iterations >= opts.max_iterations) {
          out.status = TermStatus::iteration_cap;
          break;
        }
        ++out.iterations;
        std::size_t derivs_before = stats.derivations;
        bool verify = delta.total_tuples() == 0;
        batch.clear();
        if (verify) {
          EvalStats scratch;  // verification work is not charged to the run
          sweep_rules(scratch, false, nullptr);
          for (const auto& [pred, rel] : exitset.data()) {
            Applier::Slot& es = ap.slot(pred);
            for (const Tuple& t : rel)
              if (ap.admissible(es, t)) batch.emplace_back(&es, t);
          }
        } else {
          sweep_rules(stats, true, &delta);
        }

        Interpretation trace_u;
        if (tracing) {
          // U_k = T(I_{k-1}) ∪ I_{k-1} ∪ E, materialized with a full sweep.
          trace_u = stored;
          merge_into(trace_u, exitset);
          EvalStats scratch;
          full_sweep(stored, scratch, [&](const std::string& pred, Tuple t) {
            trace_u.rel(pred).insert(std::move(t));
          });
        }

        Interpretation new_delta;
        bool changed = false;
        const Applier::Slot* last_slot = nullptr;
        Relation* delta_rel = nullptr;
        for (auto& [s, t] : batch) {
          InsertOutcome o = ap.insert(*s, t, &new_delta);
          if (o == InsertOutcome::improving) {
            if (s != last_slot) {
              last_slot = s;
              delta_rel = &new_delta.rel(*s->pred);
            }
            delta_rel->insert(std::move(t));
            changed = true;
          } else if (o == InsertOutcome::tie) {
            changed = true;  // stored grew; not a delta seed per the discipline
          }
        }
        delta = std::move(new_delta);
        if (tracing)
          out.trace->snapshots.push_back({std::move(trace_u), stored, delta.total_tuples(),
                                          stats.derivations - derivs_before});
        cache.clear();
        if (verify && !changed) break;
      }
    }
  }

  // With pushing disabled the constraint is applied once, to the final state
  // (the classical "select after the fixpoint" semantics).
  if (!opts.push_enabled && !ctx.gammas.empty())
    stored = apply_gammas(ctx.gammas, std::move(stored));
  return out;
}

}  // namespace detail

// Evaluates one (presumed recursive) component of `p` to fixpoint with the
// naive engine: every iteration recomputes T in full, unions in the exit
// relations, applies the pushed constraint, and compares against the previous
// state. `env` supplies the relations of lower strata.
inline SccResult naive_fixpoint(const Program& p, const std::vector<std::string>& scc,
                                EvalOptions opts = {}, const Interpretation& env = {}) {
  opts.engine = EvalOptions::Engine::naive;
  return detail::run_scc(detail::make_scc_context(p, scc), opts, env);
}

// Seminaive variant with the aggregate-aware delta discipline: new tuples
// enter the next delta only when they strictly improve their group's best
// cost; worse tuples are dropped before storage, ties are stored but do not
// seed the delta. A full verification sweep runs once the delta drains.
inline SccResult seminaive_fixpoint(const Program& p, const std::vector<std::string>& scc,
                                    EvalOptions opts = {}, const Interpretation& env = {}) {
  opts.engine = EvalOptions::Engine::seminaive;
  return detail::run_scc(detail::make_scc_context(p, scc), opts, env);
}

// ---------------------------------------------------------------------------
// Whole-program evaluation: stratify, then evaluate components bottom-up.
// ---------------------------------------------------------------------------

inline EvalResult evaluate(const Program& p, const EvalOptions& opts = {}) {
  AnalysisResult an = analyze(p);
  if (!an.ok())
    throw Error(ErrorCode::invalid_argument,
                "program rejected by analysis:\n" + render_diagnostics(an.diagnostics));

  EvalResult res;
  Interpretation state;
  for (const auto& [pred, rel] : p.facts) state.data()[pred] = rel;

  std::set<std::string> heads;
  for (const Rule& r : p.rules) heads.insert(r.head.pred);

  for (const std::vector<std::string>& level : an.strata.levels) {
    bool has_rules = false;
    for (const std::string& pred : level)
      if (heads.count(pred)) has_rules = true;
    if (!has_rules) continue;  // purely extensional: facts are already in state

    SccResult scc = detail::run_scc(detail::make_scc_context(p, level), opts, state);
    res.stats += scc.stats;
    if (scc.iterations > res.iterations) res.iterations = scc.iterations;
    if (scc.status == TermStatus::iteration_cap) res.status = TermStatus::iteration_cap;
    if (scc.trace) res.traces.push_back(std::move(*scc.trace));
    for (auto& [pred, rel] : scc.slice.data()) state.data()[pred] = std::move(rel);
  }

  res.interp = std::move(state);
  return res;
}

}  // namespace premlog
