#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "premlog/analysis.hpp"
#include "premlog/ast.hpp"
#include "premlog/errors.hpp"
#include "premlog/gamma.hpp"

namespace premlog {

inline constexpr const char* kBetterPrefix = "__better_";

enum class RewriteKind { push, unpush, negation, equality };

inline const char* rewrite_kind_name(RewriteKind k) {
  switch (k) {
    case RewriteKind::push: return "push";
    case RewriteKind::unpush: return "unpush";
    case RewriteKind::negation: return "negation";
    case RewriteKind::equality: return "equality";
  }
  return "?";
}

// Record of one source-to-source transformation: which rules changed, as
// (before, after) pairs; a missing `before` is an added rule, a missing
// `after` a deleted one. Fact relations are never touched by any rewrite.
struct RewritePlan {
  RewriteKind kind = RewriteKind::push;
  ExtremaConstraint target;
  std::vector<std::pair<std::optional<Rule>, std::optional<Rule>>> affected;
  bool pushed = false;  // the output carries the constraint in pushed position
};

inline RewritePlan make_rewrite_plan(RewriteKind kind, const ExtremaConstraint& target,
                                     const Program& before, const Program& after, bool pushed) {
  RewritePlan plan;
  plan.kind = kind;
  plan.target = target;
  plan.pushed = pushed;
  // Two-pointer alignment: rewrites edit rules in place and insert/delete
  // single rules, so matching ahead by one resynchronizes the walk.
  const auto& b = before.rules;
  const auto& a = after.rules;
  std::size_t i = 0, j = 0;
  while (i < b.size() || j < a.size()) {
    if (i < b.size() && j < a.size() && b[i] == a[j]) {
      ++i, ++j;
      continue;
    }
    bool inserted = j < a.size() &&
                    (i >= b.size() || (j + 1 < a.size() && i < b.size() && b[i] == a[j + 1]));
    if (inserted) {
      plan.affected.emplace_back(std::nullopt, a[j++]);
      continue;
    }
    bool deleted = i < b.size() &&
                   (j >= a.size() || (i + 1 < b.size() && j < a.size() && b[i + 1] == a[j]));
    if (deleted) {
      plan.affected.emplace_back(b[i++], std::nullopt);
      continue;
    }
    plan.affected.emplace_back(b[i++], a[j++]);
  }
  return plan;
}

// All extrema literals of `p` with their resolved constraints, in rule order.
// Literals that do not resolve are skipped (analysis reports those).
inline std::vector<ResolvedExtrema> find_extrema_sites(const Program& p) {
  std::vector<ResolvedExtrema> out;
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    for (std::size_t j = 0; j < p.rules[i].body.size(); ++j) {
      if (!std::holds_alternative<ExtremaLiteral>(p.rules[i].body[j])) continue;
      if (std::optional<ResolvedExtrema> r = resolve_extrema_literal(p.rules[i], j)) {
        r->rule_index = i;
        out.push_back(std::move(*r));
      }
    }
  }
  return out;
}

namespace detail {

inline void collect_rule_vars(const Rule& r, std::set<std::string>& out) {
  auto from_atom = [&](const Atom& a) {
    for (const Term& t : a.args)
      if (t.is_variable()) out.insert(t.var);
  };
  from_atom(r.head);
  for (const BodyLiteral& lit : r.body) {
    if (const Atom* a = std::get_if<Atom>(&lit)) {
      from_atom(*a);
    } else if (const Negation* n = std::get_if<Negation>(&lit)) {
      from_atom(n->atom);
    } else if (const Comparison* c = std::get_if<Comparison>(&lit)) {
      c->lhs.collect_vars(out);
      c->rhs.collect_vars(out);
    } else if (const Binding* b = std::get_if<Binding>(&lit)) {
      out.insert(b->var);
      b->expr.collect_vars(out);
    } else if (const ExtremaLiteral* e = std::get_if<ExtremaLiteral>(&lit)) {
      for (const std::string& v : e->group_vars) out.insert(v);
      out.insert(e->cost_var);
    }
  }
}

inline std::string fresh_var(const std::string& base, const std::set<std::string>& used) {
  for (int i = 2;; ++i) {
    std::string candidate = base + std::to_string(i);
    if (!used.count(candidate)) return candidate;
  }
}

inline ArithExpr subst_expr(const ArithExpr& e, const std::string& var, const Value& val) {
  switch (e.op) {
    case ArithExpr::Op::constant: return e;
    case ArithExpr::Op::variable:
      return e.var == var ? ArithExpr::constant(val, e.span) : e;
    default:
      return ArithExpr::binary(e.op, subst_expr(*e.lhs, var, val), subst_expr(*e.rhs, var, val),
                               e.span);
  }
}

inline Atom subst_atom(const Atom& a, const std::string& var, const Value& val) {
  Atom out = a;
  for (Term& t : out.args)
    if (t.is_variable() && t.var == var) t = Term::constant(val, t.span);
  return out;
}

// Substitutes var := val throughout a rule. Fails (returns nullopt) when the
// variable occurs where only a variable is syntactically allowed (an extrema
// literal or a binding target).
inline std::optional<Rule> subst_rule(const Rule& r, const std::string& var, const Value& val) {
  Rule out = r;
  out.head = subst_atom(out.head, var, val);
  for (BodyLiteral& lit : out.body) {
    if (Atom* a = std::get_if<Atom>(&lit)) {
      *a = subst_atom(*a, var, val);
    } else if (Negation* n = std::get_if<Negation>(&lit)) {
      n->atom = subst_atom(n->atom, var, val);
    } else if (Comparison* c = std::get_if<Comparison>(&lit)) {
      c->lhs = subst_expr(c->lhs, var, val);
      c->rhs = subst_expr(c->rhs, var, val);
    } else if (Binding* b = std::get_if<Binding>(&lit)) {
      if (b->var == var) return std::nullopt;
      b->expr = subst_expr(b->expr, var, val);
    } else if (ExtremaLiteral* e = std::get_if<ExtremaLiteral>(&lit)) {
      if (e->cost_var == var) return std::nullopt;
      for (const std::string& g : e->group_vars)
        if (g == var) return std::nullopt;
    }
  }
  return out;
}

// The extrema literal a pushed rule carries, spelled with the head's variable
// names at the constraint's columns. Fails when a needed head position does
// not hold a distinct variable.
inline std::optional<ExtremaLiteral> literal_from_head(const ExtremaConstraint& gamma,
                                                       const Atom& head, SourceSpan span = {}) {
  ExtremaLiteral lit;
  lit.kind = gamma.kind;
  lit.span = span;
  std::set<std::string> seen;
  for (std::size_t pos : gamma.group_positions) {
    if (pos >= head.args.size() || !head.args[pos].is_variable()) return std::nullopt;
    const std::string& v = head.args[pos].var;
    if (!seen.insert(v).second) return std::nullopt;
    lit.group_vars.push_back(v);
  }
  if (gamma.cost_position >= head.args.size() || !head.args[gamma.cost_position].is_variable())
    return std::nullopt;
  lit.cost_var = head.args[gamma.cost_position].var;
  if (seen.count(lit.cost_var)) return std::nullopt;
  return lit;
}

[[noreturn]] inline void inapplicable(const std::string& why) {
  throw Error(ErrorCode::rewrite_inapplicable, why);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// negation_encoding: replace a post-constraint `is_min/is_max` by stratified
// negation of a fresh `__better_<pred>` predicate (the classical encoding).
// ---------------------------------------------------------------------------

inline Program negation_encoding(const ExtremaConstraint& gamma, const Program& p) {
  AnalysisResult an = analyze(p);
  std::vector<ResolvedExtrema> sites;
  for (const ResolvedExtrema& r : find_extrema_sites(p))
    if (same_constraint(r.constraint, gamma)) sites.push_back(r);
  if (sites.empty()) {
    bool any_extrema = false;
    for (const Rule& r : p.rules)
      for (const BodyLiteral& lit : r.body)
        if (std::holds_alternative<ExtremaLiteral>(lit)) any_extrema = true;
    if (!any_extrema) return p;  // nothing to encode: identity
    detail::inapplicable("the given constraint does not occur in the program");
  }
  if (sites.size() > 1)
    detail::inapplicable("the constraint occurs in more than one rule");
  const ResolvedExtrema& site = sites.front();
  if (an.strata.rule_kinds.size() == p.rules.size() &&
      an.strata.rule_kinds[site.rule_index] == RuleKind::recursive)
    detail::inapplicable(
        "the constraint sits in a recursive rule (pushed form); transfer it out first");
  if (site.pushed)
    detail::inapplicable("the constraint is in pushed position; transfer it out first");

  const Rule& final_rule = p.rules[site.rule_index];
  // The body atom the constraint resolved against supplies the column layout.
  const Atom* target_atom = nullptr;
  for (const BodyLiteral& lit : final_rule.body) {
    const Atom* a = std::get_if<Atom>(&lit);
    if (a && detail::bind_extrema(std::get<ExtremaLiteral>(final_rule.body[site.literal_index]),
                                  *a)) {
      target_atom = a;
      break;
    }
  }
  if (!target_atom) detail::inapplicable("no body atom carries the constrained columns");

  std::string aux_pred = std::string(kBetterPrefix) + gamma.target;
  for (const Rule& r : p.rules)
    if (r.head.pred == aux_pred)
      detail::inapplicable("auxiliary predicate " + aux_pred + " already exists");
  if (p.facts.count(aux_pred))
    detail::inapplicable("auxiliary predicate " + aux_pred + " already exists");

  std::set<std::string> used;
  detail::collect_rule_vars(final_rule, used);
  const std::string& cost_var = target_atom->args[gamma.cost_position].var;
  std::string smaller = detail::fresh_var(cost_var, used);

  // Auxiliary rule: __better_q(args) :- q(args with fresh cost), q(args), fresh < cost.
  Atom witness = *target_atom;
  witness.args[gamma.cost_position] = Term::variable(smaller);
  Rule aux;
  aux.head = Atom{aux_pred, target_atom->args, {}};
  aux.body.emplace_back(witness);
  aux.body.emplace_back(*target_atom);
  CmpOp dir = gamma.kind == ExtremaKind::min ? CmpOp::lt : CmpOp::gt;
  aux.body.emplace_back(
      Comparison{dir, ArithExpr::variable(smaller), ArithExpr::variable(cost_var), {}});

  Program out = p;
  Rule& edited = out.rules[site.rule_index];
  edited.body[site.literal_index] = Negation{Atom{aux_pred, target_atom->args, {}}, {}};
  out.rules.insert(out.rules.begin() + static_cast<std::ptrdiff_t>(site.rule_index) + 1, aux);
  return out;
}

// ---------------------------------------------------------------------------
// push_extrema: move a post-constraint from its final rule into the recursive
// rules of the constrained predicate.
// ---------------------------------------------------------------------------

inline Program push_extrema(const ExtremaConstraint& gamma, const Program& p) {
  std::vector<ResolvedExtrema> all = find_extrema_sites(p);
  std::vector<ResolvedExtrema> sites;
  for (const ResolvedExtrema& r : all)
    if (!r.pushed && same_constraint(r.constraint, gamma)) sites.push_back(r);
  if (sites.empty())
    detail::inapplicable("the given constraint does not occur as a post-constraint");
  if (sites.size() > 1)
    detail::inapplicable("the constraint occurs in more than one rule");
  for (const ResolvedExtrema& r : all)
    if (r.constraint.target == gamma.target && !same_constraint(r.constraint, gamma))
      detail::inapplicable("multiple distinct extrema on " + gamma.target + " are unsupported");

  const std::string& q = gamma.target;
  bool defined = p.facts.count(q) > 0;
  for (const Rule& r : p.rules)
    if (r.head.pred == q) defined = true;
  if (!defined) detail::inapplicable("predicate " + q + " is not defined in the program");

  AnalysisResult an = analyze(p);
  const ResolvedExtrema& site = sites.front();
  if (an.strata.rule_kinds[site.rule_index] == RuleKind::recursive)
    detail::inapplicable("the constraint already sits in a recursive rule");

  // No recursion behind q: the constraint is already a plain post-selection.
  std::vector<std::size_t> rec_rules;
  for (std::size_t i = 0; i < p.rules.size(); ++i)
    if (p.rules[i].head.pred == q && an.strata.rule_kinds[i] == RuleKind::recursive)
      rec_rules.push_back(i);
  if (rec_rules.empty()) return p;

  Program out = p;
  for (std::size_t ri : rec_rules) {
    Rule& rule = out.rules[ri];
    std::optional<ExtremaLiteral> lit = detail::literal_from_head(gamma, rule.head);
    if (!lit)
      detail::inapplicable("head of a recursive rule of " + q +
                           " does not expose the constrained columns as distinct variables");
    rule.body.emplace_back(std::move(*lit));
    std::optional<ResolvedExtrema> check =
        resolve_extrema_literal(rule, rule.body.size() - 1);
    if (!check || !check->pushed || !same_constraint(check->constraint, gamma))
      detail::inapplicable("pushing into a recursive rule of " + q +
                           " would not resolve to the head (ambiguous body columns)");
  }
  Rule& final_rule = out.rules[site.rule_index];
  final_rule.body.erase(final_rule.body.begin() +
                        static_cast<std::ptrdiff_t>(site.literal_index));
  return out;
}

// ---------------------------------------------------------------------------
// transfer_out: inverse of push_extrema — strip the pushed constraint from
// the recursive rules and reinstate it as a post-constraint in the unique
// non-recursive rule consuming the constrained predicate.
// ---------------------------------------------------------------------------

inline Program transfer_out(const Program& p) {
  std::vector<ResolvedExtrema> pushed;
  for (const ResolvedExtrema& r : find_extrema_sites(p))
    if (r.pushed) pushed.push_back(r);
  if (pushed.empty()) detail::inapplicable("no pushed constraint present");
  const ExtremaConstraint& gamma = pushed.front().constraint;
  for (const ResolvedExtrema& r : pushed)
    if (!same_constraint(r.constraint, gamma))
      detail::inapplicable("multiple distinct pushed constraints are unsupported");

  AnalysisResult an = analyze(p);
  const std::string& q = gamma.target;

  // Unique non-recursive consumer of q = the final rule.
  std::vector<std::size_t> finals;
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    if (an.strata.rule_kinds[i] == RuleKind::recursive) continue;
    for (const BodyLiteral& lit : p.rules[i].body) {
      const Atom* a = std::get_if<Atom>(&lit);
      if (a && a->pred == q) {
        finals.push_back(i);
        break;
      }
    }
  }
  if (finals.empty()) detail::inapplicable("no final rule consumes " + q);
  if (finals.size() > 1)
    detail::inapplicable("more than one candidate final rule consumes " + q);

  Program out = p;
  for (const ResolvedExtrema& site : pushed) {
    Rule& rule = out.rules[site.rule_index];
    rule.body.erase(rule.body.begin() + static_cast<std::ptrdiff_t>(site.literal_index));
  }

  Rule& final_rule = out.rules[finals.front()];
  const Atom* target_atom = nullptr;
  for (const BodyLiteral& lit : final_rule.body) {
    const Atom* a = std::get_if<Atom>(&lit);
    if (a && a->pred == q) {
      target_atom = a;
      break;
    }
  }
  ExtremaLiteral lit;
  lit.kind = gamma.kind;
  std::set<std::string> seen;
  for (std::size_t pos : gamma.group_positions) {
    if (pos >= target_atom->args.size() || !target_atom->args[pos].is_variable())
      detail::inapplicable("final rule does not expose the constrained columns as variables");
    if (!seen.insert(target_atom->args[pos].var).second)
      detail::inapplicable("final rule reuses a variable across constrained columns");
    lit.group_vars.push_back(target_atom->args[pos].var);
  }
  if (gamma.cost_position >= target_atom->args.size() ||
      !target_atom->args[gamma.cost_position].is_variable() ||
      seen.count(target_atom->args[gamma.cost_position].var))
    detail::inapplicable("final rule does not expose the cost column as a distinct variable");
  lit.cost_var = target_atom->args[gamma.cost_position].var;
  final_rule.body.emplace_back(std::move(lit));
  return out;
}

// ---------------------------------------------------------------------------
// push_equality: specialize the exit rules of a recursive predicate with a
// constant equality from the final rule (the rPreM transformation). Sound
// only for columns copied unchanged through every recursive rule.
// ---------------------------------------------------------------------------

inline Program push_equality(const std::string& var, const Term& constant, const Program& p) {
  if (!constant.is_constant())
    throw Error(ErrorCode::invalid_argument, "push_equality needs a constant right-hand side");
  const Value& val = constant.val;

  AnalysisResult an = analyze(p);

  // Locate the equality literal var = const in a non-recursive rule.
  auto matches = [&](const Comparison& c) {
    const ArithExpr *v = nullptr, *k = nullptr;
    if (c.op != CmpOp::eq) return false;
    if (c.lhs.is_variable() && c.rhs.is_constant()) {
      v = &c.lhs;
      k = &c.rhs;
    } else if (c.rhs.is_variable() && c.lhs.is_constant()) {
      v = &c.rhs;
      k = &c.lhs;
    } else {
      return false;
    }
    return v->var == var && k->val == val;
  };
  std::size_t rule_index = static_cast<std::size_t>(-1);
  std::size_t literal_index = 0;
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    for (std::size_t j = 0; j < p.rules[i].body.size(); ++j) {
      const Comparison* c = std::get_if<Comparison>(&p.rules[i].body[j]);
      if (!c || !matches(*c)) continue;
      if (an.strata.rule_kinds[i] == RuleKind::recursive)
        detail::inapplicable("the equality sits in a recursive rule");
      if (rule_index != static_cast<std::size_t>(-1))
        detail::inapplicable("the equality occurs in more than one rule");
      rule_index = i;
      literal_index = j;
    }
  }
  if (rule_index == static_cast<std::size_t>(-1))
    detail::inapplicable("equality " + var + " = " + val.to_string() +
                         " not found in a final rule");
  const Rule& final_rule = p.rules[rule_index];

  // The variable must pin exactly one column of exactly one body atom.
  std::string q;
  std::size_t column = 0;
  std::size_t occurrences = 0;
  for (const BodyLiteral& lit : final_rule.body) {
    const Atom* a = std::get_if<Atom>(&lit);
    if (!a) continue;
    for (std::size_t c = 0; c < a->args.size(); ++c) {
      if (a->args[c].is_variable() && a->args[c].var == var) {
        ++occurrences;
        q = a->pred;
        column = c;
      }
    }
  }
  if (occurrences == 0)
    detail::inapplicable("variable " + var + " is not bound by a body atom of the final rule");
  if (occurrences > 1)
    detail::inapplicable("variable " + var + " occurs in more than one atom position");

  // q's component must be q alone, and every recursive rule must copy the
  // column unchanged: head holds a variable V there and every q body atom
  // holds exactly V there.
  auto scc_it = an.scc_of.find(q);
  if (scc_it == an.scc_of.end()) detail::inapplicable("predicate " + q + " is not defined");
  if (an.strata.levels[scc_it->second].size() > 1)
    detail::inapplicable(q + " is mutually recursive; equality pushing supports single-predicate recursion");
  if (p.facts.count(q) && !p.facts.at(q).empty())
    detail::inapplicable(q + " has facts; equality pushing needs a purely rule-defined predicate");

  std::vector<std::size_t> exit_rules, rec_rules;
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    if (p.rules[i].head.pred != q) continue;
    (an.strata.rule_kinds[i] == RuleKind::recursive ? rec_rules : exit_rules).push_back(i);
  }
  if (rec_rules.empty())
    detail::inapplicable(q + " is not recursive; nothing to gain from equality pushing");

  for (std::size_t ri : rec_rules) {
    const Rule& rule = p.rules[ri];
    if (column >= rule.head.args.size() || !rule.head.args[column].is_variable())
      detail::inapplicable("column " + std::to_string(column) + " of " + q +
                           " is not a head variable in a recursive rule");
    const std::string& v = rule.head.args[column].var;
    for (const BodyLiteral& lit : rule.body) {
      const Atom* a = std::get_if<Atom>(&lit);
      if (!a || a->pred != q) continue;
      if (column >= a->args.size() || !a->args[column].is_variable() ||
          a->args[column].var != v)
        detail::inapplicable("column " + std::to_string(column) + " of " + q +
                             " is recomputed in recursion; pushing the equality would be unsound");
    }
    // The column must not feed arithmetic that redefines it; being the same
    // variable end-to-end (checked above) is exactly the invariance we need.
  }

  Program out = p;

  // Specialize exit rules: substitute the head variable at the column by the
  // constant; a conflicting constant head makes the rule unsatisfiable.
  std::vector<std::size_t> to_drop;
  for (std::size_t ri : exit_rules) {
    Rule& rule = out.rules[ri];
    const Term& at = rule.head.args[column];
    if (at.is_constant()) {
      if (!(at.val == val)) to_drop.push_back(ri);
      continue;
    }
    std::optional<Rule> specialized = detail::subst_rule(rule, at.var, val);
    if (!specialized)
      detail::inapplicable("exit rule of " + q +
                           " uses the column's variable where only a variable is allowed");
    rule = std::move(*specialized);
  }
  for (auto it = to_drop.rbegin(); it != to_drop.rend(); ++it)
    out.rules.erase(out.rules.begin() + static_cast<std::ptrdiff_t>(*it));

  // Delete the equality from the final rule (its index is unaffected: exit
  // rules of q are distinct rules, and we only dropped q-headed ones).
  std::size_t final_index = rule_index;
  for (std::size_t dropped : to_drop)
    if (dropped < rule_index) --final_index;
  Rule& edited = out.rules[final_index];
  edited.body.erase(edited.body.begin() + static_cast<std::ptrdiff_t>(literal_index));
  return out;
}

}  // namespace premlog
