#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "premlog/diagnostics.hpp"
#include "premlog/value.hpp"

namespace premlog {

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Term {
  enum class Kind { variable, constant };

  Kind kind = Kind::constant;
  std::string var;  // variable name when kind == variable
  Value val;        // constant value when kind == constant
  SourceSpan span;

  static Term variable(std::string name, SourceSpan s = {}) {
    Term t;
    t.kind = Kind::variable;
    t.var = std::move(name);
    t.span = s;
    return t;
  }
  static Term constant(Value v, SourceSpan s = {}) {
    Term t;
    t.kind = Kind::constant;
    t.val = v;
    t.span = s;
    return t;
  }

  bool is_variable() const { return kind == Kind::variable; }
  bool is_constant() const { return kind == Kind::constant; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.kind != b.kind) return false;
    return a.is_variable() ? a.var == b.var : a.val == b.val;
  }
};

// ---------------------------------------------------------------------------
// Arithmetic expressions
// ---------------------------------------------------------------------------

// Expression tree over variables and constants. Constant subtrees fold at
// construction, so e.g. the literal 3.14 and the division 157/50 build the
// same node. Division by a zero constant is rejected here; a zero divisor
// arriving through a variable is a runtime error in eval instead.
struct ArithExpr {
  enum class Op { constant, variable, add, sub, mul, div };

  Op op = Op::constant;
  Value val;        // for constant
  std::string var;  // for variable
  std::shared_ptr<ArithExpr> lhs, rhs;
  SourceSpan span;

  static ArithExpr constant(Value v, SourceSpan s = {}) {
    ArithExpr e;
    e.op = Op::constant;
    e.val = v;
    e.span = s;
    return e;
  }
  static ArithExpr variable(std::string name, SourceSpan s = {}) {
    ArithExpr e;
    e.op = Op::variable;
    e.var = std::move(name);
    e.span = s;
    return e;
  }
  static ArithExpr binary(Op op, ArithExpr l, ArithExpr r, SourceSpan s = {}) {
    if (op == Op::div && r.op == Op::constant && r.val.is_number() && r.val.num().is_zero())
      throw Error(ErrorCode::division_by_zero, "division by a zero constant");
    if (l.op == Op::constant && r.op == Op::constant) {
      if (!l.val.is_number() || !r.val.is_number())
        throw Error(ErrorCode::sort_mismatch, "arithmetic on symbol constants");
      return constant(Value::number(fold(op, l.val.num(), r.val.num())), s);
    }
    ArithExpr e;
    e.op = op;
    e.lhs = std::make_shared<ArithExpr>(std::move(l));
    e.rhs = std::make_shared<ArithExpr>(std::move(r));
    e.span = s;
    return e;
  }

  bool is_constant() const { return op == Op::constant; }
  bool is_variable() const { return op == Op::variable; }

  void collect_vars(std::set<std::string>& out) const {
    if (op == Op::variable) {
      out.insert(var);
    } else if (lhs) {
      lhs->collect_vars(out);
      rhs->collect_vars(out);
    }
  }

  friend bool operator==(const ArithExpr& a, const ArithExpr& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
      case Op::constant: return a.val == b.val;
      case Op::variable: return a.var == b.var;
      default: return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
    }
  }

 private:
  static Rational fold(Op op, const Rational& a, const Rational& b) {
    switch (op) {
      case Op::add: return a + b;
      case Op::sub: return a - b;
      case Op::mul: return a * b;
      case Op::div: return a / b;
      default: throw Error(ErrorCode::invalid_argument, "not a binary op");
    }
  }
};

// ---------------------------------------------------------------------------
// Atoms and body literals
// ---------------------------------------------------------------------------

struct Atom {
  std::string pred;
  std::vector<Term> args;
  SourceSpan span;

  std::size_t arity() const { return args.size(); }

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.pred == b.pred && a.args == b.args;
  }
};

struct Negation {
  Atom atom;
  SourceSpan span;

  friend bool operator==(const Negation& a, const Negation& b) { return a.atom == b.atom; }
};

enum class CmpOp { eq, ne, lt, le, gt, ge };

inline const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::eq: return "=";
    case CmpOp::ne: return "!=";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
  }
  return "?";
}

struct Comparison {
  CmpOp op = CmpOp::eq;
  ArithExpr lhs, rhs;
  SourceSpan span;

  friend bool operator==(const Comparison& a, const Comparison& b) {
    return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
  }
};

// `V = expr` where V is not bound by an earlier positive atom or binding:
// evaluates expr and binds V (or checks equality if V happens to be bound by
// a later atom at execution time).
struct Binding {
  std::string var;
  ArithExpr expr;
  SourceSpan span;

  friend bool operator==(const Binding& a, const Binding& b) {
    return a.var == b.var && a.expr == b.expr;
  }
};

enum class ExtremaKind { min, max };

inline const char* extrema_kind_text(ExtremaKind k) {
  return k == ExtremaKind::min ? "is_min" : "is_max";
}

// Surface form of an extrema constraint: is_min((X, Y), D) / is_max(...).
// The target predicate and column map are resolved by analysis (see
// ExtremaConstraint in gamma.hpp); the literal itself is pure syntax.
struct ExtremaLiteral {
  ExtremaKind kind = ExtremaKind::min;
  std::vector<std::string> group_vars;  // may be empty: global extremum
  std::string cost_var;
  SourceSpan span;

  friend bool operator==(const ExtremaLiteral& a, const ExtremaLiteral& b) {
    return a.kind == b.kind && a.group_vars == b.group_vars && a.cost_var == b.cost_var;
  }
};

using BodyLiteral = std::variant<Atom, Negation, Comparison, Binding, ExtremaLiteral>;

// ---------------------------------------------------------------------------
// Rules and programs
// ---------------------------------------------------------------------------

struct Rule {
  Atom head;
  std::vector<BodyLiteral> body;
  SourceSpan span;

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.head == b.head && a.body == b.body;
  }
};

// Structural equality that ignores the order of body literals (used for the
// push/unpush round-trip property).
inline bool rules_equal_modulo_body_order(const Rule& a, const Rule& b) {
  if (!(a.head == b.head) || a.body.size() != b.body.size()) return false;
  std::vector<bool> used(b.body.size(), false);
  for (const BodyLiteral& la : a.body) {
    bool found = false;
    for (std::size_t j = 0; j < b.body.size(); ++j) {
      if (!used[j] && la == b.body[j]) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

struct Program {
  std::vector<Rule> rules;
  std::map<std::string, Relation> facts;

  friend bool operator==(const Program& a, const Program& b) {
    if (a.rules != b.rules) return false;
    auto nonempty = [](const std::map<std::string, Relation>& m) {
      std::size_t n = 0;
      for (const auto& [_, r] : m) n += r.empty() ? 0 : 1;
      return n;
    };
    if (nonempty(a.facts) != nonempty(b.facts)) return false;
    for (const auto& [pred, r] : a.facts) {
      if (r.empty()) continue;
      auto it = b.facts.find(pred);
      if (it == b.facts.end() || !(r == it->second)) return false;
    }
    return true;
  }
};

inline bool programs_equal_modulo_body_order(const Program& a, const Program& b) {
  if (a.rules.size() != b.rules.size()) return false;
  for (std::size_t i = 0; i < a.rules.size(); ++i)
    if (!rules_equal_modulo_body_order(a.rules[i], b.rules[i])) return false;
  Program ra = a, rb = b;
  ra.rules.clear();
  rb.rules.clear();
  return ra == rb;
}

// All predicates mentioned anywhere (facts, heads, positive and negated body
// atoms) with their arities. Inconsistent arities are reported by the parser
// and analysis; this helper takes the first occurrence.
inline std::map<std::string, std::size_t> predicate_signatures(const Program& p) {
  std::map<std::string, std::size_t> sig;
  auto note = [&](const std::string& pred, std::size_t arity) { sig.emplace(pred, arity); };
  for (const auto& [pred, rel] : p.facts) note(pred, rel.arity());
  for (const Rule& r : p.rules) {
    note(r.head.pred, r.head.arity());
    for (const BodyLiteral& lit : r.body) {
      if (const Atom* a = std::get_if<Atom>(&lit)) note(a->pred, a->arity());
      if (const Negation* n = std::get_if<Negation>(&lit)) note(n->atom.pred, n->atom.arity());
    }
  }
  return sig;
}

}  // namespace premlog
