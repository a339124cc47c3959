#pragma once

#include <string>
#include <variant>

#include "premlog/ast.hpp"

namespace premlog {

namespace detail {

inline bool ident_shaped(const std::string& s) {
  if (s.empty()) return false;
  char c = s[0];
  if (!(std::islower(static_cast<unsigned char>(c)) || c == '_')) return false;
  if (s == "not" || s == "is_min" || s == "is_max") return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
  return true;
}

inline std::string quote_symbol(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecLeaf = 3;

inline int expr_precedence(const ArithExpr& e) {
  switch (e.op) {
    case ArithExpr::Op::add:
    case ArithExpr::Op::sub: return kPrecAdd;
    case ArithExpr::Op::mul:
    case ArithExpr::Op::div: return kPrecMul;
    default: return kPrecLeaf;
  }
}

}  // namespace detail

inline std::string format_value(const Value& v) {
  if (v.is_number()) return v.num().to_string();
  const std::string& name = v.symbol_name();
  return detail::ident_shaped(name) ? name : detail::quote_symbol(name);
}

inline std::string format_term(const Term& t) {
  return t.is_variable() ? t.var : format_value(t.val);
}

inline std::string format_expr(const ArithExpr& e) {
  switch (e.op) {
    case ArithExpr::Op::constant: return format_value(e.val);
    case ArithExpr::Op::variable: return e.var;
    default: break;
  }
  const char* op_text = e.op == ArithExpr::Op::add   ? " + "
                        : e.op == ArithExpr::Op::sub ? " - "
                        : e.op == ArithExpr::Op::mul ? " * "
                                                     : " / ";
  int prec = detail::expr_precedence(e);
  std::string lhs = format_expr(*e.lhs);
  std::string rhs = format_expr(*e.rhs);
  // Parenthesize to preserve the tree under left-associative reparsing.
  if (detail::expr_precedence(*e.lhs) < prec) lhs = "(" + lhs + ")";
  if (detail::expr_precedence(*e.rhs) <= prec) rhs = "(" + rhs + ")";
  return lhs + op_text + rhs;
}

inline std::string format_atom(const Atom& a) {
  if (a.args.empty()) return a.pred;
  std::string out = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ", ";
    out += format_term(a.args[i]);
  }
  out += ")";
  return out;
}

inline std::string format_literal(const BodyLiteral& lit) {
  if (const Atom* a = std::get_if<Atom>(&lit)) return format_atom(*a);
  if (const Negation* n = std::get_if<Negation>(&lit)) return "not " + format_atom(n->atom);
  if (const Comparison* c = std::get_if<Comparison>(&lit))
    return format_expr(c->lhs) + " " + cmp_op_text(c->op) + " " + format_expr(c->rhs);
  if (const Binding* b = std::get_if<Binding>(&lit)) return b->var + " = " + format_expr(b->expr);
  const ExtremaLiteral& e = std::get<ExtremaLiteral>(lit);
  std::string out = std::string(extrema_kind_text(e.kind)) + "((";
  for (std::size_t i = 0; i < e.group_vars.size(); ++i) {
    if (i) out += ", ";
    out += e.group_vars[i];
  }
  out += "), " + e.cost_var + ")";
  return out;
}

inline std::string format_rule(const Rule& r) {
  std::string out = format_atom(r.head);
  if (!r.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) out += ", ";
      out += format_literal(r.body[i]);
    }
  }
  out += ".";
  return out;
}

// Canonical text: facts first (predicates alphabetical, tuples in canonical
// order), then rules in program order, one clause per line.
inline std::string format_program(const Program& p) {
  std::string out;
  for (const auto& [pred, rel] : p.facts) {
    for (const Tuple& t : rel.sorted()) {
      out += pred;
      if (!t.empty()) {
        out += "(";
        for (std::size_t i = 0; i < t.size(); ++i) {
          if (i) out += ", ";
          out += format_value(t[i]);
        }
        out += ")";
      }
      out += ".\n";
    }
  }
  for (const Rule& r : p.rules) {
    out += format_rule(r);
    out += '\n';
  }
  return out;
}

}  // namespace premlog
