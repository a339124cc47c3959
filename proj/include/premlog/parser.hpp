#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "premlog/ast.hpp"
#include "premlog/diagnostics.hpp"

namespace premlog {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------
//
// Tokens of the .dl dialect. Variables are uppercase-initial; lowercase- and
// underscore-initial identifiers are symbols/predicate names (this is what
// lets generated predicates like __better_path round-trip). `%` starts a line
// comment. Numbers are integer or decimal literals; fractions like 157/50 are
// assembled by the parser from number / number.

namespace detail {

enum class TokKind {
  ident,
  variable,
  number,
  quoted,
  lparen,
  rparen,
  comma,
  dot,
  implies,  // :-
  eq,
  ne,
  lt,
  le,
  gt,
  ge,
  plus,
  minus,
  star,
  slash,
  eof,
};

struct Token {
  TokKind kind = TokKind::eof;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  // Tokenizes the whole input; returns false and sets the diagnostic on a
  // lexical error.
  bool run(std::vector<Token>& out, Diagnostic& err) {
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        out.push_back(make(TokKind::eof, pos_, pos_));
        return true;
      }
      std::size_t start = pos_;
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number(out, start);
        continue;
      }
      if (std::isupper(static_cast<unsigned char>(c))) {
        lex_name(out, start, TokKind::variable);
        continue;
      }
      if (std::islower(static_cast<unsigned char>(c)) || c == '_') {
        lex_name(out, start, TokKind::ident);
        continue;
      }
      switch (c) {
        case '"': {
          if (!lex_quoted(out, start, err)) return false;
          continue;
        }
        case '(': push_punct(out, TokKind::lparen); continue;
        case ')': push_punct(out, TokKind::rparen); continue;
        case ',': push_punct(out, TokKind::comma); continue;
        case '.': push_punct(out, TokKind::dot); continue;
        case '+': push_punct(out, TokKind::plus); continue;
        case '-': push_punct(out, TokKind::minus); continue;
        case '*': push_punct(out, TokKind::star); continue;
        case '/': push_punct(out, TokKind::slash); continue;
        case '=': push_punct(out, TokKind::eq); continue;
        case '!':
          if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
            pos_ += 2;
            out.push_back(make(TokKind::ne, start, pos_));
            continue;
          }
          err = {DiagCode::lexical_error, "unexpected character '!'", span_at(start, start + 1)};
          return false;
        case '<':
          if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
            pos_ += 2;
            out.push_back(make(TokKind::le, start, pos_));
          } else {
            push_punct(out, TokKind::lt);
          }
          continue;
        case '>':
          if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
            pos_ += 2;
            out.push_back(make(TokKind::ge, start, pos_));
          } else {
            push_punct(out, TokKind::gt);
          }
          continue;
        case ':':
          if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
            pos_ += 2;
            out.push_back(make(TokKind::implies, start, pos_));
            continue;
          }
          err = {DiagCode::lexical_error, "expected ':-'", span_at(start, start + 1)};
          return false;
        default:
          err = {DiagCode::lexical_error, std::string("unexpected character '") + c + "'",
                 span_at(start, start + 1)};
          return false;
      }
    }
  }

 private:
  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        line_start_ = ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SourceSpan span_at(std::size_t start, std::size_t end) const {
    SourceSpan s;
    s.start = start;
    s.end = end;
    s.line = line_;
    s.column = static_cast<std::uint32_t>(start - line_start_ + 1);
    return s;
  }

  Token make(TokKind k, std::size_t start, std::size_t end) const {
    return {k, std::string(src_.substr(start, end - start)), span_at(start, end)};
  }

  void push_punct(std::vector<Token>& out, TokKind k) {
    std::size_t start = pos_++;
    out.push_back(make(k, start, pos_));
  }

  void lex_number(std::vector<Token>& out, std::size_t start) {
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    out.push_back(make(TokKind::number, start, pos_));
  }

  void lex_name(std::vector<Token>& out, std::size_t start, TokKind kind) {
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    out.push_back(make(kind, start, pos_));
  }

  bool lex_quoted(std::vector<Token>& out, std::size_t start, Diagnostic& err) {
    ++pos_;  // opening quote
    std::string text;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_];
      if (c == '\n') break;
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) break;
        char esc = src_[pos_ + 1];
        switch (esc) {
          case '"': text += '"'; break;
          case '\\': text += '\\'; break;
          case 'n': text += '\n'; break;
          case 't': text += '\t'; break;
          default:
            err = {DiagCode::lexical_error, std::string("unknown escape '\\") + esc + "'",
                   span_at(pos_, pos_ + 2)};
            return false;
        }
        pos_ += 2;
        continue;
      }
      text += c;
      ++pos_;
    }
    if (pos_ >= src_.size() || src_[pos_] != '"') {
      err = {DiagCode::lexical_error, "unterminated string literal", span_at(start, pos_)};
      return false;
    }
    ++pos_;
    Token t = make(TokKind::quoted, start, pos_);
    t.text = std::move(text);
    out.push_back(std::move(t));
    return true;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value() && diagnostics.empty(); }
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParseResult run() {
    ParseResult result;
    Program program;
    while (peek().kind != TokKind::eof) {
      if (!parse_clause(program, result.diagnostics)) return result;
    }
    validate(program, result.diagnostics);
    if (result.diagnostics.empty()) result.program = std::move(program);
    return result;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at(TokKind k) const { return peek().kind == k; }

  bool expect(TokKind k, const char* what, std::vector<Diagnostic>& diags) {
    if (at(k)) {
      advance();
      return true;
    }
    diags.push_back({DiagCode::syntax_error,
                     std::string("expected ") + what + " before '" + peek().text + "'", peek().span});
    return false;
  }

  static SourceSpan merge(SourceSpan a, SourceSpan b) {
    if (!a.known()) return b;
    if (!b.known()) return a;
    SourceSpan s = a;
    s.end = b.end > a.end ? b.end : a.end;
    return s;
  }

  static bool is_cmp(TokKind k) {
    return k == TokKind::eq || k == TokKind::ne || k == TokKind::lt || k == TokKind::le ||
           k == TokKind::gt || k == TokKind::ge;
  }

  bool parse_clause(Program& program, std::vector<Diagnostic>& diags) {
    std::optional<Atom> head = parse_atom(diags);
    if (!head) return false;
    if (at(TokKind::dot)) {
      advance();
      return store_fact(*head, program, diags);
    }
    if (!expect(TokKind::implies, "':-' or '.'", diags)) return false;
    Rule rule;
    rule.head = std::move(*head);
    std::set<std::string> bound;  // vars bound by earlier positive atoms/bindings
    while (true) {
      if (!parse_literal(rule.body, bound, diags)) return false;
      if (at(TokKind::comma)) {
        advance();
        continue;
      }
      break;
    }
    if (!expect(TokKind::dot, "'.'", diags)) return false;
    rule.span = merge(rule.head.span, rule.body.empty()
                                          ? rule.head.span
                                          : std::visit([](const auto& l) { return l.span; }, rule.body.back()));
    program.rules.push_back(std::move(rule));
    return true;
  }

  bool store_fact(const Atom& atom, Program& program, std::vector<Diagnostic>& diags) {
    Tuple t;
    t.reserve(atom.args.size());
    for (const Term& arg : atom.args) {
      if (!arg.is_constant()) {
        diags.push_back({DiagCode::unsafe_rule, "fact arguments must be ground", arg.span});
        return false;
      }
      t.push_back(arg.val);
    }
    try {
      program.facts[atom.pred].insert(std::move(t));
    } catch (const Error& e) {
      diags.push_back({DiagCode::arity_mismatch, e.what(), atom.span});
      return false;
    }
    return true;
  }

  std::optional<Atom> parse_atom(std::vector<Diagnostic>& diags) {
    if (!at(TokKind::ident)) {
      diags.push_back({DiagCode::syntax_error, "expected predicate name before '" + peek().text + "'",
                       peek().span});
      return std::nullopt;
    }
    Token name = advance();
    Atom atom;
    atom.pred = name.text;
    atom.span = name.span;
    if (at(TokKind::lparen)) {
      advance();
      while (true) {
        std::optional<Term> term = parse_term(diags);
        if (!term) return std::nullopt;
        atom.args.push_back(std::move(*term));
        if (at(TokKind::comma)) {
          advance();
          continue;
        }
        break;
      }
      Token close = peek();
      if (!expect(TokKind::rparen, "')'", diags)) return std::nullopt;
      atom.span = merge(name.span, close.span);
    }
    return atom;
  }

  std::optional<Term> parse_term(std::vector<Diagnostic>& diags) {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::variable: {
        Token v = advance();
        return Term::variable(v.text, v.span);
      }
      case TokKind::ident: {
        Token s = advance();
        return Term::constant(Value::symbol(s.text), s.span);
      }
      case TokKind::quoted: {
        Token s = advance();
        return Term::constant(Value::symbol(s.text), s.span);
      }
      case TokKind::minus:
      case TokKind::number:
        return parse_numeric_term(diags);
      default:
        diags.push_back({DiagCode::syntax_error, "expected term before '" + t.text + "'", t.span});
        return std::nullopt;
    }
  }

  std::optional<Term> parse_numeric_term(std::vector<Diagnostic>& diags) {
    SourceSpan start = peek().span;
    bool neg = false;
    if (at(TokKind::minus)) {
      advance();
      neg = true;
    }
    if (!at(TokKind::number)) {
      diags.push_back({DiagCode::syntax_error, "expected number before '" + peek().text + "'",
                       peek().span});
      return std::nullopt;
    }
    Token num = advance();
    std::string text = num.text;
    SourceSpan span = merge(start, num.span);
    if (at(TokKind::slash) && peek(1).kind == TokKind::number) {
      advance();
      Token den = advance();
      text += "/" + den.text;
      span = merge(span, den.span);
    }
    try {
      Rational r = Rational::parse(text);
      if (neg) r = -r;
      return Term::constant(Value::number(r), span);
    } catch (const Error& e) {
      diags.push_back({e.code() == ErrorCode::division_by_zero ? DiagCode::division_by_zero
                                                               : DiagCode::syntax_error,
                       e.what(), span});
      return std::nullopt;
    }
  }

  bool parse_literal(std::vector<BodyLiteral>& body, std::set<std::string>& bound,
                     std::vector<Diagnostic>& diags) {
    const Token& t = peek();
    if (t.kind == TokKind::ident && t.text == "not") {
      Token kw = advance();
      std::optional<Atom> atom = parse_atom(diags);
      if (!atom) return false;
      Negation neg;
      neg.span = merge(kw.span, atom->span);
      neg.atom = std::move(*atom);
      body.push_back(std::move(neg));
      return true;
    }
    if (t.kind == TokKind::ident && (t.text == "is_min" || t.text == "is_max")) {
      return parse_extrema(body, diags);
    }
    if (t.kind == TokKind::ident && peek(1).kind == TokKind::lparen) {
      std::optional<Atom> atom = parse_atom(diags);
      if (!atom) return false;
      note_atom_vars(*atom, bound);
      body.push_back(std::move(*atom));
      return true;
    }
    if (t.kind == TokKind::ident && !is_cmp(peek(1).kind)) {
      // 0-ary atom
      Token name = advance();
      Atom atom;
      atom.pred = name.text;
      atom.span = name.span;
      body.push_back(std::move(atom));
      return true;
    }
    return parse_comparison_or_binding(body, bound, diags);
  }

  void note_atom_vars(const Atom& atom, std::set<std::string>& bound) {
    for (const Term& arg : atom.args)
      if (arg.is_variable()) bound.insert(arg.var);
  }

  bool parse_extrema(std::vector<BodyLiteral>& body, std::vector<Diagnostic>& diags) {
    Token kw = advance();
    ExtremaLiteral lit;
    lit.kind = kw.text == "is_min" ? ExtremaKind::min : ExtremaKind::max;
    if (!expect(TokKind::lparen, "'('", diags)) return false;
    if (!expect(TokKind::lparen, "'(' opening the group-by list", diags)) return false;
    if (at(TokKind::variable)) {
      while (true) {
        if (!at(TokKind::variable)) {
          diags.push_back({DiagCode::syntax_error,
                           "expected variable in group-by list before '" + peek().text + "'",
                           peek().span});
          return false;
        }
        lit.group_vars.push_back(advance().text);
        if (at(TokKind::comma)) {
          advance();
          continue;
        }
        break;
      }
    }
    if (!expect(TokKind::rparen, "')' closing the group-by list", diags)) return false;
    if (!expect(TokKind::comma, "','", diags)) return false;
    if (!at(TokKind::variable)) {
      diags.push_back({DiagCode::syntax_error, "expected cost variable before '" + peek().text + "'",
                       peek().span});
      return false;
    }
    lit.cost_var = advance().text;
    Token close = peek();
    if (!expect(TokKind::rparen, "')'", diags)) return false;
    lit.span = merge(kw.span, close.span);
    body.push_back(std::move(lit));
    return true;
  }

  bool parse_comparison_or_binding(std::vector<BodyLiteral>& body, std::set<std::string>& bound,
                                   std::vector<Diagnostic>& diags) {
    SourceSpan start = peek().span;
    std::optional<ArithExpr> lhs = parse_expr(diags);
    if (!lhs) return false;
    const Token& op_tok = peek();
    if (!is_cmp(op_tok.kind)) {
      diags.push_back({DiagCode::syntax_error,
                       "expected comparison operator before '" + op_tok.text + "'", op_tok.span});
      return false;
    }
    CmpOp op;
    switch (op_tok.kind) {
      case TokKind::eq: op = CmpOp::eq; break;
      case TokKind::ne: op = CmpOp::ne; break;
      case TokKind::lt: op = CmpOp::lt; break;
      case TokKind::le: op = CmpOp::le; break;
      case TokKind::gt: op = CmpOp::gt; break;
      default: op = CmpOp::ge; break;
    }
    advance();
    std::optional<ArithExpr> rhs = parse_expr(diags);
    if (!rhs) return false;
    SourceSpan span = merge(start, rhs->span);
    if (op == CmpOp::eq && lhs->is_variable() && !bound.count(lhs->var)) {
      Binding b;
      b.var = lhs->var;
      b.expr = std::move(*rhs);
      b.span = span;
      bound.insert(b.var);
      body.push_back(std::move(b));
      return true;
    }
    Comparison c;
    c.op = op;
    c.lhs = std::move(*lhs);
    c.rhs = std::move(*rhs);
    c.span = span;
    body.push_back(std::move(c));
    return true;
  }

  std::optional<ArithExpr> parse_expr(std::vector<Diagnostic>& diags) {
    std::optional<ArithExpr> lhs = parse_mul(diags);
    if (!lhs) return std::nullopt;
    while (at(TokKind::plus) || at(TokKind::minus)) {
      ArithExpr::Op op = at(TokKind::plus) ? ArithExpr::Op::add : ArithExpr::Op::sub;
      advance();
      std::optional<ArithExpr> rhs = parse_mul(diags);
      if (!rhs) return std::nullopt;
      if (!fold_binary(op, lhs, std::move(*rhs), diags)) return std::nullopt;
    }
    return lhs;
  }

  std::optional<ArithExpr> parse_mul(std::vector<Diagnostic>& diags) {
    std::optional<ArithExpr> lhs = parse_factor(diags);
    if (!lhs) return std::nullopt;
    while (at(TokKind::star) || at(TokKind::slash)) {
      ArithExpr::Op op = at(TokKind::star) ? ArithExpr::Op::mul : ArithExpr::Op::div;
      advance();
      std::optional<ArithExpr> rhs = parse_factor(diags);
      if (!rhs) return std::nullopt;
      if (!fold_binary(op, lhs, std::move(*rhs), diags)) return std::nullopt;
    }
    return lhs;
  }

  bool fold_binary(ArithExpr::Op op, std::optional<ArithExpr>& lhs, ArithExpr rhs,
                   std::vector<Diagnostic>& diags) {
    SourceSpan span = merge(lhs->span, rhs.span);
    try {
      lhs = ArithExpr::binary(op, std::move(*lhs), std::move(rhs), span);
      return true;
    } catch (const Error& e) {
      diags.push_back({e.code() == ErrorCode::division_by_zero ? DiagCode::division_by_zero
                                                               : DiagCode::syntax_error,
                       e.what(), span});
      return false;
    }
  }

  std::optional<ArithExpr> parse_factor(std::vector<Diagnostic>& diags) {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::variable: {
        Token v = advance();
        return ArithExpr::variable(v.text, v.span);
      }
      case TokKind::ident: {
        Token s = advance();
        return ArithExpr::constant(Value::symbol(s.text), s.span);
      }
      case TokKind::quoted: {
        Token s = advance();
        return ArithExpr::constant(Value::symbol(s.text), s.span);
      }
      case TokKind::number: {
        Token n = advance();
        try {
          return ArithExpr::constant(Value::number(Rational::parse(n.text)), n.span);
        } catch (const Error& e) {
          diags.push_back({DiagCode::syntax_error, e.what(), n.span});
          return std::nullopt;
        }
      }
      case TokKind::minus: {
        Token m = advance();
        if (!at(TokKind::number)) {
          diags.push_back({DiagCode::syntax_error,
                           "expected number after unary '-' before '" + peek().text + "'",
                           peek().span});
          return std::nullopt;
        }
        Token n = advance();
        try {
          return ArithExpr::constant(Value::number(-Rational::parse(n.text)),
                                     merge(m.span, n.span));
        } catch (const Error& e) {
          diags.push_back({DiagCode::syntax_error, e.what(), merge(m.span, n.span)});
          return std::nullopt;
        }
      }
      case TokKind::lparen: {
        advance();
        std::optional<ArithExpr> inner = parse_expr(diags);
        if (!inner) return std::nullopt;
        if (!expect(TokKind::rparen, "')'", diags)) return std::nullopt;
        return inner;
      }
      default:
        diags.push_back({DiagCode::syntax_error, "expected expression before '" + t.text + "'",
                         t.span});
        return std::nullopt;
    }
  }

  // -------------------------------------------------------------------------
  // Post-pass validation: arity consistency, extrema literal shape, safety.
  // -------------------------------------------------------------------------

  void validate(const Program& program, std::vector<Diagnostic>& diags) {
    std::map<std::string, std::size_t> arity;
    for (const auto& [pred, rel] : program.facts) arity.emplace(pred, rel.arity());
    auto check_atom = [&](const Atom& a) {
      auto [it, fresh] = arity.emplace(a.pred, a.arity());
      if (!fresh && it->second != a.arity()) {
        diags.push_back({DiagCode::arity_mismatch,
                         "predicate " + a.pred + " used with arity " + std::to_string(a.arity()) +
                             " but declared with arity " + std::to_string(it->second),
                         a.span});
      }
    };
    for (const Rule& r : program.rules) {
      check_atom(r.head);
      for (const BodyLiteral& lit : r.body) {
        if (const Atom* a = std::get_if<Atom>(&lit)) check_atom(*a);
        if (const Negation* n = std::get_if<Negation>(&lit)) check_atom(n->atom);
      }
    }
    for (const Rule& r : program.rules) {
      validate_extrema(r, diags);
      validate_safety(r, diags);
    }
  }

  void validate_extrema(const Rule& rule, std::vector<Diagnostic>& diags) {
    for (const BodyLiteral& lit : rule.body) {
      const ExtremaLiteral* ex = std::get_if<ExtremaLiteral>(&lit);
      if (!ex) continue;
      std::set<std::string> seen;
      for (const std::string& v : ex->group_vars) {
        if (!seen.insert(v).second)
          diags.push_back({DiagCode::invalid_extrema,
                           "duplicate group-by variable " + v + " in extrema literal", ex->span});
      }
      if (seen.count(ex->cost_var))
        diags.push_back({DiagCode::invalid_extrema,
                         "cost variable " + ex->cost_var + " also appears in the group-by list",
                         ex->span});
    }
  }

  void validate_safety(const Rule& rule, std::vector<Diagnostic>& diags) {
    std::set<std::string> bound;
    for (const BodyLiteral& lit : rule.body)
      if (const Atom* a = std::get_if<Atom>(&lit))
        for (const Term& arg : a->args)
          if (arg.is_variable()) bound.insert(arg.var);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const BodyLiteral& lit : rule.body) {
        const Binding* b = std::get_if<Binding>(&lit);
        if (!b || bound.count(b->var)) continue;
        std::set<std::string> used;
        b->expr.collect_vars(used);
        bool all_bound = true;
        for (const std::string& v : used)
          if (!bound.count(v)) {
            all_bound = false;
            break;
          }
        if (all_bound) {
          bound.insert(b->var);
          changed = true;
        }
      }
    }
    auto require = [&](const std::set<std::string>& vars, SourceSpan span, const char* what) {
      for (const std::string& v : vars) {
        if (!bound.count(v)) {
          diags.push_back({DiagCode::unsafe_rule,
                           std::string("variable ") + v + " in " + what +
                               " is not bound by a positive body atom",
                           span});
        }
      }
    };
    {
      std::set<std::string> head_vars;
      for (const Term& arg : rule.head.args)
        if (arg.is_variable()) head_vars.insert(arg.var);
      require(head_vars, rule.head.span, "the rule head");
    }
    for (const BodyLiteral& lit : rule.body) {
      if (const Comparison* c = std::get_if<Comparison>(&lit)) {
        std::set<std::string> vars;
        c->lhs.collect_vars(vars);
        c->rhs.collect_vars(vars);
        require(vars, c->span, "a comparison");
      } else if (const Binding* b = std::get_if<Binding>(&lit)) {
        std::set<std::string> vars;
        b->expr.collect_vars(vars);
        vars.insert(b->var);
        require(vars, b->span, "a binding");
      } else if (const Negation* n = std::get_if<Negation>(&lit)) {
        std::set<std::string> vars;
        for (const Term& arg : n->atom.args)
          if (arg.is_variable()) vars.insert(arg.var);
        require(vars, n->span, "a negated atom");
      } else if (const ExtremaLiteral* e = std::get_if<ExtremaLiteral>(&lit)) {
        std::set<std::string> vars(e->group_vars.begin(), e->group_vars.end());
        vars.insert(e->cost_var);
        require(vars, e->span, "an extrema literal");
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParseResult parse_program(std::string_view text) {
  std::vector<detail::Token> toks;
  Diagnostic err;
  detail::Lexer lexer(text);
  if (!lexer.run(toks, err)) {
    ParseResult r;
    r.diagnostics.push_back(std::move(err));
    return r;
  }
  return detail::Parser(std::move(toks)).run();
}

}  // namespace premlog
