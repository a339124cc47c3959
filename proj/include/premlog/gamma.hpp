#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "premlog/ast.hpp"
#include "premlog/value.hpp"

namespace premlog {

// The gamma object: a min/max selection grouped by a projection of the target
// predicate's columns. group_by/cost carry the variable names as written in
// the source literal; group_positions/cost_position bind them to columns of
// the target atom.
struct ExtremaConstraint {
  ExtremaKind kind = ExtremaKind::min;
  std::string target;
  std::vector<std::string> group_by;
  std::string cost;
  std::vector<std::size_t> group_positions;
  std::size_t cost_position = 0;

  friend bool operator==(const ExtremaConstraint& a, const ExtremaConstraint& b) {
    return a.kind == b.kind && a.target == b.target && a.group_by == b.group_by &&
           a.cost == b.cost && a.group_positions == b.group_positions &&
           a.cost_position == b.cost_position;
  }
};

// Positional identity: two constraints written in different rules are the same
// selection when they agree on kind, target, and column bindings — the
// variable spellings (group_by/cost) are local to the rule that wrote them.
inline bool same_constraint(const ExtremaConstraint& a, const ExtremaConstraint& b) {
  return a.kind == b.kind && a.target == b.target && a.group_positions == b.group_positions &&
         a.cost_position == b.cost_position;
}

// Keeps exactly the tuples whose cost column attains the group's minimum
// (resp. maximum); ties all survive, so gamma is contractive and idempotent
// and every nonempty group keeps at least one tuple.
inline Relation apply_gamma(const ExtremaConstraint& gamma, const Relation& rel) {
  if (rel.empty()) return rel;
  for (std::size_t pos : gamma.group_positions)
    if (pos >= rel.arity())
      throw Error(ErrorCode::arity_mismatch, "group position " + std::to_string(pos) +
                                                 " outside target arity " + std::to_string(rel.arity()));
  if (gamma.cost_position >= rel.arity())
    throw Error(ErrorCode::arity_mismatch, "cost position " + std::to_string(gamma.cost_position) +
                                               " outside target arity " + std::to_string(rel.arity()));

  const bool want_min = gamma.kind == ExtremaKind::min;
  std::unordered_map<Tuple, Rational, TupleHash> best;
  best.reserve(rel.size());
  for (const Tuple& t : rel) {
    const Value& cv = t[gamma.cost_position];
    if (!cv.is_number())
      throw Error(ErrorCode::sort_mismatch, "extrema cost column holds a symbol");
    Tuple key;
    key.reserve(gamma.group_positions.size());
    for (std::size_t pos : gamma.group_positions) key.push_back(t[pos]);
    auto [it, fresh] = best.emplace(std::move(key), cv.num());
    if (!fresh) {
      if (want_min ? cv.num() < it->second : cv.num() > it->second) it->second = cv.num();
    }
  }
  Relation out(rel.arity());
  for (const Tuple& t : rel) {
    Tuple key;
    key.reserve(gamma.group_positions.size());
    for (std::size_t pos : gamma.group_positions) key.push_back(t[pos]);
    if (t[gamma.cost_position].num() == best.at(key)) out.insert(t);
  }
  return out;
}

// gamma acts on the target predicate; every other predicate passes through.
// A missing target entry materializes as an empty relation.
inline Interpretation gamma_on_interpretation(const ExtremaConstraint& gamma,
                                              const Interpretation& i) {
  Interpretation out = i;
  const Relation* target = i.find(gamma.target);
  out.rel(gamma.target) = target ? apply_gamma(gamma, *target) : Relation();
  return out;
}

}  // namespace premlog
