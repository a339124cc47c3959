#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "premlog/errors.hpp"
#include "premlog/rational.hpp"

namespace premlog {

// Process-global append-only symbol interner. Values store a 32-bit id, which
// keeps tuples compact and makes equality/hashing O(1). Ids are stable for the
// process lifetime; canonical ordering goes through the stored names, so
// serialized output never depends on interning order.
class SymbolTable {
 public:
  static SymbolTable& instance() {
    static SymbolTable table;
    return table;
  }

  std::uint32_t intern(std::string_view name) {
    {
      std::shared_lock lock(mu_);
      auto it = ids_.find(name);
      if (it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mu_);
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    names_.emplace_back(name);
    std::uint32_t id = static_cast<std::uint32_t>(names_.size() - 1);
    ids_.emplace(std::string_view(names_.back()), id);
    return id;
  }

  const std::string& name(std::uint32_t id) const {
    std::shared_lock lock(mu_);
    return names_[id];
  }

 private:
  SymbolTable() = default;
  mutable std::shared_mutex mu_;
  std::deque<std::string> names_;  // deque: element addresses stay valid
  std::unordered_map<std::string_view, std::uint32_t> ids_;
};

// A constant: either an interned symbol or an exact rational. The two sorts
// are disjoint; joins and set membership treat cross-sort pairs as unequal,
// while order comparisons on symbols are rejected at the call sites that
// require numbers (see eval/gamma).
class Value {
 public:
  enum class Kind : std::uint8_t { symbol, number };

  Value() : kind_(Kind::number), sym_(0), num_(0) {}

  static Value symbol(std::string_view name) {
    Value v;
    v.kind_ = Kind::symbol;
    v.sym_ = SymbolTable::instance().intern(name);
    return v;
  }
  static Value number(Rational r) {
    Value v;
    v.kind_ = Kind::number;
    v.num_ = r;
    return v;
  }

  Kind kind() const { return kind_; }
  bool is_symbol() const { return kind_ == Kind::symbol; }
  bool is_number() const { return kind_ == Kind::number; }

  const std::string& symbol_name() const {
    if (!is_symbol()) throw Error(ErrorCode::sort_mismatch, "value is not a symbol");
    return SymbolTable::instance().name(sym_);
  }
  const Rational& num() const {
    if (!is_number()) throw Error(ErrorCode::sort_mismatch, "value is not a number");
    return num_;
  }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ == Kind::symbol ? a.sym_ == b.sym_ : a.num_ == b.num_;
  }

  std::size_t hash() const {
    if (kind_ == Kind::symbol) {
      std::uint64_t z = sym_ + 0x9E3779B97F4A7C15ULL;
      z ^= z >> 30;
      z *= 0xBF58476D1CE4E5B9ULL;
      z ^= z >> 27;
      return static_cast<std::size_t>(z);
    }
    return num_.hash() * 3 + 1;
  }

  // Total order used only at serialization points: numbers before symbols,
  // numbers by value, symbols by name.
  static bool canonical_less(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return a.is_number() && b.is_symbol();
    if (a.is_number()) return a.num_ < b.num_;
    if (a.sym_ == b.sym_) return false;
    return a.symbol_name() < b.symbol_name();
  }

  std::string to_string() const {
    return is_symbol() ? symbol_name() : num_.to_string();
  }

 private:
  Kind kind_;
  std::uint32_t sym_;
  Rational num_;
};

using Tuple = boost::container::small_vector<Value, 4>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const {
    std::size_t h = 0xCBF29CE484222325ULL;
    for (const Value& v : t) h = (h ^ v.hash()) * 0x100000001B3ULL;
    return h;
  }
};

inline bool tuple_canonical_less(const Tuple& a, const Tuple& b) {
  std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (Value::canonical_less(a[i], b[i])) return true;
    if (Value::canonical_less(b[i], a[i])) return false;
  }
  return a.size() < b.size();
}

inline std::string tuple_to_string(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += t[i].to_string();
  }
  out += ")";
  return out;
}

// A finite set of uniform-arity constant tuples. Arity is adopted from the
// first inserted tuple and enforced afterwards. Iteration order is the hash
// set's; canonical order is available via sorted() for serialization.
class Relation {
 public:
  using Set = std::unordered_set<Tuple, TupleHash>;
  using const_iterator = Set::const_iterator;

  Relation() = default;
  explicit Relation(std::size_t arity) : arity_(arity), arity_set_(true) {}

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return set_.size(); }
  bool empty() const { return set_.empty(); }

  // Returns the stored tuple's address on fresh insertion, nullptr if it was
  // already present. Addresses stay valid until that tuple is erased.
  const Tuple* insert(Tuple t) {
    check_arity(t.size());
    auto [it, fresh] = set_.insert(std::move(t));
    return fresh ? &*it : nullptr;
  }

  bool contains(const Tuple& t) const { return set_.find(t) != set_.end(); }

  bool erase(const Tuple& t) { return set_.erase(t) > 0; }

  const_iterator begin() const { return set_.begin(); }
  const_iterator end() const { return set_.end(); }

  std::vector<Tuple> sorted() const {
    std::vector<Tuple> out(set_.begin(), set_.end());
    std::sort(out.begin(), out.end(), tuple_canonical_less);
    return out;
  }

  friend bool operator==(const Relation& a, const Relation& b) {
    if (a.set_.size() != b.set_.size()) return false;
    for (const Tuple& t : a.set_)
      if (!b.contains(t)) return false;
    return true;
  }

 private:
  void check_arity(std::size_t n) {
    if (!arity_set_) {
      arity_ = n;
      arity_set_ = true;
      return;
    }
    if (n != arity_)
      throw Error(ErrorCode::arity_mismatch,
                  "tuple arity " + std::to_string(n) + " in relation of arity " + std::to_string(arity_));
  }

  std::size_t arity_ = 0;
  bool arity_set_ = false;
  Set set_;
};

// Predicate name -> Relation. std::map keeps predicate iteration alphabetical,
// which every serialization point relies on. Equality ignores empty entries
// (an absent predicate and an empty one are the same interpretation).
class Interpretation {
 public:
  Interpretation() = default;

  Relation& rel(const std::string& pred) { return rels_[pred]; }

  const Relation* find(const std::string& pred) const {
    auto it = rels_.find(pred);
    return it == rels_.end() ? nullptr : &it->second;
  }

  bool contains(const std::string& pred, const Tuple& t) const {
    const Relation* r = find(pred);
    return r && r->contains(t);
  }

  std::size_t total_tuples() const {
    std::size_t n = 0;
    for (const auto& [_, r] : rels_) n += r.size();
    return n;
  }

  const std::map<std::string, Relation>& data() const { return rels_; }
  std::map<std::string, Relation>& data() { return rels_; }

  friend bool operator==(const Interpretation& a, const Interpretation& b) {
    for (const auto& [pred, r] : a.rels_) {
      if (r.empty()) continue;
      const Relation* other = b.find(pred);
      if (!other || !(r == *other)) return false;
    }
    for (const auto& [pred, r] : b.rels_) {
      if (r.empty()) continue;
      const Relation* mine = a.find(pred);
      if (!mine || mine->empty()) return false;  // nonempty side checked above
    }
    return true;
  }

 private:
  std::map<std::string, Relation> rels_;
};

}  // namespace premlog
