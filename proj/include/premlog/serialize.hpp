#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "premlog/eval.hpp"
#include "premlog/value.hpp"

namespace premlog {

using json = nlohmann::ordered_json;

// Numbers serialize as JSON integers when integral and as exact "p/q"
// strings otherwise; symbols as strings. This keeps output lossless and
// byte-deterministic (canonical tuple order everywhere).
inline json value_to_json(const Value& v) {
  if (v.is_symbol()) return v.symbol_name();
  const Rational& r = v.num();
  if (r.is_integer()) return r.num();
  return r.to_string();
}

inline json tuple_to_json(const Tuple& t) {
  json arr = json::array();
  for (const Value& v : t) arr.push_back(value_to_json(v));
  return arr;
}

inline json relation_to_json(const Relation& r) {
  json arr = json::array();
  for (const Tuple& t : r.sorted()) arr.push_back(tuple_to_json(t));
  return arr;
}

// Object mapping predicate -> array of tuples. Empty relations are omitted:
// they exist or not depending on evaluation order, and an absent predicate
// denotes the same interpretation.
inline json interpretation_to_json(const Interpretation& i) {
  json obj = json::object();
  for (const auto& [pred, rel] : i.data()) {
    if (rel.empty()) continue;
    obj[pred] = relation_to_json(rel);
  }
  return obj;
}

namespace detail {

inline std::string csv_field(const Value& v) {
  std::string s = v.to_string();
  bool quote = s.find_first_of(",\"\n") != std::string::npos;
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

// CSV rows: `pred,v1,...,vn`, predicates alphabetical, tuples canonical.
inline std::string interpretation_to_csv(const Interpretation& i) {
  std::string out;
  for (const auto& [pred, rel] : i.data()) {
    if (rel.empty()) continue;
    for (const Tuple& t : rel.sorted()) {
      out += pred;
      for (const Value& v : t) {
        out += ',';
        out += detail::csv_field(v);
      }
      out += '\n';
    }
  }
  return out;
}

inline std::string interpretation_to_table(const Interpretation& i) {
  std::string out;
  bool first = true;
  for (const auto& [pred, rel] : i.data()) {
    if (rel.empty()) continue;
    if (!first) out += '\n';
    first = false;
    out += pred + "/" + std::to_string(rel.arity()) + " (" + std::to_string(rel.size()) +
           (rel.size() == 1 ? " tuple)\n" : " tuples)\n");
    for (const Tuple& t : rel.sorted()) {
      out += "  " + tuple_to_string(t) + "\n";
    }
  }
  if (first) out = "(no tuples)\n";
  return out;
}

inline json trace_to_json(const FixpointTrace& t) {
  json obj = json::object();
  obj["scc"] = t.scc;
  obj["env"] = interpretation_to_json(t.env);
  json snaps = json::array();
  for (std::size_t k = 0; k < t.snapshots.size(); ++k) {
    const IterationSnapshot& s = t.snapshots[k];
    json snap = json::object();
    snap["iteration"] = k;
    snap["pre_gamma"] = interpretation_to_json(s.pre_gamma);
    snap["post_gamma"] = interpretation_to_json(s.post_gamma);
    snap["delta_size"] = s.delta_size;
    snap["derivations"] = s.derivations;
    snaps.push_back(std::move(snap));
  }
  obj["snapshots"] = std::move(snaps);
  return obj;
}

inline json traces_to_json(const std::vector<FixpointTrace>& traces) {
  json obj = json::object();
  json arr = json::array();
  for (const FixpointTrace& t : traces) arr.push_back(trace_to_json(t));
  obj["traces"] = std::move(arr);
  return obj;
}

}  // namespace premlog
