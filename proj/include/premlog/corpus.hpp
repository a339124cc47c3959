#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "premlog/errors.hpp"
#include "premlog/rational.hpp"
#include "premlog/value.hpp"

namespace premlog {

// SplitMix64: the exact generator, fixed forever so fixture corpora are
// bit-stable across platforms and releases. First output for seed 0 is
// 0xE220A8397B1DCDAF (asserted by tests).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Deterministic random arc relation over nodes n0..n{nodes-1}.
//
// Draw discipline (part of the reproducibility contract):
//   - pairs are visited in row-major order: i = 0..nodes-1, j ascending;
//     acyclic graphs consider only i < j, cyclic graphs all j != i;
//   - every considered pair consumes exactly one PRNG draw for the
//     inclusion test: include iff draw * den(density) < num(density) * 2^64,
//     evaluated in 128-bit arithmetic (no rounding);
//   - an included pair consumes one further draw for the cost, mapped to
//     cost_lo + draw % (cost_hi - cost_lo + 1).
inline Relation generate_graph(std::size_t nodes, const Rational& density,
                               const Rational& cost_lo, const Rational& cost_hi,
                               std::uint64_t seed, bool acyclic) {
  if (nodes < 1)
    throw Error(ErrorCode::invalid_argument, "generate_graph: nodes must be at least 1");
  if (!density.is_positive() || Rational(1) < density)
    throw Error(ErrorCode::invalid_argument,
                "generate_graph: density must satisfy 0 < density <= 1");
  if (!cost_lo.is_integer() || !cost_hi.is_integer())
    throw Error(ErrorCode::invalid_argument, "generate_graph: cost bounds must be integers");
  if (!cost_lo.is_positive() || cost_hi < cost_lo)
    throw Error(ErrorCode::invalid_argument,
                "generate_graph: cost bounds must satisfy 0 < cost_lo <= cost_hi");

  const unsigned __int128 num = static_cast<unsigned __int128>(density.num());
  const unsigned __int128 den = static_cast<unsigned __int128>(density.den());
  const unsigned __int128 threshold = num << 64;  // compare draw * den < num * 2^64
  const std::uint64_t span =
      static_cast<std::uint64_t>(cost_hi.num() - cost_lo.num()) + 1;

  SplitMix64 rng(seed);
  Relation arcs;
  std::vector<Value> names;
  names.reserve(nodes);
  for (std::size_t i = 0; i < nodes; ++i) names.push_back(Value::symbol("n" + std::to_string(i)));

  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = acyclic ? i + 1 : 0; j < nodes; ++j) {
      if (!acyclic && j == i) continue;
      std::uint64_t draw = rng.next();
      if (static_cast<unsigned __int128>(draw) * den >= threshold) continue;
      std::int64_t cost = cost_lo.num() + static_cast<std::int64_t>(rng.next() % span);
      arcs.insert(Tuple{names[i], names[j], Value::number(Rational(cost))});
    }
  }
  return arcs;
}

struct GeneratorParams {
  std::size_t nodes = 0;
  Rational density;
  Rational cost_lo;
  Rational cost_hi;
  std::uint64_t seed = 0;
  bool acyclic = false;
};

struct Fixture {
  std::string name;
  std::string program_file;                      // .dl file, relative to the corpus dir
  std::string program_text;                      // loaded contents of program_file
  std::map<std::string, std::string> facts;      // predicate -> .csv file
  std::optional<std::string> generated_pred;     // predicate fed by the generator
  std::optional<GeneratorParams> generator;
  std::vector<std::string> tags;
};

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  return Rational::parse(j.get<std::string>());
}

}  // namespace detail

// Loads corpus/manifest.json. Paths inside Fixture stay relative; program
// text is read eagerly so callers can parse without touching the filesystem.
inline std::vector<Fixture> load_manifest(const std::string& manifest_path) {
  std::string dir = manifest_path;
  std::size_t slash = dir.find_last_of('/');
  dir = slash == std::string::npos ? std::string(".") : dir.substr(0, slash);

  nlohmann::json doc = nlohmann::json::parse(detail::read_text_file(manifest_path));
  std::vector<Fixture> out;
  for (const auto& entry : doc.at("fixtures")) {
    Fixture f;
    f.name = entry.at("name").get<std::string>();
    f.program_file = entry.at("program").get<std::string>();
    f.program_text = detail::read_text_file(dir + "/" + f.program_file);
    if (entry.contains("facts"))
      for (const auto& [pred, file] : entry.at("facts").items())
        f.facts[pred] = file.get<std::string>();
    if (entry.contains("tags"))
      for (const auto& t : entry.at("tags")) f.tags.push_back(t.get<std::string>());
    if (entry.contains("generator")) {
      const auto& g = entry.at("generator");
      GeneratorParams gp;
      gp.nodes = g.at("nodes").get<std::size_t>();
      gp.density = detail::rational_from_json(g.at("density"));
      gp.cost_lo = detail::rational_from_json(g.at("cost_lo"));
      gp.cost_hi = detail::rational_from_json(g.at("cost_hi"));
      gp.seed = g.at("seed").get<std::uint64_t>();
      gp.acyclic = g.at("acyclic").get<bool>();
      f.generator = gp;
      f.generated_pred = g.at("pred").get<std::string>();
    }
    out.push_back(std::move(f));
  }
  return out;
}

inline bool has_tag(const Fixture& f, const std::string& tag) {
  for (const std::string& t : f.tags)
    if (t == tag) return true;
  return false;
}

}  // namespace premlog
