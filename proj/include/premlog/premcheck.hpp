#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "premlog/analysis.hpp"
#include "premlog/eval.hpp"
#include "premlog/gamma.hpp"
#include "premlog/rational.hpp"
#include "premlog/rewrite.hpp"
#include "premlog/serialize.hpp"

namespace premlog {

inline constexpr std::size_t kCounterexampleCap = 10;

inline constexpr const char* kPremDisclaimer =
    "runtime evidence: these verdicts certify this execution's iterations only, "
    "not the constraint's pushability for every possible execution";

// Verdict for one fixpoint step: with I the step's pre-constraint
// interpretation, compares gamma(T(I)) against gamma(T(gamma(I))) on the
// constrained predicate, plus the two refinements (intrinsic: T(I) = T(gamma(I));
// radical: gamma(T(I)) = T(gamma(I))).
struct StepVerdict {
  std::size_t iteration = 0;  // 1-based check step
  bool prem_holds = true;
  bool iprem_holds = false;
  bool rprem_holds = false;
  std::vector<Tuple> only_in_gamma_t_i;        // in gamma(T(I)), not in gamma(T(gamma(I)))
  std::vector<Tuple> only_in_gamma_t_gamma_i;  // the other side
  bool truncated = false;                      // counterexamples hit the cap
};

struct PremReport {
  ExtremaConstraint gamma;
  std::vector<StepVerdict> steps;
  bool holds = true;
  std::optional<std::size_t> violated_at;  // first violating step
  Rational intrinsic_fraction;             // exact fraction of steps with iPreM
  Rational radical_fraction;
  bool partial = false;  // the traced run stopped at the iteration cap
  std::string disclaimer = kPremDisclaimer;
};

namespace detail {

inline std::vector<Tuple> sorted_difference(const Relation& a, const Relation& b,
                                            std::size_t cap, bool& truncated) {
  std::vector<Tuple> diff;
  for (const Tuple& t : a)
    if (!b.contains(t)) diff.push_back(t);
  std::sort(diff.begin(), diff.end(), tuple_canonical_less);
  if (diff.size() > cap) {
    diff.resize(cap);
    truncated = true;
  }
  return diff;
}

}  // namespace detail

inline StepVerdict check_step(const ExtremaConstraint& gamma,
                              const std::vector<Rule>& recursive_rules, const Interpretation& i,
                              std::size_t iteration = 0) {
  static const Relation kEmpty;
  Interpretation ti = immediate_consequence(recursive_rules, i);
  Interpretation gi = gamma_on_interpretation(gamma, i);
  Interpretation tgi = immediate_consequence(recursive_rules, gi);

  const Relation* ti_t = ti.find(gamma.target);
  const Relation* tgi_t = tgi.find(gamma.target);
  if (!ti_t) ti_t = &kEmpty;
  if (!tgi_t) tgi_t = &kEmpty;
  Relation a = apply_gamma(gamma, *ti_t);
  Relation b = apply_gamma(gamma, *tgi_t);

  StepVerdict v;
  v.iteration = iteration;
  v.prem_holds = a == b;
  v.iprem_holds = *ti_t == *tgi_t;
  v.rprem_holds = a == *tgi_t;

  // Internal invariants of the definitions; a failure would mean the checker
  // itself is broken, so it surfaces loudly rather than as a verdict.
  if (v.iprem_holds && !v.prem_holds)
    throw Error(ErrorCode::invalid_argument, "internal invariant violated: iPreM without PreM");
  if (v.rprem_holds && b == *tgi_t && !v.prem_holds)
    throw Error(ErrorCode::invalid_argument,
                "internal invariant violated: rPreM at both steps without PreM");

  if (!v.prem_holds) {
    v.only_in_gamma_t_i = detail::sorted_difference(a, b, kCounterexampleCap, v.truncated);
    v.only_in_gamma_t_gamma_i = detail::sorted_difference(b, a, kCounterexampleCap, v.truncated);
  }
  return v;
}

// Runs the pushed evaluation with tracing and applies check_step to every
// iteration's pre-constraint interpretation (check step j reads snapshot
// j-1, so step 1 examines the exit relations E before any recursion).
inline PremReport check_run(const Program& p, EvalOptions opts = {}) {
  std::vector<ResolvedExtrema> pushed;
  for (const ResolvedExtrema& r : find_extrema_sites(p))
    if (r.pushed) pushed.push_back(r);
  if (pushed.empty())
    throw Error(ErrorCode::unresolved_constraint,
                "nothing to check: the program has no pushed extrema constraint");
  const ExtremaConstraint& gamma = pushed.front().constraint;
  for (const ResolvedExtrema& r : pushed)
    if (!same_constraint(r.constraint, gamma))
      throw Error(ErrorCode::invalid_argument,
                  "multiple distinct pushed constraints are unsupported");

  opts.trace_enabled = true;
  opts.push_enabled = true;
  EvalResult run = evaluate(p, opts);

  const FixpointTrace* trace = nullptr;
  for (const FixpointTrace& t : run.traces)
    if (std::find(t.scc.begin(), t.scc.end(), gamma.target) != t.scc.end()) trace = &t;
  if (!trace)
    throw Error(ErrorCode::invalid_argument,
                "no recursive component produced a trace for " + gamma.target);

  std::vector<Rule> recursive_rules;
  {
    detail::SccContext ctx =
        detail::make_scc_context(p, std::vector<std::string>(trace->scc.begin(), trace->scc.end()));
    for (std::size_t ri : ctx.rec_rules) recursive_rules.push_back(p.rules[ri]);
  }

  PremReport report;
  report.gamma = gamma;
  report.partial = run.status == TermStatus::iteration_cap;

  for (std::size_t j = 1; j <= trace->snapshots.size(); ++j) {
    Interpretation i = trace->env;
    for (const auto& [pred, rel] : trace->snapshots[j - 1].pre_gamma.data())
      i.data()[pred] = rel;
    StepVerdict v = check_step(gamma, recursive_rules, i, j);
    if (!v.prem_holds && !report.violated_at) {
      report.holds = false;
      report.violated_at = j;
    }
    report.steps.push_back(std::move(v));
  }

  std::size_t n = report.steps.size();
  if (n > 0) {
    std::int64_t intrinsic = 0, radical = 0;
    for (const StepVerdict& v : report.steps) {
      if (v.iprem_holds) ++intrinsic;
      if (v.rprem_holds) ++radical;
    }
    report.intrinsic_fraction = Rational(intrinsic, static_cast<std::int64_t>(n));
    report.radical_fraction = Rational(radical, static_cast<std::int64_t>(n));
  }
  return report;
}

inline json step_verdict_to_json(const StepVerdict& v) {
  json obj = json::object();
  obj["iteration"] = v.iteration;
  obj["prem"] = v.prem_holds;
  obj["iprem"] = v.iprem_holds;
  obj["rprem"] = v.rprem_holds;
  if (!v.prem_holds) {
    json cx = json::object();
    json left = json::array();
    for (const Tuple& t : v.only_in_gamma_t_i) left.push_back(tuple_to_json(t));
    json right = json::array();
    for (const Tuple& t : v.only_in_gamma_t_gamma_i) right.push_back(tuple_to_json(t));
    cx["gamma_T_I"] = std::move(left);
    cx["gamma_T_gamma_I"] = std::move(right);
    obj["counterexamples"] = std::move(cx);
    obj["truncated"] = v.truncated;
  }
  return obj;
}

inline json prem_report_to_json(const PremReport& r) {
  json obj = json::object();
  json constraint = json::object();
  constraint["kind"] = r.gamma.kind == ExtremaKind::min ? "min" : "max";
  constraint["target"] = r.gamma.target;
  constraint["group_by"] = r.gamma.group_by;
  constraint["cost"] = r.gamma.cost;
  constraint["group_positions"] = r.gamma.group_positions;
  constraint["cost_position"] = r.gamma.cost_position;
  obj["constraint"] = std::move(constraint);
  obj["overall"] = r.holds ? std::string("holds-on-this-run")
                           : "violated-at-step-" + std::to_string(*r.violated_at);
  obj["holds"] = r.holds;
  obj["partial"] = r.partial;
  json steps = json::array();
  for (const StepVerdict& v : r.steps) steps.push_back(step_verdict_to_json(v));
  obj["steps"] = std::move(steps);
  json cls = json::object();
  cls["intrinsic_fraction"] = r.intrinsic_fraction.to_string();
  cls["radical_fraction"] = r.radical_fraction.to_string();
  obj["classification"] = std::move(cls);
  obj["disclaimer"] = r.disclaimer;
  return obj;
}

}  // namespace premlog
