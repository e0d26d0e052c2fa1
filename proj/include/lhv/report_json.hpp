// JSON serialization of check, Bell, extension, and sampling results.
// Every result kind has a fixed key set so reports diff cleanly and golden
// files stay byte-stable. Probabilities are emitted twice: as an exact
// rational string ("p/q" in lowest terms, null in float mode) and as a
// double rendering.
#pragma once

#include "lhv/bell.hpp"
#include "lhv/checks.hpp"
#include "lhv/determinize.hpp"
#include "lhv/model.hpp"
#include "lhv/sampler.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace lhv {

inline constexpr std::string_view tool_version = "1.0.0";

namespace detail {

inline nlohmann::ordered_json number_json(const rational& r) {
  return {{"exact", exact_string(r)}, {"value", to_double(r)}};
}

inline nlohmann::ordered_json number_json(double v) {
  return {{"exact", nullptr}, {"value", v}};
}

inline nlohmann::ordered_json witness_json(const std::optional<witness>& w) {
  if (!w) return nullptr;
  return {{"lambda", w->lambda},   {"profile", w->profile}, {"profile_b", w->profile_b},
          {"site", w->site},       {"prefix", w->prefix},   {"outcomes", w->outcomes},
          {"detail", w->detail}};
}

template <class R>
nlohmann::ordered_json check_json(const check_result<R>& r) {
  return {{"condition", std::string(condition_name(r.cond))},
          {"holds", r.holds},
          {"max_deviation", number_json(r.max_deviation)},
          {"witness", witness_json(r.where)},
          {"skipped_contexts", r.skipped_contexts}};
}

}  // namespace detail

/// Accumulates results and renders the versioned report document.
class report_builder {
 public:
  report_builder() {
    doc_["schema_version"] = 1;
    doc_["tool"] = "lhv";
    doc_["tool_version"] = std::string(tool_version);
    doc_["results"] = nlohmann::ordered_json::array();
  }

  template <class R>
  void add(const check_result<R>& r) {
    auto j = detail::check_json(r);
    nlohmann::ordered_json out{{"kind", "check"}};
    out.update(j);
    doc_["results"].push_back(std::move(out));
  }

  template <class R>
  void add(const jarrett_result<R>& r) {
    nlohmann::ordered_json eq = nullptr;
    if (r.equivalence_holds) eq = *r.equivalence_holds;
    doc_["results"].push_back(
        {{"kind", "jarrett"},
         {"parameter_independence", detail::check_json(r.parameter_independence)},
         {"outcome_independence", detail::check_json(r.outcome_independence)},
         {"factorability", detail::check_json(r.factorability)},
         {"full_support", r.full_support},
         {"implication_holds", r.implication_holds},
         {"equivalence_holds", eq},
         {"probabilistic_determinism", std::string(r.probabilistic_determinism)}});
  }

  template <class R>
  void add_chsh(const std::string& a, const std::string& a2, const std::string& b,
                const std::string& b2, const chsh_result<R>& r) {
    doc_["results"].push_back(
        {{"kind", "chsh"},
         {"settings", {{"a", a}, {"a2", a2}, {"b", b}, {"b2", b2}}},
         {"correlators",
          {detail::number_json(r.correlators[0]), detail::number_json(r.correlators[1]),
           detail::number_json(r.correlators[2]), detail::number_json(r.correlators[3])}},
         {"s", detail::number_json(r.value)},
         {"within_classical_bound", r.within_classical_bound}});
  }

  template <class R>
  void add_ch74(const std::string& a, const std::string& a2, const std::string& b,
                const std::string& b2, const ch74_result<R>& r) {
    doc_["results"].push_back(
        {{"kind", "ch74"},
         {"settings", {{"a", a}, {"a2", a2}, {"b", b}, {"b2", b2}}},
         {"joints",
          {detail::number_json(r.joints[0]), detail::number_json(r.joints[1]),
           detail::number_json(r.joints[2]), detail::number_json(r.joints[3])}},
         {"singles", {detail::number_json(r.singles[0]), detail::number_json(r.singles[1])}},
         {"value", detail::number_json(r.value)},
         {"within_classical_bound", r.within_classical_bound}});
  }

  void add_extension(const extension_result& ext, const extension_verification& v) {
    nlohmann::ordered_json mismatch = nullptr;
    if (v.mismatch) mismatch = *v.mismatch;
    doc_["results"].push_back({{"kind", "extension"},
                               {"extended_name", ext.extended.name},
                               {"hidden_count", ext.extended.hidden_count()},
                               {"deterministic", v.deterministic},
                               {"recovery_exact", v.recovery_exact},
                               {"mismatch", mismatch}});
  }

  template <class R>
  void add_sample(const basic_model<R>& m, const sample_summary<R>& s) {
    auto tuples = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < s.counts.size(); ++t)
      tuples.push_back({{"outcomes", m.tuple_label(s.profile, t)},
                        {"count", s.counts[t]},
                        {"frequency", detail::number_json(s.frequencies[t])}});
    doc_["results"].push_back({{"kind", "sample"},
                               {"generator", s.generator},
                               {"seed", s.seed},
                               {"n", s.n},
                               {"profile", m.profile_label(s.profile)},
                               {"tuples", std::move(tuples)},
                               {"tv_distance", detail::number_json(s.tv_distance)}});
  }

  const nlohmann::ordered_json& document() const { return doc_; }

  std::string str() const { return doc_.dump(2) + "\n"; }

 private:
  nlohmann::ordered_json doc_;
};

}  // namespace lhv
