// Finite multipartite hidden-variable models and their probability engine.
//
// A model is a set of N sites, each with a list of measurement settings and
// a per-setting outcome alphabet; a finite hidden-value alphabet with a
// (possibly setting-dependent) prior; and an outcome kernel giving, for every
// (hidden value, setting profile), an exact distribution over outcome tuples.
//
// All queries are pure and models are immutable after construction, so
// concurrent reads are safe.
#pragma once

#include "lhv/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lhv {

/// One measurement site: a nonempty list of settings, each with its own
/// ordered outcome alphabet.
struct site {
  std::string name;
  std::vector<std::string> settings;
  std::vector<std::vector<std::string>> alphabets;  // per setting

  bool operator==(const site&) const = default;
};

/// Per-site outcome subsets under a fixed setting profile. An empty subset is
/// not allowed; "any outcome" is the full alphabet.
struct event_query {
  std::vector<std::vector<std::size_t>> selected;  // sorted outcome indices per site
};

struct validation_report {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Result of a conditional-probability query. `defined` is false when the
/// conditioning event has probability zero; the value is then the sentinel 1
/// so that chain products over unsupported tuples still telescope.
template <class R>
struct conditional {
  R value;
  bool defined;
};

template <class R>
struct basic_model {
  std::string name;
  std::vector<site> sites;
  std::vector<std::string> hidden;            // hidden-value alphabet
  std::vector<std::vector<R>> prior;          // [profile][hidden]
  std::vector<std::vector<std::vector<R>>> kernel;  // [hidden][profile][tuple]
  // Optional per-site decomposition: for each hidden value, one component
  // label per site.
  std::optional<std::vector<std::vector<std::string>>> lambda_parts;

  bool operator==(const basic_model&) const = default;

  std::size_t site_count() const { return sites.size(); }
  std::size_t hidden_count() const { return hidden.size(); }

  std::size_t profile_count() const {
    std::size_t n = 1;
    for (const auto& s : sites) n *= s.settings.size();
    return n;
  }

  // ---- name lookup ------------------------------------------------------

  std::size_t find_site(std::string_view name_) const {
    for (std::size_t j = 0; j < sites.size(); ++j)
      if (sites[j].name == name_) return j;
    throw domain_error("unknown site '" + std::string(name_) + "'");
  }

  std::size_t find_setting(std::size_t site_idx, std::string_view name_) const {
    const auto& s = site_at(site_idx);
    for (std::size_t k = 0; k < s.settings.size(); ++k)
      if (s.settings[k] == name_) return k;
    throw domain_error("unknown setting '" + std::string(name_) + "' at site '" + s.name + "'");
  }

  std::size_t find_outcome(std::size_t site_idx, std::size_t setting_idx,
                           std::string_view name_) const {
    const auto& alpha = alphabet(site_idx, setting_idx);
    for (std::size_t k = 0; k < alpha.size(); ++k)
      if (alpha[k] == name_) return k;
    throw domain_error("unknown outcome '" + std::string(name_) + "' at site '" +
                       sites[site_idx].name + "' setting '" +
                       sites[site_idx].settings[setting_idx] + "'");
  }

  std::size_t find_hidden(std::string_view name_) const {
    for (std::size_t k = 0; k < hidden.size(); ++k)
      if (hidden[k] == name_) return k;
    throw domain_error("unknown hidden value '" + std::string(name_) + "'");
  }

  const site& site_at(std::size_t j) const {
    if (j >= sites.size()) throw domain_error("site index out of range");
    return sites[j];
  }

  const std::vector<std::string>& alphabet(std::size_t site_idx, std::size_t setting_idx) const {
    const auto& s = site_at(site_idx);
    if (setting_idx >= s.alphabets.size())
      throw domain_error("setting index out of range at site '" + s.name + "'");
    return s.alphabets[setting_idx];
  }

  // ---- profile codec (mixed radix, site 0 most significant) --------------

  std::size_t encode_profile(const std::vector<std::size_t>& settings_) const {
    if (settings_.size() != sites.size())
      throw domain_error("setting profile length does not match site count");
    std::size_t code = 0;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (settings_[j] >= sites[j].settings.size())
        throw domain_error("setting index out of range at site '" + sites[j].name + "'");
      code = code * sites[j].settings.size() + settings_[j];
    }
    return code;
  }

  std::vector<std::size_t> decode_profile(std::size_t code) const {
    std::vector<std::size_t> out(sites.size());
    for (std::size_t j = sites.size(); j-- > 0;) {
      out[j] = code % sites[j].settings.size();
      code /= sites[j].settings.size();
    }
    if (code != 0) throw domain_error("profile code out of range");
    return out;
  }

  std::size_t profile_by_name(const std::vector<std::string>& names) const {
    if (names.size() != sites.size())
      throw domain_error("setting profile length does not match site count");
    std::vector<std::size_t> idx(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) idx[j] = find_setting(j, names[j]);
    return encode_profile(idx);
  }

  // ---- outcome-tuple codec (per profile; alphabets depend on the setting) -

  std::size_t tuple_count(std::size_t profile) const {
    auto settings_ = decode_profile(profile);
    std::size_t n = 1;
    for (std::size_t j = 0; j < sites.size(); ++j) n *= alphabet(j, settings_[j]).size();
    return n;
  }

  std::size_t encode_tuple(std::size_t profile, const std::vector<std::size_t>& outcomes) const {
    auto settings_ = decode_profile(profile);
    if (outcomes.size() != sites.size())
      throw domain_error("outcome tuple length does not match site count");
    std::size_t code = 0;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      std::size_t m = alphabet(j, settings_[j]).size();
      if (outcomes[j] >= m) throw domain_error("outcome index out of range at site '" + sites[j].name + "'");
      code = code * m + outcomes[j];
    }
    return code;
  }

  std::vector<std::size_t> decode_tuple(std::size_t profile, std::size_t code) const {
    auto settings_ = decode_profile(profile);
    std::vector<std::size_t> out(sites.size());
    for (std::size_t j = sites.size(); j-- > 0;) {
      std::size_t m = alphabet(j, settings_[j]).size();
      out[j] = code % m;
      code /= m;
    }
    if (code != 0) throw domain_error("tuple code out of range");
    return out;
  }

  std::size_t tuple_by_name(std::size_t profile, const std::vector<std::string>& names) const {
    auto settings_ = decode_profile(profile);
    if (names.size() != sites.size())
      throw domain_error("outcome tuple length does not match site count");
    std::vector<std::size_t> idx(names.size());
    for (std::size_t j = 0; j < names.size(); ++j)
      idx[j] = find_outcome(j, settings_[j], names[j]);
    return encode_tuple(profile, idx);
  }

  // ---- labels for reports and witnesses ----------------------------------

  std::string profile_label(std::size_t profile) const {
    auto settings_ = decode_profile(profile);
    std::string out;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (j) out += ' ';
      out += sites[j].settings[settings_[j]];
    }
    return out;
  }

  std::string tuple_label(std::size_t profile, std::size_t tuple) const {
    auto settings_ = decode_profile(profile);
    auto outs = decode_tuple(profile, tuple);
    std::string out;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (j) out += ' ';
      out += alphabet(j, settings_[j])[outs[j]];
    }
    return out;
  }

  std::string prefix_label(std::size_t profile, const std::vector<std::size_t>& prefix) const {
    if (prefix.empty()) return "(empty)";
    auto settings_ = decode_profile(profile);
    std::string out;
    for (std::size_t j = 0; j < prefix.size(); ++j) {
      if (j) out += ' ';
      out += alphabet(j, settings_[j])[prefix[j]];
    }
    return out;
  }

  // ---- probability queries ------------------------------------------------

  /// P({e} | lambda, profile) for a full outcome tuple, exactly as stored.
  const R& joint(std::size_t lambda, std::size_t profile, std::size_t tuple) const {
    check_lambda(lambda);
    check_profile(profile);
    const auto& row = kernel[lambda][profile];
    if (tuple >= row.size()) throw domain_error("tuple code out of range");
    return row[tuple];
  }

  R joint_by_name(std::string_view lambda, const std::vector<std::string>& settings_,
                  const std::vector<std::string>& outcomes) const {
    std::size_t p = profile_by_name(settings_);
    return joint(find_hidden(lambda), p, tuple_by_name(p, outcomes));
  }

  /// Sum of the joint over all tuples agreeing with `outcome` at `site_idx`.
  R marginal(std::size_t lambda, std::size_t profile, std::size_t site_idx,
             std::size_t outcome) const {
    check_lambda(lambda);
    check_profile(profile);
    auto settings_ = decode_profile(profile);
    if (site_idx >= sites.size()) throw domain_error("site index out of range");
    if (outcome >= alphabet(site_idx, settings_[site_idx]).size())
      throw domain_error("outcome index out of range at site '" + sites[site_idx].name + "'");
    R total{};
    const auto& row = kernel[lambda][profile];
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (tuple_digit(profile, t, site_idx) == outcome) total += row[t];
    }
    return total;
  }

  /// Sum of the joint over the tuples selected by a per-site subset query.
  R event_prob(std::size_t lambda, std::size_t profile, const event_query& q) const {
    check_lambda(lambda);
    check_profile(profile);
    validate_query(profile, q);
    R total{};
    const auto& row = kernel[lambda][profile];
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (tuple_selected(profile, t, q)) total += row[t];
    }
    return total;
  }

  /// Probability of a contiguous outcome prefix (sites 0..prefix.size()-1).
  R prefix_prob(std::size_t lambda, std::size_t profile,
                const std::vector<std::size_t>& prefix) const {
    check_lambda(lambda);
    check_profile(profile);
    if (prefix.size() > sites.size()) throw domain_error("prefix longer than site count");
    R total{};
    const auto& row = kernel[lambda][profile];
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (tuple_has_prefix(profile, t, prefix)) total += row[t];
    }
    return total;
  }

  /// Bayes chain factor P(e_site | prefix, lambda, profile). The prefix must
  /// cover exactly the sites before `site_idx`. On a zero-probability prefix
  /// the result is the sentinel 1 with `defined == false`.
  conditional<R> chain_factor(std::size_t lambda, std::size_t profile, std::size_t site_idx,
                              const std::vector<std::size_t>& prefix, std::size_t outcome) const {
    if (site_idx >= sites.size()) throw domain_error("site index out of range");
    if (prefix.size() != site_idx)
      throw domain_error("prefix must cover exactly the sites before the queried site");
    auto settings_ = decode_profile(profile);
    if (outcome >= alphabet(site_idx, settings_[site_idx]).size())
      throw domain_error("outcome index out of range at site '" + sites[site_idx].name + "'");
    R denom = prefix_prob(lambda, profile, prefix);
    if (denom == R{}) return {R(1), false};
    auto extended = prefix;
    extended.push_back(outcome);
    R numer = prefix_prob(lambda, profile, extended);
    return {numer / denom, true};
  }

  // ---- query helpers ------------------------------------------------------

  /// Build an event query from outcome names; an empty list selects the full
  /// alphabet at that site.
  event_query make_query(std::size_t profile,
                         const std::vector<std::vector<std::string>>& names) const {
    if (names.size() != sites.size())
      throw domain_error("event query must list one subset per site");
    auto settings_ = decode_profile(profile);
    event_query q;
    q.selected.resize(sites.size());
    for (std::size_t j = 0; j < sites.size(); ++j) {
      const auto& alpha = alphabet(j, settings_[j]);
      if (names[j].empty()) {
        q.selected[j].resize(alpha.size());
        for (std::size_t k = 0; k < alpha.size(); ++k) q.selected[j][k] = k;
      } else {
        for (const auto& n : names[j]) q.selected[j].push_back(find_outcome(j, settings_[j], n));
        std::sort(q.selected[j].begin(), q.selected[j].end());
        q.selected[j].erase(std::unique(q.selected[j].begin(), q.selected[j].end()),
                            q.selected[j].end());
      }
    }
    return q;
  }

  bool tuple_selected(std::size_t profile, std::size_t tuple, const event_query& q) const {
    auto outs = decode_tuple(profile, tuple);
    for (std::size_t j = 0; j < outs.size(); ++j) {
      if (!std::binary_search(q.selected[j].begin(), q.selected[j].end(), outs[j])) return false;
    }
    return true;
  }

  // ---- structural validation ----------------------------------------------

  validation_report validate(const R& tolerance = default_tolerance<R>()) const {
    validation_report rep;
    auto flag = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

    if (sites.empty()) flag("model has no sites");
    if (hidden.empty()) flag("model has no hidden values");
    for (const auto& s : sites) {
      if (s.settings.empty()) flag("site '" + s.name + "' has no settings");
      if (s.alphabets.size() != s.settings.size())
        flag("site '" + s.name + "' alphabet table does not match its settings");
      for (std::size_t k = 0; k < s.alphabets.size(); ++k)
        if (s.alphabets[k].empty())
          flag("site '" + s.name + "' setting '" + s.settings[k] + "' has an empty alphabet");
      for (std::size_t a = 0; a < s.settings.size(); ++a)
        for (std::size_t b = a + 1; b < s.settings.size(); ++b)
          if (s.settings[a] == s.settings[b])
            flag("site '" + s.name + "' repeats setting '" + s.settings[a] + "'");
    }
    for (std::size_t a = 0; a < sites.size(); ++a)
      for (std::size_t b = a + 1; b < sites.size(); ++b)
        if (sites[a].name == sites[b].name) flag("duplicate site name '" + sites[a].name + "'");
    for (std::size_t a = 0; a < hidden.size(); ++a)
      for (std::size_t b = a + 1; b < hidden.size(); ++b)
        if (hidden[a] == hidden[b]) flag("duplicate hidden value '" + hidden[a] + "'");
    if (!rep.ok()) return rep;  // size arithmetic below assumes sane metadata

    const std::size_t profiles = profile_count();
    if (prior.size() != profiles) {
      flag("prior table does not cover every setting profile");
      return rep;
    }
    for (std::size_t p = 0; p < profiles; ++p) {
      if (prior[p].size() != hidden.size()) {
        flag("prior for profile (" + profile_label(p) + ") does not cover every hidden value");
        continue;
      }
      R sum{};
      for (const auto& w : prior[p]) {
        if (w < R{}) flag("negative prior weight under profile (" + profile_label(p) + ")");
        sum += w;
      }
      if (prob_abs(sum - R(1)) > tolerance)
        flag("prior under profile (" + profile_label(p) + ") sums to " + render(sum) +
             ", expected 1");
    }

    if (kernel.size() != hidden.size()) {
      flag("kernel does not cover every hidden value");
      return rep;
    }
    for (std::size_t l = 0; l < hidden.size(); ++l) {
      if (kernel[l].size() != profiles) {
        flag("kernel for hidden value '" + hidden[l] + "' does not cover every setting profile");
        continue;
      }
      for (std::size_t p = 0; p < profiles; ++p) {
        if (kernel[l][p].size() != tuple_count(p)) {
          flag("kernel entry missing for ('" + hidden[l] + "', profile (" + profile_label(p) +
               "))");
          continue;
        }
        R sum{};
        for (const auto& w : kernel[l][p]) {
          if (w < R{})
            flag("negative kernel weight for ('" + hidden[l] + "', profile (" + profile_label(p) +
                 "))");
          sum += w;
        }
        if (prob_abs(sum - R(1)) > tolerance)
          flag("kernel for ('" + hidden[l] + "', profile (" + profile_label(p) + ")) sums to " +
               render(sum) + ", expected 1");
      }
    }

    if (lambda_parts) {
      if (lambda_parts->size() != hidden.size())
        flag("lambda structure does not cover every hidden value");
      else
        for (std::size_t l = 0; l < hidden.size(); ++l)
          if ((*lambda_parts)[l].size() != sites.size())
            flag("lambda structure for '" + hidden[l] + "' does not list one component per site");
    }
    return rep;
  }

  /// True when no kernel entry is zero (every outcome tuple is supported
  /// under every hidden value and profile).
  bool full_support() const {
    for (const auto& per_lambda : kernel)
      for (const auto& row : per_lambda)
        for (const auto& w : row)
          if (w == R{}) return false;
    return true;
  }

 private:
  void check_lambda(std::size_t lambda) const {
    if (lambda >= hidden.size()) throw domain_error("hidden value index out of range");
  }
  void check_profile(std::size_t profile) const {
    if (profile >= profile_count()) throw domain_error("profile code out of range");
  }
  void validate_query(std::size_t profile, const event_query& q) const {
    if (q.selected.size() != sites.size())
      throw domain_error("event query must list one subset per site");
    auto settings_ = decode_profile(profile);
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (q.selected[j].empty())
        throw domain_error("event query has an empty subset at site '" + sites[j].name + "'");
      for (auto k : q.selected[j])
        if (k >= alphabet(j, settings_[j]).size())
          throw domain_error("event query outcome out of range at site '" + sites[j].name + "'");
    }
  }

  std::size_t tuple_digit(std::size_t profile, std::size_t tuple, std::size_t site_idx) const {
    auto settings_ = decode_profile(profile);
    std::size_t rem = tuple;
    std::size_t digit = 0;
    for (std::size_t j = sites.size(); j-- > 0;) {
      std::size_t m = alphabet(j, settings_[j]).size();
      if (j == site_idx) digit = rem % m;
      rem /= m;
    }
    return digit;
  }

  bool tuple_has_prefix(std::size_t profile, std::size_t tuple,
                        const std::vector<std::size_t>& prefix) const {
    auto outs = decode_tuple(profile, tuple);
    for (std::size_t j = 0; j < prefix.size(); ++j)
      if (outs[j] != prefix[j]) return false;
    return true;
  }

  static std::string render(const rational& v) { return exact_string(v); }
  static std::string render(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }
};

using model = basic_model<rational>;

/// Convert an exact model to double precision (for float-mode checking).
inline basic_model<double> to_float_model(const model& m) {
  basic_model<double> out;
  out.name = m.name;
  out.sites = m.sites;
  out.hidden = m.hidden;
  out.lambda_parts = m.lambda_parts;
  out.prior.resize(m.prior.size());
  for (std::size_t p = 0; p < m.prior.size(); ++p)
    for (const auto& w : m.prior[p]) out.prior[p].push_back(to_double(w));
  out.kernel.resize(m.kernel.size());
  for (std::size_t l = 0; l < m.kernel.size(); ++l) {
    out.kernel[l].resize(m.kernel[l].size());
    for (std::size_t p = 0; p < m.kernel[l].size(); ++p)
      for (const auto& w : m.kernel[l][p]) out.kernel[l][p].push_back(to_double(w));
  }
  return out;
}

/// Same model with the prior replaced by a point mass on one hidden value.
template <class R>
basic_model<R> condition_on_lambda(const basic_model<R>& m, std::size_t lambda) {
  if (lambda >= m.hidden.size()) throw domain_error("hidden value index out of range");
  basic_model<R> out = m;
  for (auto& row : out.prior) {
    std::fill(row.begin(), row.end(), R{});
    row[lambda] = R(1);
  }
  return out;
}

template <class R>
basic_model<R> condition_on_lambda(const basic_model<R>& m, std::string_view lambda) {
  return condition_on_lambda(m, m.find_hidden(lambda));
}

/// Quotient model obtained by merging hidden values that share a label.
/// Group prior is the sum of member priors; the group kernel is the
/// prior-weighted mixture of member kernels. Groups appear in first-mention
/// order. A group with zero prior under some profile has no well-defined
/// kernel there and raises a domain error.
template <class R>
basic_model<R> aggregate_hidden(const basic_model<R>& m, const std::vector<std::string>& labels) {
  if (labels.size() != m.hidden.size())
    throw domain_error("aggregate_hidden needs one label per hidden value");
  basic_model<R> out;
  out.name = m.name;
  out.sites = m.sites;
  std::vector<std::size_t> group_of(labels.size());
  for (std::size_t l = 0; l < labels.size(); ++l) {
    auto it = std::find(out.hidden.begin(), out.hidden.end(), labels[l]);
    if (it == out.hidden.end()) {
      group_of[l] = out.hidden.size();
      out.hidden.push_back(labels[l]);
    } else {
      group_of[l] = static_cast<std::size_t>(it - out.hidden.begin());
    }
  }
  const std::size_t profiles = m.profile_count();
  out.prior.assign(profiles, std::vector<R>(out.hidden.size(), R{}));
  out.kernel.assign(out.hidden.size(), std::vector<std::vector<R>>(profiles));
  for (std::size_t p = 0; p < profiles; ++p) {
    for (std::size_t l = 0; l < m.hidden.size(); ++l) out.prior[p][group_of[l]] += m.prior[p][l];
    for (std::size_t g = 0; g < out.hidden.size(); ++g) {
      if (out.prior[p][g] == R{})
        throw domain_error("hidden group '" + out.hidden[g] +
                           "' has zero prior under profile (" + m.profile_label(p) +
                           "); its kernel is undefined");
      std::vector<R> row(m.tuple_count(p), R{});
      for (std::size_t l = 0; l < m.hidden.size(); ++l) {
        if (group_of[l] != g) continue;
        for (std::size_t t = 0; t < row.size(); ++t)
          row[t] += m.prior[p][l] * m.kernel[l][p][t];
      }
      for (auto& w : row) w /= out.prior[p][g];
      out.kernel[g][p] = std::move(row);
    }
  }
  return out;
}

}  // namespace lhv
