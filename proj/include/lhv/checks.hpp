// Locality-condition checkers. Each checker scans every relevant context of
// a model, reports the largest absolute deviation from the condition's
// defining equality (L-infinity over contexts), and names the first context
// in canonical enumeration order where that maximum is attained.
//
// Conventions shared by all checkers:
//   - canonical order: site index, hidden value, profile code, prefix code,
//     outcome index, ascending; profile pairs ordered (A < B);
//   - conditionals on zero-probability prefixes are undefined; those contexts
//     are skipped and counted in `skipped_contexts`, never treated as
//     violations;
//   - in rational mode the tolerance is exactly 0.
#pragma once

#include "lhv/model.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace lhv {

enum class condition {
  factorability,
  parameter_independence,
  outcome_independence,
  measurement_independence,
  determinism,
  separability,
};

inline std::string_view condition_name(condition c) {
  switch (c) {
    case condition::factorability: return "factorability";
    case condition::parameter_independence: return "parameter-independence";
    case condition::outcome_independence: return "outcome-independence";
    case condition::measurement_independence: return "measurement-independence";
    case condition::determinism: return "determinism";
    case condition::separability: return "separability";
  }
  return "?";
}

/// Context at which a checker's maximal deviation is attained. Fields that do
/// not apply to a given condition stay empty.
struct witness {
  std::string lambda;
  std::string profile;
  std::string profile_b;  // second profile (parameter/measurement independence)
  std::string site;
  std::string prefix;
  std::string outcomes;
  std::string detail;  // e.g. the paired context of a separability violation

  bool operator==(const witness&) const = default;
};

template <class R>
struct check_config {
  R tolerance;

  check_config() : tolerance(default_tolerance<R>()) {}
  explicit check_config(R tol) : tolerance(std::move(tol)) {
    if constexpr (std::is_same_v<R, rational>) {
      if (tolerance != rational(0))
        throw precondition_error("rational mode forces tolerance 0");
    }
    if (tolerance < R{}) throw precondition_error("tolerance must be nonnegative");
  }
};

template <class R>
struct check_result {
  condition cond;
  bool holds = true;
  R max_deviation{};
  std::optional<witness> where;
  std::size_t skipped_contexts = 0;
};

namespace detail {

/// Running maximum that keeps the first witness attaining it.
template <class R>
struct max_tracker {
  R value{};
  std::optional<witness> where;

  void offer(const R& dev, witness w) {
    if (dev > value) {
      value = dev;
      where = std::move(w);
    }
  }
};

template <class R>
check_result<R> finish(condition c, max_tracker<R> t, const check_config<R>& cfg,
                       std::size_t skipped) {
  check_result<R> out;
  out.cond = c;
  out.max_deviation = t.value;
  out.holds = !(t.value > cfg.tolerance);
  out.skipped_contexts = skipped;
  if (t.value > R{}) out.where = std::move(t.where);
  return out;
}

/// Enumerate all outcome prefixes of length `len` for sites 0..len-1 under a
/// profile, in canonical (mixed radix) order. Calls fn(prefix).
template <class R, class Fn>
void for_each_prefix(const basic_model<R>& m, std::size_t profile, std::size_t len, Fn&& fn) {
  auto settings = m.decode_profile(profile);
  std::vector<std::size_t> prefix(len, 0);
  while (true) {
    fn(prefix);
    std::size_t j = len;
    while (j > 0) {
      --j;
      if (++prefix[j] < m.alphabet(j, settings[j]).size()) break;
      prefix[j] = 0;
      if (j == 0) return;
    }
    if (len == 0) return;
  }
}

}  // namespace detail

/// Product test: for every (lambda, profile, full tuple), the joint must
/// equal the product of that profile's per-site marginals.
template <class R>
check_result<R> check_factorability(const basic_model<R>& m,
                                    const check_config<R>& cfg = check_config<R>{}) {
  detail::max_tracker<R> track;
  for (std::size_t l = 0; l < m.hidden_count(); ++l) {
    for (std::size_t p = 0; p < m.profile_count(); ++p) {
      auto settings = m.decode_profile(p);
      // Marginal tables once per (lambda, profile).
      std::vector<std::vector<R>> marg(m.site_count());
      for (std::size_t j = 0; j < m.site_count(); ++j) {
        std::size_t alpha = m.alphabet(j, settings[j]).size();
        marg[j].resize(alpha);
        for (std::size_t k = 0; k < alpha; ++k) marg[j][k] = m.marginal(l, p, j, k);
      }
      const std::size_t tuples = m.tuple_count(p);
      for (std::size_t t = 0; t < tuples; ++t) {
        auto outs = m.decode_tuple(p, t);
        R prod(1);
        for (std::size_t j = 0; j < m.site_count(); ++j) prod *= marg[j][outs[j]];
        R dev = prob_abs(m.joint(l, p, t) - prod);
        track.offer(dev, witness{.lambda = m.hidden[l],
                                 .profile = m.profile_label(p),
                                 .outcomes = m.tuple_label(p, t)});
      }
    }
  }
  return detail::finish(condition::factorability, std::move(track), cfg, 0);
}

/// Factorability of one coarse event: |P(E) - prod_j P(E_j)| for the given
/// per-site event query, at a single (lambda, profile).
template <class R>
check_result<R> check_event_factorability(const basic_model<R>& m, std::size_t lambda,
                                          std::size_t profile, const event_query& q,
                                          const check_config<R>& cfg = check_config<R>{}) {
  R joint_event = m.event_prob(lambda, profile, q);
  R prod(1);
  for (std::size_t j = 0; j < m.site_count(); ++j) {
    event_query only_j;
    only_j.selected.resize(m.site_count());
    auto settings = m.decode_profile(profile);
    for (std::size_t i = 0; i < m.site_count(); ++i) {
      if (i == j) {
        only_j.selected[i] = q.selected[i];
      } else {
        std::size_t alpha = m.alphabet(i, settings[i]).size();
        only_j.selected[i].resize(alpha);
        for (std::size_t k = 0; k < alpha; ++k) only_j.selected[i][k] = k;
      }
    }
    prod *= m.event_prob(lambda, profile, only_j);
  }
  detail::max_tracker<R> track;
  track.offer(prob_abs(joint_event - prod),
              witness{.lambda = m.hidden[lambda],
                      .profile = m.profile_label(profile),
                      .detail = "event query"});
  return detail::finish(condition::factorability, std::move(track), cfg, 0);
}

/// Chain factors at a site must not depend on the settings of later sites:
/// compare chain factors under every pair of profiles that agree on sites
/// 0..j. Prefixes unsupported under either profile are skipped.
template <class R>
check_result<R> check_parameter_independence(const basic_model<R>& m,
                                             const check_config<R>& cfg = check_config<R>{}) {
  detail::max_tracker<R> track;
  std::size_t skipped = 0;
  const std::size_t profiles = m.profile_count();
  for (std::size_t j = 0; j < m.site_count(); ++j) {
    for (std::size_t l = 0; l < m.hidden_count(); ++l) {
      for (std::size_t pa = 0; pa < profiles; ++pa) {
        auto sa = m.decode_profile(pa);
        for (std::size_t pb = pa + 1; pb < profiles; ++pb) {
          auto sb = m.decode_profile(pb);
          bool agree = true;
          for (std::size_t i = 0; i <= j && agree; ++i) agree = (sa[i] == sb[i]);
          if (!agree) continue;
          detail::for_each_prefix(m, pa, j, [&](const std::vector<std::size_t>& prefix) {
            // Same prefix is meaningful under pb: settings of sites < j agree.
            R da = m.prefix_prob(l, pa, prefix);
            R db = m.prefix_prob(l, pb, prefix);
            if (da == R{} || db == R{}) {
              ++skipped;
              return;
            }
            std::size_t alpha = m.alphabet(j, sa[j]).size();
            for (std::size_t e = 0; e < alpha; ++e) {
              R ca = m.chain_factor(l, pa, j, prefix, e).value;
              R cb = m.chain_factor(l, pb, j, prefix, e).value;
              track.offer(prob_abs(ca - cb),
                          witness{.lambda = m.hidden[l],
                                  .profile = m.profile_label(pa),
                                  .profile_b = m.profile_label(pb),
                                  .site = m.sites[j].name,
                                  .prefix = m.prefix_label(pa, prefix),
                                  .outcomes = m.alphabet(j, sa[j])[e]});
            }
          });
        }
      }
    }
  }
  return detail::finish(condition::parameter_independence, std::move(track), cfg, skipped);
}

/// Conditioning on earlier sites' outcomes must not change a site's outcome
/// distribution: compare every supported chain factor with the plain marginal
/// at that site under the same profile.
template <class R>
check_result<R> check_outcome_independence(const basic_model<R>& m,
                                           const check_config<R>& cfg = check_config<R>{}) {
  detail::max_tracker<R> track;
  std::size_t skipped = 0;
  for (std::size_t j = 0; j < m.site_count(); ++j) {
    for (std::size_t l = 0; l < m.hidden_count(); ++l) {
      for (std::size_t p = 0; p < m.profile_count(); ++p) {
        auto settings = m.decode_profile(p);
        std::size_t alpha = m.alphabet(j, settings[j]).size();
        std::vector<R> marg(alpha);
        for (std::size_t e = 0; e < alpha; ++e) marg[e] = m.marginal(l, p, j, e);
        detail::for_each_prefix(m, p, j, [&](const std::vector<std::size_t>& prefix) {
          if (m.prefix_prob(l, p, prefix) == R{}) {
            ++skipped;
            return;
          }
          for (std::size_t e = 0; e < alpha; ++e) {
            R cf = m.chain_factor(l, p, j, prefix, e).value;
            track.offer(prob_abs(cf - marg[e]),
                        witness{.lambda = m.hidden[l],
                                .profile = m.profile_label(p),
                                .site = m.sites[j].name,
                                .prefix = m.prefix_label(p, prefix),
                                .outcomes = m.alphabet(j, settings[j])[e]});
          }
        });
      }
    }
  }
  return detail::finish(condition::outcome_independence, std::move(track), cfg, skipped);
}

/// The hidden-value distribution must not depend on the setting profile.
template <class R>
check_result<R> check_measurement_independence(const basic_model<R>& m,
                                               const check_config<R>& cfg = check_config<R>{}) {
  detail::max_tracker<R> track;
  const std::size_t profiles = m.profile_count();
  for (std::size_t l = 0; l < m.hidden_count(); ++l) {
    for (std::size_t pa = 0; pa < profiles; ++pa) {
      for (std::size_t pb = pa + 1; pb < profiles; ++pb) {
        track.offer(prob_abs(m.prior[pa][l] - m.prior[pb][l]),
                    witness{.lambda = m.hidden[l],
                            .profile = m.profile_label(pa),
                            .profile_b = m.profile_label(pb)});
      }
    }
  }
  return detail::finish(condition::measurement_independence, std::move(track), cfg, 0);
}

/// Every kernel entry must be 0 or 1; the deviation of an entry p is
/// min(p, 1-p).
template <class R>
check_result<R> check_determinism(const basic_model<R>& m,
                                  const check_config<R>& cfg = check_config<R>{}) {
  detail::max_tracker<R> track;
  for (std::size_t l = 0; l < m.hidden_count(); ++l) {
    for (std::size_t p = 0; p < m.profile_count(); ++p) {
      const auto& row = m.kernel[l][p];
      for (std::size_t t = 0; t < row.size(); ++t) {
        R dev = row[t] < R(1) - row[t] ? row[t] : R(1) - row[t];
        track.offer(dev, witness{.lambda = m.hidden[l],
                                 .profile = m.profile_label(p),
                                 .outcomes = m.tuple_label(p, t)});
      }
    }
  }
  return detail::finish(condition::determinism, std::move(track), cfg, 0);
}

/// With a per-site decomposition of the hidden values, a site's chain factor
/// may depend only on (own component, own setting): the maximal deviation is
/// the largest spread of chain factors across contexts that share
/// (site, component label, setting, outcome). Requires lambda_parts.
template <class R>
check_result<R> check_separability(const basic_model<R>& m,
                                   const check_config<R>& cfg = check_config<R>{}) {
  if (!m.lambda_parts)
    throw precondition_error("separability check requires a lambda structure");
  struct extreme {
    R lo, hi;
    witness lo_at, hi_at;
  };
  // key: (site, component label, setting index, outcome index)
  std::map<std::tuple<std::size_t, std::string, std::size_t, std::size_t>, extreme> groups;
  std::size_t skipped = 0;
  for (std::size_t j = 0; j < m.site_count(); ++j) {
    for (std::size_t l = 0; l < m.hidden_count(); ++l) {
      const std::string& part = (*m.lambda_parts)[l][j];
      for (std::size_t p = 0; p < m.profile_count(); ++p) {
        auto settings = m.decode_profile(p);
        detail::for_each_prefix(m, p, j, [&](const std::vector<std::size_t>& prefix) {
          if (m.prefix_prob(l, p, prefix) == R{}) {
            ++skipped;
            return;
          }
          std::size_t alpha = m.alphabet(j, settings[j]).size();
          for (std::size_t e = 0; e < alpha; ++e) {
            R cf = m.chain_factor(l, p, j, prefix, e).value;
            witness at{.lambda = m.hidden[l],
                       .profile = m.profile_label(p),
                       .site = m.sites[j].name,
                       .prefix = m.prefix_label(p, prefix),
                       .outcomes = m.alphabet(j, settings[j])[e]};
            auto key = std::make_tuple(j, part, settings[j], e);
            auto it = groups.find(key);
            if (it == groups.end()) {
              groups.emplace(key, extreme{cf, cf, at, at});
            } else {
              if (cf < it->second.lo) {
                it->second.lo = cf;
                it->second.lo_at = std::move(at);
              } else if (cf > it->second.hi) {
                it->second.hi = cf;
                it->second.hi_at = std::move(at);
              }
            }
          }
        });
      }
    }
  }
  detail::max_tracker<R> track;
  for (auto& [key, ext] : groups) {
    R dev = ext.hi - ext.lo;
    witness w = ext.hi_at;
    w.detail = "vs lambda=" + ext.lo_at.lambda + " profile=(" + ext.lo_at.profile +
               ") prefix=" + ext.lo_at.prefix + " sharing component '" + std::get<1>(key) + "'";
    track.offer(dev, std::move(w));
  }
  return detail::finish(condition::separability, std::move(track), cfg, skipped);
}

/// The Jarrett decomposition: run parameter independence, outcome
/// independence, and factorability together and report how the verdicts
/// compose. The implication (PI and OI) => factorability is always asserted;
/// the equivalence only on full-support models, where no context is skipped
/// for zero probability.
template <class R>
struct jarrett_result {
  check_result<R> parameter_independence;
  check_result<R> outcome_independence;
  check_result<R> factorability;
  bool full_support = false;
  bool implication_holds = false;            // (PI && OI) implies factorability
  std::optional<bool> equivalence_holds;     // set only when full_support
  // In this finite encoding the kernel is a function of (lambda, profile), so
  // "knowledge of lambda fixes the outcome distribution" is structural; it is
  // reported, not checked.
  static constexpr std::string_view probabilistic_determinism = "structural";
};

template <class R>
jarrett_result<R> jarrett_report(const basic_model<R>& m,
                                 const check_config<R>& cfg = check_config<R>{}) {
  jarrett_result<R> rep;
  rep.parameter_independence = check_parameter_independence(m, cfg);
  rep.outcome_independence = check_outcome_independence(m, cfg);
  rep.factorability = check_factorability(m, cfg);
  rep.full_support = m.full_support();
  bool pi_oi = rep.parameter_independence.holds && rep.outcome_independence.holds;
  rep.implication_holds = !pi_oi || rep.factorability.holds;
  if (rep.full_support) rep.equivalence_holds = (pi_oi == rep.factorability.holds);
  return rep;
}

}  // namespace lhv
