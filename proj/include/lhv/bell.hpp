// Bell-type quantities for two-site models: setting-conditioned correlators
// of dichotomic observables, the four-term CHSH combination, and the CH74
// probability form. Also enumerates the deterministic single-lambda
// strategies to exhibit the classical bound.
#pragma once

#include "lhv/model.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lhv {

/// Assignment of +1/-1 to each outcome of each (site, setting) alphabet.
/// sign[site][setting][outcome] is +1 or -1.
struct dichotomic_map {
  std::vector<std::vector<std::vector<int>>> sign;

  template <class R>
  static dichotomic_map validated(const basic_model<R>& m,
                                  std::vector<std::vector<std::vector<int>>> sign) {
    if (sign.size() != m.site_count())
      throw precondition_error("dichotomic map covers wrong number of sites");
    for (std::size_t j = 0; j < sign.size(); ++j) {
      if (sign[j].size() != m.sites[j].settings.size())
        throw precondition_error("dichotomic map covers wrong number of settings at site " +
                                 m.sites[j].name);
      for (std::size_t s = 0; s < sign[j].size(); ++s) {
        if (sign[j][s].size() != m.sites[j].alphabets[s].size())
          throw precondition_error("dichotomic map covers wrong alphabet at site " +
                                   m.sites[j].name + ", setting " + m.sites[j].settings[s]);
        for (int v : sign[j][s])
          if (v != 1 && v != -1)
            throw precondition_error("dichotomic map values must be +1 or -1");
      }
    }
    return dichotomic_map{std::move(sign)};
  }

  /// Outcomes named in `plus` map to +1, all others to -1. Every name in
  /// `plus` must occur in at least one alphabet.
  template <class R>
  static dichotomic_map by_name(const basic_model<R>& m, const std::vector<std::string>& plus) {
    std::vector<bool> seen(plus.size(), false);
    std::vector<std::vector<std::vector<int>>> sign(m.site_count());
    for (std::size_t j = 0; j < m.site_count(); ++j) {
      sign[j].resize(m.sites[j].settings.size());
      for (std::size_t s = 0; s < sign[j].size(); ++s) {
        const auto& alpha = m.sites[j].alphabets[s];
        sign[j][s].assign(alpha.size(), -1);
        for (std::size_t k = 0; k < alpha.size(); ++k) {
          for (std::size_t q = 0; q < plus.size(); ++q) {
            if (alpha[k] == plus[q]) {
              sign[j][s][k] = 1;
              seen[q] = true;
            }
          }
        }
      }
    }
    for (std::size_t q = 0; q < plus.size(); ++q)
      if (!seen[q]) throw domain_error("unknown outcome in dichotomic map: " + plus[q]);
    return dichotomic_map{std::move(sign)};
  }

  /// For models whose every alphabet has exactly two outcomes: first outcome
  /// of each alphabet maps to +1, second to -1.
  template <class R>
  static dichotomic_map default_binary(const basic_model<R>& m) {
    std::vector<std::vector<std::vector<int>>> sign(m.site_count());
    for (std::size_t j = 0; j < m.site_count(); ++j) {
      sign[j].resize(m.sites[j].settings.size());
      for (std::size_t s = 0; s < sign[j].size(); ++s) {
        if (m.sites[j].alphabets[s].size() != 2)
          throw precondition_error("default dichotomic map needs two-outcome alphabets");
        sign[j][s] = {1, -1};
      }
    }
    return dichotomic_map{std::move(sign)};
  }
};

namespace detail {

template <class R>
void require_two_site_constant_prior(const basic_model<R>& m) {
  if (m.site_count() != 2)
    throw precondition_error("correlator requires exactly two sites");
  for (std::size_t p = 1; p < m.profile_count(); ++p)
    if (m.prior[p] != m.prior[0])
      throw precondition_error("correlator requires a profile-independent prior");
}

}  // namespace detail

/// E(s0, s1) = sum over lambda and outcome pairs of
/// prior(lambda) * P(e0, e1 | lambda, (s0, s1)) * sign(e0) * sign(e1).
/// Requires two sites and a setting-independent prior.
template <class R>
R correlator(const basic_model<R>& m, std::size_t setting0, std::size_t setting1,
             const dichotomic_map& d) {
  detail::require_two_site_constant_prior(m);
  std::size_t p = m.encode_profile({setting0, setting1});
  R acc{};
  const std::size_t tuples = m.tuple_count(p);
  for (std::size_t l = 0; l < m.hidden_count(); ++l) {
    if (m.prior[0][l] == R{}) continue;
    R inner{};
    for (std::size_t t = 0; t < tuples; ++t) {
      auto outs = m.decode_tuple(p, t);
      int s = d.sign[0][setting0][outs[0]] * d.sign[1][setting1][outs[1]];
      if (s > 0)
        inner += m.joint(l, p, t);
      else
        inner -= m.joint(l, p, t);
    }
    acc += m.prior[0][l] * inner;
  }
  return acc;
}

template <class R>
R correlator_by_name(const basic_model<R>& m, const std::string& setting0,
                     const std::string& setting1, const dichotomic_map& d) {
  return correlator(m, m.find_setting(0, setting0), m.find_setting(1, setting1), d);
}

template <class R>
struct chsh_result {
  std::array<R, 4> correlators;  // E(a,b), E(a,b'), E(a',b), E(a',b')
  R value;                       // E(a,b) + E(a,b') + E(a',b) - E(a',b')
  bool within_classical_bound;   // |value| <= 2 up to tolerance
};

/// S = E(a,b) + E(a,b') + E(a',b) - E(a',b') for settings a, a' at site 0 and
/// b, b' at site 1.
template <class R>
chsh_result<R> chsh(const basic_model<R>& m, std::size_t a, std::size_t a2, std::size_t b,
                    std::size_t b2, const dichotomic_map& d, R tolerance = default_tolerance<R>()) {
  chsh_result<R> out;
  out.correlators = {correlator(m, a, b, d), correlator(m, a, b2, d), correlator(m, a2, b, d),
                     correlator(m, a2, b2, d)};
  out.value =
      out.correlators[0] + out.correlators[1] + out.correlators[2] - out.correlators[3];
  out.within_classical_bound = !(prob_abs(out.value) > R(2) + tolerance);
  return out;
}

template <class R>
chsh_result<R> chsh_by_name(const basic_model<R>& m, const std::string& a, const std::string& a2,
                            const std::string& b, const std::string& b2, const dichotomic_map& d,
                            R tolerance = default_tolerance<R>()) {
  return chsh(m, m.find_setting(0, a), m.find_setting(0, a2), m.find_setting(1, b),
              m.find_setting(1, b2), d, tolerance);
}

template <class R>
struct ch74_result {
  std::array<R, 4> joints;  // p(a,b), p(a,b'), p(a',b), p(a',b')
  std::array<R, 2> singles; // p1(a), p2(b)
  R value;                  // in [-1, 0] classically
  bool within_classical_bound;
};

/// CH74 probability form for one designated outcome per (site, setting):
/// p(a,b) + p(a,b') + p(a',b) - p(a',b') - p1(a) - p2(b), classically in
/// [-1, 0]. `target0`/`target1` pick the counted outcome per setting, indexed
/// by setting. Uses lambda-averaged probabilities. With the targets equal to
/// the +1-mapped outcomes of a dichotomic map, S = 4 * value + 2.
template <class R>
ch74_result<R> ch74(const basic_model<R>& m, std::size_t a, std::size_t a2, std::size_t b,
                    std::size_t b2, const std::vector<std::size_t>& target0,
                    const std::vector<std::size_t>& target1,
                    R tolerance = default_tolerance<R>()) {
  detail::require_two_site_constant_prior(m);
  if (target0.size() != m.sites[0].settings.size() ||
      target1.size() != m.sites[1].settings.size())
    throw precondition_error("ch74 needs one target outcome per setting");

  auto pair_prob = [&](std::size_t s0, std::size_t s1) {
    std::size_t p = m.encode_profile({s0, s1});
    R acc{};
    for (std::size_t l = 0; l < m.hidden_count(); ++l) {
      if (m.prior[0][l] == R{}) continue;
      event_query q;
      q.selected = {{target0[s0]}, {target1[s1]}};
      acc += m.prior[0][l] * m.event_prob(l, p, q);
    }
    return acc;
  };
  auto single_prob = [&](std::size_t site, std::size_t setting, std::size_t outcome) {
    // Marginal of the counted outcome; any profile containing `setting` at
    // `site` works only if the model is nonsignaling, so fix the other site
    // to its first setting for definiteness.
    std::vector<std::size_t> settings(2, 0);
    settings[site] = setting;
    std::size_t p = m.encode_profile(settings);
    R acc{};
    for (std::size_t l = 0; l < m.hidden_count(); ++l) {
      if (m.prior[0][l] == R{}) continue;
      acc += m.prior[0][l] * m.marginal(l, p, site, outcome);
    }
    return acc;
  };

  ch74_result<R> out;
  out.joints = {pair_prob(a, b), pair_prob(a, b2), pair_prob(a2, b), pair_prob(a2, b2)};
  out.singles = {single_prob(0, a, target0[a]), single_prob(1, b, target1[b])};
  out.value = out.joints[0] + out.joints[1] + out.joints[2] - out.joints[3] - out.singles[0] -
              out.singles[1];
  out.within_classical_bound =
      !(out.value > R{} + tolerance) && !(out.value < R(-1) - tolerance);
  return out;
}

template <class R>
struct deterministic_bound_result {
  R max_abs_value{};            // over all sign assignments
  std::size_t attaining = 0;    // strategies with |S| = max
  std::size_t attaining_plus = 0;  // strategies with S = +max
  std::array<int, 4> first_attaining{};  // (a, a', b, b') signs of the first
};

/// Enumerate all deterministic two-site strategies over settings a, a' and
/// b, b' (each side independently assigns +1 or -1 per setting) and report
/// the largest |S| together with how many strategies attain it.
inline deterministic_bound_result<rational> enumerate_deterministic_bound() {
  deterministic_bound_result<rational> out;
  for (int mask = 0; mask < 16; ++mask) {
    int va = (mask & 1) ? 1 : -1;
    int va2 = (mask & 2) ? 1 : -1;
    int vb = (mask & 4) ? 1 : -1;
    int vb2 = (mask & 8) ? 1 : -1;
    int s = va * vb + va * vb2 + va2 * vb - va2 * vb2;
    rational absval(s < 0 ? -s : s);
    if (absval > out.max_abs_value) {
      out.max_abs_value = absval;
      out.attaining = 0;
      out.attaining_plus = 0;
      out.first_attaining = {va, va2, vb, vb2};
    }
    if (absval == out.max_abs_value) {
      ++out.attaining;
      if (rational(s) == out.max_abs_value) ++out.attaining_plus;
    }
  }
  return out;
}

}  // namespace lhv
