// Deterministic extension of a factorable model. Each hidden value's
// per-site outcome distributions are turned into inverse-CDF response
// functions on [0,1]; refining each site's unit interval by the cumulative
// breakpoints of all that site's settings yields a finite box partition of
// the hypercube on which every response is constant. The extended model has
// one hidden value per (original lambda, box), prior weight
// prior(lambda) * volume(box), and a 0/1 kernel.
//
// Intervals are half-open [lo, hi) with the last interval of each site
// closed at 1; zero-length intervals are dropped. All arithmetic is exact,
// so the integral over the hypercube is literally a finite sum.
#pragma once

#include "lhv/checks.hpp"
#include "lhv/model.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lhv {

/// One interval of a site's refined unit-interval partition, with the
/// response outcome it induces for every setting of that site.
struct response_interval {
  rational lo;
  rational hi;
  std::vector<std::size_t> outcome;  // indexed by setting
};

struct extension_result {
  model extended;
  // extended hidden index -> index of the original hidden value
  std::vector<std::size_t> origin;
  // extended hidden index -> per-site interval index into refinement
  std::vector<std::vector<std::size_t>> box;
  // extended hidden index -> box volume (product of interval lengths)
  std::vector<rational> volume;
  // refinement[original lambda][site] -> interval list
  std::vector<std::vector<std::vector<response_interval>>> refinement;
};

struct extension_verification {
  bool deterministic = false;
  bool recovery_exact = false;
  // set when recovery fails: names the first mismatching context
  std::optional<std::string> mismatch;

  bool ok() const { return deterministic && recovery_exact; }
};

namespace detail {

/// Cumulative sums 0 = c_0 <= ... <= c_m = 1 of site j's outcome
/// distribution under (lambda, setting). Requires the marginal to be the
/// same under every profile assigning that setting to site j.
inline std::vector<rational> cumulative_marginals(const model& m, std::size_t lambda,
                                                  std::size_t site, std::size_t setting) {
  std::optional<std::vector<rational>> dist;
  for (std::size_t p = 0; p < m.profile_count(); ++p) {
    if (m.decode_profile(p)[site] != setting) continue;
    std::size_t alpha = m.alphabet(site, setting).size();
    std::vector<rational> d(alpha);
    for (std::size_t k = 0; k < alpha; ++k) d[k] = m.marginal(lambda, p, site, k);
    if (!dist) {
      dist = std::move(d);
    } else if (*dist != d) {
      throw precondition_error(
          "cannot determinize: site " + m.sites[site].name + " marginal under (" +
          m.hidden[lambda] + ", " + m.sites[site].settings[setting] +
          ") changes with other sites' settings");
    }
  }
  std::vector<rational> cum(dist->size() + 1);
  cum[0] = 0;
  for (std::size_t k = 0; k < dist->size(); ++k) cum[k + 1] = cum[k] + (*dist)[k];
  return cum;
}

/// Refine [0,1] by the union of all settings' breakpoints at (lambda, site)
/// and record each interval's response outcome per setting.
inline std::vector<response_interval> refine_site(const model& m, std::size_t lambda,
                                                  std::size_t site) {
  const std::size_t n_settings = m.sites[site].settings.size();
  std::vector<std::vector<rational>> cums(n_settings);
  std::vector<rational> points{rational(0), rational(1)};
  for (std::size_t s = 0; s < n_settings; ++s) {
    cums[s] = cumulative_marginals(m, lambda, site, s);
    points.insert(points.end(), cums[s].begin(), cums[s].end());
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<response_interval> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i] == points[i + 1]) continue;
    response_interval iv{points[i], points[i + 1], std::vector<std::size_t>(n_settings)};
    for (std::size_t s = 0; s < n_settings; ++s) {
      // outcome k with c_{k-1} <= lo < c_k; zero-length outcome intervals
      // are never selected.
      auto it = std::upper_bound(cums[s].begin(), cums[s].end(), iv.lo);
      iv.outcome[s] = static_cast<std::size_t>(it - cums[s].begin()) - 1;
    }
    out.push_back(std::move(iv));
  }
  return out;
}

}  // namespace detail

/// Requires exact factorability; the witness of a failed factorability check
/// is cited in the error.
inline extension_result deterministic_extension(const model& m) {
  auto fact = check_factorability(m);
  if (!fact.holds) {
    const witness& w = *fact.where;
    throw precondition_error("cannot determinize a non-factorable model: deviation " +
                             exact_string(fact.max_deviation) + " at lambda=" + w.lambda +
                             " profile=(" + w.profile + ") outcomes=(" + w.outcomes + ")");
  }

  extension_result res;
  res.refinement.resize(m.hidden_count());
  model& ext = res.extended;
  ext.name = m.name + "-det";
  ext.sites = m.sites;
  ext.lambda_parts.emplace();

  for (std::size_t l = 0; l < m.hidden_count(); ++l) {
    auto& per_site = res.refinement[l];
    per_site.resize(m.site_count());
    for (std::size_t j = 0; j < m.site_count(); ++j)
      per_site[j] = detail::refine_site(m, l, j);

    // Enumerate boxes in lexicographic order of per-site interval indices.
    std::vector<std::size_t> idx(m.site_count(), 0);
    while (true) {
      rational weight(1);
      std::string box_name = m.hidden[l];
      std::vector<std::string> parts(m.site_count());
      for (std::size_t j = 0; j < m.site_count(); ++j) {
        const auto& iv = per_site[j][idx[j]];
        weight *= iv.hi - iv.lo;
        box_name += ".i" + std::to_string(idx[j]);
        parts[j] = m.hidden[l] + ".i" + std::to_string(idx[j]);
      }
      ext.hidden.push_back(box_name);
      ext.lambda_parts->push_back(std::move(parts));
      res.origin.push_back(l);
      res.box.push_back(idx);
      res.volume.push_back(weight);

      // Prior under each profile: original prior times box volume.
      for (std::size_t p = 0; p < m.profile_count(); ++p) {
        if (ext.prior.size() <= p) ext.prior.resize(m.profile_count());
        ext.prior[p].push_back(m.prior[p][l] * weight);
      }

      // 0/1 kernel rows from the responses.
      std::vector<std::vector<rational>> rows(m.profile_count());
      for (std::size_t p = 0; p < m.profile_count(); ++p) {
        auto settings = m.decode_profile(p);
        std::vector<std::size_t> outs(m.site_count());
        for (std::size_t j = 0; j < m.site_count(); ++j)
          outs[j] = per_site[j][idx[j]].outcome[settings[j]];
        rows[p].assign(m.tuple_count(p), rational(0));
        rows[p][m.encode_tuple(p, outs)] = 1;
      }
      ext.kernel.push_back(std::move(rows));

      std::size_t j = m.site_count();
      bool done = true;
      while (j > 0) {
        --j;
        if (++idx[j] < per_site[j].size()) {
          done = false;
          break;
        }
        idx[j] = 0;
      }
      if (done) break;
    }
  }
  return res;
}

/// Check that the extension is deterministic and that summing extended prior
/// weight over the boxes of each original lambda recovers every original
/// joint probability exactly.
inline extension_verification verify_extension(const model& original,
                                               const extension_result& ext) {
  extension_verification rep;
  rep.deterministic = check_determinism(ext.extended).holds;
  rep.recovery_exact = true;

  const model& e = ext.extended;
  for (std::size_t l = 0; l < original.hidden_count() && rep.recovery_exact; ++l) {
    for (std::size_t p = 0; p < original.profile_count() && rep.recovery_exact; ++p) {
      std::vector<rational> mass(original.tuple_count(p), rational(0));
      for (std::size_t v = 0; v < e.hidden_count(); ++v) {
        if (ext.origin[v] != l) continue;
        const auto& row = e.kernel[v][p];
        for (std::size_t t = 0; t < row.size(); ++t) {
          if (row[t] == rational(0)) continue;
          mass[t] += ext.volume[v];
        }
      }
      for (std::size_t t = 0; t < mass.size(); ++t) {
        if (mass[t] != original.joint(l, p, t)) {
          rep.recovery_exact = false;
          rep.mismatch = "lambda=" + original.hidden[l] + " profile=(" +
                         original.profile_label(p) + ") outcomes=(" +
                         original.tuple_label(p, t) + "): extension carries " +
                         exact_string(mass[t]) + ", model says " +
                         exact_string(original.joint(l, p, t));
          break;
        }
      }
    }
  }
  return rep;
}

/// Refinement-size ceiling: per lambda and site, at most
/// 1 + sum over settings of (alphabet size - 1) intervals.
inline std::size_t box_count_ceiling(const model& m) {
  std::size_t total = 0;
  for (std::size_t l = 0; l < m.hidden_count(); ++l) {
    std::size_t per_lambda = 1;
    for (std::size_t j = 0; j < m.site_count(); ++j) {
      std::size_t cuts = 1;
      for (std::size_t s = 0; s < m.sites[j].settings.size(); ++s)
        cuts += m.sites[j].alphabets[s].size() - 1;
      per_lambda *= cuts;
    }
    total += per_lambda;
  }
  return total;
}

}  // namespace lhv
