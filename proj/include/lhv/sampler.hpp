// Seeded simulation of a model under one setting profile: draw a hidden
// value from the prior, then an outcome tuple from its kernel row, n times.
//
// Randomness comes from a counter-indexed splitmix64 stream: draw d consumes
// the values at counters 2d and 2d+1 regardless of how draws are batched, so
// summaries are reproducible and independent of any chunking. The generator
// name is pinned in the summary so serialized results carry their own
// provenance.
#pragma once

#include "lhv/model.hpp"

#include <algorithm>
#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

namespace lhv {

/// splitmix64 output for a given counter position in the stream of `seed`.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the counter stream.
inline double uniform_at(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(splitmix64_at(seed, counter) >> 11) * 0x1.0p-53;
}

inline constexpr std::string_view sampler_generator_name = "splitmix64-counter";

template <class R>
struct sample_summary {
  std::string generator{sampler_generator_name};
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  std::size_t profile = 0;
  std::vector<std::uint64_t> counts;  // canonical tuple order
  std::vector<R> frequencies;         // counts / n
  R tv_distance{};                    // to the lambda-averaged analytic mixture
};

namespace detail {

/// Nonzero-probability entries of a distribution as (cumulative value,
/// index) pairs in canonical order, thresholds cached as doubles.
struct cdf_index {
  std::vector<double> cum;
  std::vector<std::size_t> index;

  template <class R>
  static cdf_index build(const std::vector<R>& dist) {
    cdf_index c;
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (dist[i] == R{}) continue;
      acc += to_double(dist[i]);
      c.cum.push_back(acc);
      c.index.push_back(i);
    }
    if (!c.cum.empty()) c.cum.back() = 1.0;
    return c;
  }

  std::size_t pick(double u) const {
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    return index[static_cast<std::size_t>(it - cum.begin())];
  }
};

}  // namespace detail

/// Tuple counts for draws [first, last) of the stream identified by seed.
/// Summing counts over a partition of [0, n) equals a single [0, n) run.
template <class R>
std::vector<std::uint64_t> sample_counts(const basic_model<R>& m, std::size_t profile,
                                         std::uint64_t first, std::uint64_t last,
                                         std::uint64_t seed) {
  if (profile >= m.profile_count()) throw domain_error("no such setting profile");
  auto prior_cdf = detail::cdf_index::build(m.prior[profile]);
  std::vector<detail::cdf_index> row_cdf(m.hidden_count());
  for (std::size_t l = 0; l < m.hidden_count(); ++l)
    row_cdf[l] = detail::cdf_index::build(m.kernel[l][profile]);

  std::vector<std::uint64_t> counts(m.tuple_count(profile), 0);
  for (std::uint64_t d = first; d < last; ++d) {
    std::size_t l = prior_cdf.pick(uniform_at(seed, 2 * d));
    std::size_t t = row_cdf[l].pick(uniform_at(seed, 2 * d + 1));
    ++counts[t];
  }
  return counts;
}

template <class R>
sample_summary<R> sample(const basic_model<R>& m, std::size_t profile, std::uint64_t n,
                         std::uint64_t seed) {
  if (n == 0) throw precondition_error("sample size must be at least 1");
  sample_summary<R> s;
  s.seed = seed;
  s.n = n;
  s.profile = profile;
  s.counts = sample_counts(m, profile, 0, n, seed);

  s.frequencies.resize(s.counts.size());
  for (std::size_t t = 0; t < s.counts.size(); ++t)
    s.frequencies[t] = R(s.counts[t]) / R(n);

  // Analytic lambda-averaged mixture under this profile.
  R tv{};
  for (std::size_t t = 0; t < s.counts.size(); ++t) {
    R mix{};
    for (std::size_t l = 0; l < m.hidden_count(); ++l)
      mix += m.prior[profile][l] * m.kernel[l][profile][t];
    tv += prob_abs(s.frequencies[t] - mix);
  }
  s.tv_distance = tv / R(2);
  return s;
}

/// Empirical conditional distribution over the sites the query leaves
/// unrestricted (full alphabet selected), given that the restricted sites
/// fall inside their selected subsets. Entries are keyed by the outcome
/// labels of the unrestricted sites in site order.
template <class R>
struct conditional_table {
  std::vector<std::size_t> free_sites;
  std::vector<std::string> labels;  // one per row, canonical order
  std::vector<R> frequencies;
};

template <class R>
std::uint64_t event_count(const basic_model<R>& m, const sample_summary<R>& s,
                          const event_query& q) {
  std::uint64_t acc = 0;
  for (std::size_t t = 0; t < s.counts.size(); ++t) {
    auto outs = m.decode_tuple(s.profile, t);
    bool match = true;
    for (std::size_t j = 0; j < m.site_count() && match; ++j)
      match = std::find(q.selected[j].begin(), q.selected[j].end(), outs[j]) !=
              q.selected[j].end();
    if (match) acc += s.counts[t];
  }
  return acc;
}

template <class R>
conditional_table<R> conditional_frequencies(const basic_model<R>& m,
                                             const sample_summary<R>& s,
                                             const event_query& q) {
  if (q.selected.size() != m.site_count())
    throw domain_error("condition must cover every site");
  auto settings = m.decode_profile(s.profile);

  conditional_table<R> table;
  for (std::size_t j = 0; j < m.site_count(); ++j)
    if (q.selected[j].size() == m.alphabet(j, settings[j]).size())
      table.free_sites.push_back(j);

  std::uint64_t total = event_count(m, s, q);
  if (total == 0) throw domain_error("conditioning event has zero empirical count");

  // Group matching counts by the outcomes at the free sites.
  std::vector<std::string> labels;
  std::vector<std::uint64_t> counts;
  for (std::size_t t = 0; t < s.counts.size(); ++t) {
    auto outs = m.decode_tuple(s.profile, t);
    bool match = true;
    for (std::size_t j = 0; j < m.site_count() && match; ++j)
      match = std::find(q.selected[j].begin(), q.selected[j].end(), outs[j]) !=
              q.selected[j].end();
    if (!match) continue;
    std::string key;
    for (std::size_t j : table.free_sites) {
      if (!key.empty()) key += ' ';
      key += m.alphabet(j, settings[j])[outs[j]];
    }
    auto it = std::find(labels.begin(), labels.end(), key);
    if (it == labels.end()) {
      labels.push_back(key);
      counts.push_back(s.counts[t]);
    } else {
      counts[static_cast<std::size_t>(it - labels.begin())] += s.counts[t];
    }
  }
  table.labels = std::move(labels);
  table.frequencies.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    table.frequencies[i] = R(counts[i]) / R(total);
  return table;
}

}  // namespace lhv
