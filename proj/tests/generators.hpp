// Seeded random model builders for property tests. All draws go through the
// passed-in engine, so a fixed seed pins the whole run.
#pragma once

#include "lhv/bell.hpp"
#include "lhv/model.hpp"

#include <cstddef>
#include <random>
#include <string>
#include <vector>

namespace gen {

using lhv::model;
using lhv::rational;

struct options {
  std::size_t min_sites = 1, max_sites = 3;
  std::size_t min_settings = 1, max_settings = 3;
  std::size_t min_outcomes = 2, max_outcomes = 4;
  std::size_t min_hidden = 1, max_hidden = 3;
  int max_weight = 6;        // integer parts drawn from [0, max_weight]
  bool full_support = false; // every probability strictly positive
  bool factorable = false;   // per-site factors depending on own setting only
  bool deterministic = false;
  bool constant_prior = true;
};

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random distribution over k entries with denominator equal to the sum of
/// small integer parts. Sums to exactly 1.
inline std::vector<rational> random_dist(std::mt19937_64& rng, std::size_t k, int max_weight,
                                         bool positive) {
  std::uniform_int_distribution<int> part(positive ? 1 : 0, max_weight);
  std::vector<int> a(k);
  int sum = 0;
  for (auto& x : a) sum += (x = part(rng));
  if (sum == 0) sum = a[pick(rng, 0, k - 1)] = 1;
  std::vector<rational> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = rational(a[i]) / sum;
  return out;
}

inline model random_model(std::mt19937_64& rng, const options& opt) {
  model m;
  m.name = "gen";
  std::size_t n_sites = pick(rng, opt.min_sites, opt.max_sites);
  for (std::size_t j = 0; j < n_sites; ++j) {
    lhv::site s;
    s.name = "S" + std::to_string(j + 1);
    std::size_t n_settings = pick(rng, opt.min_settings, opt.max_settings);
    for (std::size_t k = 0; k < n_settings; ++k) {
      s.settings.push_back("s" + std::to_string(k + 1));
      std::size_t n_out = pick(rng, opt.min_outcomes, opt.max_outcomes);
      std::vector<std::string> alpha;
      for (std::size_t o = 0; o < n_out; ++o) alpha.push_back("o" + std::to_string(o + 1));
      s.alphabets.push_back(std::move(alpha));
    }
    m.sites.push_back(std::move(s));
  }
  std::size_t n_hidden = pick(rng, opt.min_hidden, opt.max_hidden);
  for (std::size_t l = 0; l < n_hidden; ++l) m.hidden.push_back("L" + std::to_string(l + 1));

  const std::size_t profiles = m.profile_count();
  if (opt.constant_prior) {
    auto dist = random_dist(rng, n_hidden, opt.max_weight, false);
    m.prior.assign(profiles, dist);
  } else {
    m.prior.resize(profiles);
    for (auto& v : m.prior) v = random_dist(rng, n_hidden, opt.max_weight, false);
  }

  m.kernel.resize(n_hidden);
  for (std::size_t l = 0; l < n_hidden; ++l) {
    m.kernel[l].resize(profiles);
    if (opt.factorable) {
      // One distribution per (site, setting); rows are their products.
      std::vector<std::vector<std::vector<rational>>> factor(n_sites);
      for (std::size_t j = 0; j < n_sites; ++j) {
        factor[j].resize(m.sites[j].settings.size());
        for (std::size_t s = 0; s < factor[j].size(); ++s)
          factor[j][s] =
              random_dist(rng, m.sites[j].alphabets[s].size(), opt.max_weight, opt.full_support);
      }
      for (std::size_t p = 0; p < profiles; ++p) {
        auto settings = m.decode_profile(p);
        std::size_t tuples = m.tuple_count(p);
        m.kernel[l][p].resize(tuples);
        for (std::size_t t = 0; t < tuples; ++t) {
          auto outs = m.decode_tuple(p, t);
          rational w(1);
          for (std::size_t j = 0; j < n_sites; ++j) w *= factor[j][settings[j]][outs[j]];
          m.kernel[l][p][t] = w;
        }
      }
    } else if (opt.deterministic) {
      for (std::size_t p = 0; p < profiles; ++p) {
        std::size_t tuples = m.tuple_count(p);
        m.kernel[l][p].assign(tuples, rational(0));
        m.kernel[l][p][pick(rng, 0, tuples - 1)] = 1;
      }
    } else {
      for (std::size_t p = 0; p < profiles; ++p)
        m.kernel[l][p] = random_dist(rng, m.tuple_count(p), opt.max_weight, opt.full_support);
    }
  }
  return m;
}

/// Two sites, exactly two settings each, binary-or-larger alphabets: the
/// shape the CHSH evaluators need.
inline options bell_options() {
  options opt;
  opt.min_sites = opt.max_sites = 2;
  opt.min_settings = opt.max_settings = 2;
  opt.factorable = true;
  opt.constant_prior = true;
  return opt;
}

inline lhv::dichotomic_map random_map(std::mt19937_64& rng, const model& m) {
  std::vector<std::vector<std::vector<int>>> sign(m.site_count());
  for (std::size_t j = 0; j < m.site_count(); ++j) {
    sign[j].resize(m.sites[j].settings.size());
    for (std::size_t s = 0; s < sign[j].size(); ++s) {
      sign[j][s].resize(m.sites[j].alphabets[s].size());
      for (auto& v : sign[j][s]) v = pick(rng, 0, 1) ? 1 : -1;
    }
  }
  return lhv::dichotomic_map::validated(m, std::move(sign));
}

}  // namespace gen
