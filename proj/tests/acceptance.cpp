// Acceptance gate. Runs the ten required end-to-end checks, prints exactly
// one PASS/FAIL line per criterion with its runtime, and exits nonzero if
// any fail or overrun their time budget. All probability comparisons are
// exact rational equality unless a tolerance is stated inline.
#include "lhv/bell.hpp"
#include "lhv/checks.hpp"
#include "lhv/determinize.hpp"
#include "lhv/fixtures.hpp"
#include "lhv/report_json.hpp"
#include "lhv/sampler.hpp"
#include "lhv/text_format.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"

using lhv::model;
using lhv::rat;
using lhv::rational;
namespace fx = lhv::fixtures;

namespace {

int failures = 0;

// Runs one criterion body (returning an empty string on success, a reason on
// failure) under a wall-clock budget and prints the single result line.
template <class F>
void criterion(int idx, const char* what, double limit_seconds, F body) {
  auto start = std::chrono::steady_clock::now();
  std::string reason;
  try {
    reason = body();
  } catch (const std::exception& e) {
    reason = std::string("exception: ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (reason.empty() && elapsed > limit_seconds)
    reason = "overran the " + std::to_string(limit_seconds) + " s budget";
  if (reason.empty()) {
    std::cout << "criterion " << idx << ": PASS  " << what << "  [" << std::fixed
              << std::setprecision(2) << elapsed << " s, limit " << limit_seconds << " s]\n";
  } else {
    std::cout << "criterion " << idx << ": FAIL  " << what << "  (" << reason << ")\n";
    ++failures;
  }
}

rational chain_product(const model& m, std::size_t l, std::size_t p, std::size_t t) {
  auto outs = m.decode_tuple(p, t);
  rational prod(1);
  for (std::size_t j = 0; j < m.site_count(); ++j) {
    std::vector<std::size_t> prefix(outs.begin(), outs.begin() + j);
    prod *= m.chain_factor(l, p, j, prefix, outs[j]).value;
  }
  return prod;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) return "<unreadable: " + path + ">";
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  criterion(1, "card-deck event probabilities are exact", 1.0, []() -> std::string {
    model deck = fx::carddeck();
    auto king_black = deck.make_query(0, {{"KR", "KB"}, {"KB", "QB"}});
    rational joint = deck.event_prob(0, 0, king_black);
    rational left = deck.event_prob(0, 0, deck.make_query(0, {{"KR", "KB"}, {}}));
    rational right = deck.event_prob(0, 0, deck.make_query(0, {{}, {"KB", "QB"}}));
    if (joint != rat(3, 20)) return "joint " + lhv::exact_string(joint) + ", want 3/20";
    if (left * right != rat(1, 4))
      return "marginal product " + lhv::exact_string(left * right) + ", want 1/4";
    auto ev = lhv::check_event_factorability(deck, 0, 0, king_black);
    if (ev.max_deviation != rat(1, 10))
      return "event deviation " + lhv::exact_string(ev.max_deviation) + ", want 1/10";
    return "";
  });

  criterion(2, "fine-grained factorability fails with the enumerated worst case", 1.0,
            []() -> std::string {
              model deck = fx::carddeck();
              auto r = lhv::check_factorability(deck);
              if (r.holds) return "factorability unexpectedly holds";
              // Independent enumeration over 2 pairs x 2 dealings per deck.
              auto worst = oracle::factor_deviation(oracle::joint_table(0));
              if (rational(r.max_deviation) != worst.dev)
                return "checker max " + lhv::exact_string(r.max_deviation) +
                       " disagrees with oracle " + lhv::exact_string(worst.dev);
              if (r.max_deviation != rat(91, 400) || r.where->outcomes != "KB QR" ||
                  r.where->lambda != "D_1")
                return "worst case " + lhv::exact_string(r.max_deviation) + " at (" +
                       r.where->lambda + ", " + r.where->outcomes + "), want 91/400 at "
                       "(D_1, KB QR)";
              // The (KR, QB) cell, taken by itself, deviates by 51/400.
              auto t = oracle::joint_table(0);
              rational kr_qb = t[oracle::KR][oracle::QB] -
                               oracle::left_marginal(t, oracle::KR) *
                                   oracle::right_marginal(t, oracle::QB);
              if (lhv::prob_abs(kr_qb) != rat(51, 400))
                return "per-cell deviation at (KR, QB) is " + lhv::exact_string(kr_qb) +
                       ", want magnitude 51/400";
              return "";
            });

  criterion(3, "chain factorization reproduces every joint exactly (200 random models)",
            30.0, []() -> std::string {
              std::mt19937_64 rng(3001);
              gen::options opt;  // up to 3 sites, 3 settings, 4 outcomes
              for (int i = 0; i < 200; ++i) {
                model m = gen::random_model(rng, opt);
                for (std::size_t l = 0; l < m.hidden_count(); ++l)
                  for (std::size_t p = 0; p < m.profile_count(); ++p)
                    for (std::size_t t = 0; t < m.tuple_count(p); ++t)
                      if (chain_product(m, l, p, t) != m.joint(l, p, t))
                        return "model " + std::to_string(i) + " lambda " +
                               std::to_string(l) + " tuple " + std::to_string(t);
              }
              return "";
            });

  criterion(4, "factorability equals PI and OI on full support (200 random models)", 60.0,
            []() -> std::string {
              std::mt19937_64 rng(4001);
              for (int i = 0; i < 200; ++i) {
                gen::options opt;
                opt.full_support = true;
                opt.factorable = (i % 2 == 1);
                opt.constant_prior = (i % 4 != 2);
                model m = gen::random_model(rng, opt);
                auto j = lhv::jarrett_report(m);
                if (!j.full_support) return "generator produced a zero entry";
                bool both = j.parameter_independence.holds && j.outcome_independence.holds;
                if (j.factorability.holds != both)
                  return "model " + std::to_string(i) + ": factorability " +
                         (j.factorability.holds ? "holds" : "fails") +
                         " but PI and OI say otherwise";
                if (!j.equivalence_holds || !*j.equivalence_holds)
                  return "equivalence flag not set on full support";
              }
              auto deck = lhv::jarrett_report(fx::carddeck());
              if (!deck.parameter_independence.holds) return "card deck: PI should hold";
              if (deck.outcome_independence.holds) return "card deck: OI should fail";
              if (deck.factorability.holds) return "card deck: factorability should fail";
              return "";
            });

  criterion(5, "deterministic kernels imply OI and factorability (200 random models)",
            30.0, []() -> std::string {
              std::mt19937_64 rng(5001);
              gen::options opt;
              opt.deterministic = true;
              for (int i = 0; i < 200; ++i) {
                model m = gen::random_model(rng, opt);
                if (!lhv::check_determinism(m).holds)
                  return "generator produced a non-deterministic kernel";
                if (!lhv::check_outcome_independence(m).holds)
                  return "model " + std::to_string(i) + " fails OI";
                if (!lhv::check_factorability(m).holds)
                  return "model " + std::to_string(i) + " fails factorability";
              }
              return "";
            });

  criterion(6, "deterministic extension recovers factorable models (100 random models)",
            60.0, []() -> std::string {
              std::mt19937_64 rng(6001);
              gen::options opt;
              opt.factorable = true;
              opt.max_settings = 2;
              opt.max_outcomes = 3;
              opt.constant_prior = false;
              for (int i = 0; i < 100; ++i) {
                model m = gen::random_model(rng, opt);
                auto ext = lhv::deterministic_extension(m);
                auto rep = lhv::verify_extension(m, ext);
                if (!rep.deterministic)
                  return "model " + std::to_string(i) + ": extension not deterministic";
                if (!rep.recovery_exact)
                  return "model " + std::to_string(i) + ": " + *rep.mismatch;
                if (ext.extended.hidden_count() > lhv::box_count_ceiling(m))
                  return "model " + std::to_string(i) + " exceeds the box ceiling";
              }
              return "";
            });

  criterion(7, "classical CHSH bound holds exactly (16 strategies, 500 random models)",
            60.0, []() -> std::string {
              auto bound = lhv::enumerate_deterministic_bound();
              if (bound.max_abs_value != rational(2) || bound.attaining != 16)
                return "strategy enumeration gives max " +
                       lhv::exact_string(bound.max_abs_value) + " attained by " +
                       std::to_string(bound.attaining);
              std::mt19937_64 rng(7001);
              for (int i = 0; i < 500; ++i) {
                model m = gen::random_model(rng, gen::bell_options());
                auto d = gen::random_map(rng, m);
                rational e00 = lhv::correlator(m, 0, 0, d);
                rational e01 = lhv::correlator(m, 0, 1, d);
                rational e10 = lhv::correlator(m, 1, 0, d);
                rational e11 = lhv::correlator(m, 1, 1, d);
                rational combos[4] = {e00 + e01 + e10 - e11, e00 + e01 - e10 + e11,
                                      e00 - e01 + e10 + e11, -e00 + e01 + e10 + e11};
                for (const rational& s : combos)
                  if (lhv::prob_abs(s) > rational(2))
                    return "model " + std::to_string(i) + " reaches |S| = " +
                           lhv::exact_string(lhv::prob_abs(s));
              }
              return "";
            });

  criterion(8, "completed card deck is local and aggregates back exactly", 1.0,
            []() -> std::string {
              model fine = fx::carddeck_complete();
              if (!lhv::check_determinism(fine).holds) return "determinism fails";
              if (!lhv::check_outcome_independence(fine).holds) return "OI fails";
              if (!lhv::check_separability(fine).holds) return "separability fails";
              if (!lhv::check_factorability(fine).holds) return "factorability fails";
              model coarse = lhv::aggregate_hidden(fine, fx::carddeck_deck_labels());
              model deck = fx::carddeck();
              if (coarse.kernel != deck.kernel) return "aggregated kernel differs";
              if (coarse.prior != deck.prior) return "aggregated prior differs";
              if (coarse.hidden != deck.hidden) return "aggregated labels differ";
              return "";
            });

  criterion(9, "sampler converges and separates 3/20 from 1/4 at n = 100000", 60.0,
            []() -> std::string {
              model deck = fx::carddeck();
              std::vector<rational> tvs;
              for (std::uint64_t seed = 1; seed <= 20; ++seed)
                tvs.push_back(lhv::sample(deck, 0, 100000, seed).tv_distance);
              std::sort(tvs.begin(), tvs.end());
              rational median = tvs[tvs.size() / 2];
              if (!(median < rat(1, 100)))
                return "median tv " + lhv::exact_string(median) + " not below 1/100";

              model d1 = lhv::condition_on_lambda(deck, "D_1");
              auto s = lhv::sample(d1, 0, 100000, 20240817);
              auto king_black = d1.make_query(0, {{"KR", "KB"}, {"KB", "QB"}});
              double freq =
                  static_cast<double>(lhv::event_count(d1, s, king_black)) / 100000.0;
              // Binomial standard error at p = 3/20, n = 1e5.
              double se = std::sqrt(0.15 * 0.85 / 100000.0);
              if (std::abs(freq - 0.15) >= 5 * se)
                return "conditioned frequency " + std::to_string(freq) +
                       " outside 5 standard errors of 3/20";
              if (std::abs(freq - 0.25) <= 5 * se)
                return "conditioned frequency " + std::to_string(freq) +
                       " not separated from 1/4";
              return "";
            });

  criterion(10, "text and JSON round trips are byte-stable", 30.0, []() -> std::string {
    for (const char* name : {"carddeck", "carddeck-complete", "product", "signaling",
                             "twosetting", "mi-violation", "anticorrelated"}) {
      model m = fx::by_name(name);
      std::string text = lhv::serialize_model(m);
      auto r = lhv::parse_model(text);
      if (!r.ok() || *r.parsed != m) return std::string("fixture ") + name + " round trip";
      if (slurp(std::string("fixtures/") + name + ".lhv") != text)
        return std::string("fixtures/") + name + ".lhv is stale";
    }
    std::mt19937_64 rng(10001);
    for (int i = 0; i < 100; ++i) {
      gen::options opt;
      opt.constant_prior = (i % 2 == 0);
      opt.deterministic = (i % 5 == 0);
      model m = gen::random_model(rng, opt);
      if (i % 3 == 0) {
        m.lambda_parts.emplace();
        for (const auto& h : m.hidden)
          m.lambda_parts->push_back(std::vector<std::string>(m.site_count(), h));
      }
      std::string text = lhv::serialize_model(m);
      auto r = lhv::parse_model(text);
      if (!r.ok() || *r.parsed != m) return "generated model " + std::to_string(i);
      if (lhv::serialize_model(*r.parsed) != text)
        return "serialization not idempotent on model " + std::to_string(i);
    }

    lhv::report_builder deck_report;
    model deck = fx::carddeck();
    deck_report.add(lhv::check_factorability(deck));
    deck_report.add(lhv::check_determinism(deck));
    deck_report.add(lhv::jarrett_report(deck));
    deck_report.add_sample(deck, lhv::sample(deck, 0, 20, 1));
    if (deck_report.str() != slurp("tests/golden/carddeck_report.json"))
      return "carddeck_report.json drifted";

    lhv::report_builder bell_report;
    model two = fx::twosetting();
    auto d = lhv::dichotomic_map::default_binary(two);
    bell_report.add_chsh("a", "a2", "b", "b2", lhv::chsh_by_name(two, "a", "a2", "b", "b2", d));
    bell_report.add_ch74("a", "a2", "b", "b2", lhv::ch74(two, 0, 1, 0, 1, {0, 0}, {0, 0}));
    model coins = fx::product();
    auto ext = lhv::deterministic_extension(coins);
    bell_report.add_extension(ext, lhv::verify_extension(coins, ext));
    if (bell_report.str() != slurp("tests/golden/bell_extension_report.json"))
      return "bell_extension_report.json drifted";
    return "";
  });

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  return 0;
}
