// Built-in models used by the CLI, the demos, and the test suite.
#pragma once

#include "lhv/model.hpp"

#include <vector>

namespace lhv::fixtures {

// Two observers L and R, one "look" setting each, outcome = the card received
// (face K/Q crossed with color R/B). The hidden value is which of two decks
// the dealt pair came from: deck D_1 holds 30% (KR,QB) pairs and 70% (KB,QR),
// deck D_2 the reverse; each pair is dealt either way around with equal
// probability.
inline model carddeck() {
  model m;
  m.name = "carddeck";
  const std::vector<std::string> cards = {"KR", "KB", "QR", "QB"};
  m.sites = {site{"L", {"look"}, {cards}}, site{"R", {"look"}, {cards}}};
  m.hidden = {"D_1", "D_2"};
  m.prior = {{rat(1, 2), rat(1, 2)}};
  auto row_for = [&](rational frac_krqb) {
    std::vector<rational> row(16, rational(0));
    rational half_frac = frac_krqb / 2;
    rational half_other = (rational(1) - frac_krqb) / 2;
    auto at = [&](int l, int r) -> rational& { return row[static_cast<std::size_t>(l * 4 + r)]; };
    at(0, 3) = half_frac;   // (KR, QB)
    at(3, 0) = half_frac;   // (QB, KR)
    at(1, 2) = half_other;  // (KB, QR)
    at(2, 1) = half_other;  // (QR, KB)
    return row;
  };
  m.kernel = {{row_for(rat(3, 10))}, {row_for(rat(7, 10))}};
  return m;
}

// The deterministic completion of the card deck: the hidden value is the full
// dealt configuration (deck, card handed to L, card handed to R), so every
// kernel entry is 0 or 1. The per-site decomposition assigns each observer
// their own card.
inline model carddeck_complete() {
  model m;
  m.name = "carddeck-complete";
  const std::vector<std::string> cards = {"KR", "KB", "QR", "QB"};
  m.sites = {site{"L", {"look"}, {cards}}, site{"R", {"look"}, {cards}}};

  struct config {
    const char* deck;
    int l_card;
    int r_card;
    rational weight;
  };
  const rational w3 = rat(3, 40);  // 1/2 deck * 3/10 pair * 1/2 dealing
  const rational w7 = rat(7, 40);
  const std::vector<config> configs = {
      {"D_1", 0, 3, w3}, {"D_1", 3, 0, w3}, {"D_1", 1, 2, w7}, {"D_1", 2, 1, w7},
      {"D_2", 0, 3, w7}, {"D_2", 3, 0, w7}, {"D_2", 1, 2, w3}, {"D_2", 2, 1, w3},
  };

  std::vector<rational> prior_row;
  std::vector<std::vector<std::string>> parts;
  for (const auto& c : configs) {
    m.hidden.push_back(std::string(c.deck) + "." + cards[static_cast<std::size_t>(c.l_card)] +
                       "." + cards[static_cast<std::size_t>(c.r_card)]);
    prior_row.push_back(c.weight);
    parts.push_back({cards[static_cast<std::size_t>(c.l_card)],
                     cards[static_cast<std::size_t>(c.r_card)]});
    std::vector<rational> row(16, rational(0));
    row[static_cast<std::size_t>(c.l_card * 4 + c.r_card)] = rational(1);
    m.kernel.push_back({std::move(row)});
  }
  m.prior = {prior_row};
  m.lambda_parts = parts;
  return m;
}

/// Grouping labels that collapse the completed card deck back to its deck label.
inline std::vector<std::string> carddeck_deck_labels() {
  return {"D_1", "D_1", "D_1", "D_1", "D_2", "D_2", "D_2", "D_2"};
}

// Independent coins at two sites: P(H) = p at site A, P(H) = q at site B,
// one hidden value. Factorable by construction.
inline model product(const rational& p = rat(1, 3), const rational& q = rat(1, 4)) {
  model m;
  m.name = "product";
  const std::vector<std::string> hs = {"H", "T"};
  m.sites = {site{"A", {"m"}, {hs}}, site{"B", {"m"}, {hs}}};
  m.hidden = {"u"};
  m.prior = {{rational(1)}};
  m.kernel = {{{p * q, p * (rational(1) - q), (rational(1) - p) * q,
                (rational(1) - p) * (rational(1) - q)}}};
  m.lambda_parts = {{{"u", "u"}}};
  return m;
}

// Site B's setting choice steers site A's statistics: under (a, b) the two
// coins are independent and uniform, under (a, b2) site A's marginal shifts
// to 1/4 and the joint is correlated. Violates parameter independence,
// outcome independence, and factorability.
inline model signaling() {
  model m;
  m.name = "signaling";
  const std::vector<std::string> hs = {"H", "T"};
  m.sites = {site{"A", {"a"}, {hs}}, site{"B", {"b", "b2"}, {hs, hs}}};
  m.hidden = {"s"};
  m.prior = {{rational(1)}, {rational(1)}};
  m.kernel = {{
      {rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)},  // (a, b):  HH HT TH TT
      {rat(1, 4), rational(0), rat(1, 4), rat(1, 2)},  // (a, b2)
  }};
  return m;
}

// Two settings per site with per-site kernels that depend only on the local
// setting; two hidden values with full support. Factorable, parameter- and
// outcome-independent, measurement-independent.
inline model twosetting() {
  model m;
  m.name = "twosetting";
  const std::vector<std::string> hs = {"H", "T"};
  m.sites = {site{"A", {"a", "a2"}, {hs, hs}}, site{"B", {"b", "b2"}, {hs, hs}}};
  m.hidden = {"v1", "v2"};
  m.prior.assign(4, {rat(2, 5), rat(3, 5)});

  // per hidden value, per site, per setting: P(H)
  const rational ph[2][2][2] = {
      {{rat(1, 2), rat(1, 3)}, {rat(1, 4), rat(1, 5)}},
      {{rat(2, 3), rat(1, 6)}, {rat(1, 2), rat(3, 7)}},
  };
  m.kernel.assign(2, std::vector<std::vector<rational>>(4));
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t p = 0; p < 4; ++p) {
      auto settings_ = m.decode_profile(p);
      rational pa = ph[l][0][settings_[0]];
      rational pb = ph[l][1][settings_[1]];
      m.kernel[l][p] = {pa * pb, pa * (rational(1) - pb), (rational(1) - pa) * pb,
                        (rational(1) - pa) * (rational(1) - pb)};
    }
  }
  return m;
}

// Identical uniform kernels everywhere, but the hidden-value prior depends on
// the setting profile. Violates measurement independence and nothing else.
inline model mi_violation() {
  model m;
  m.name = "mi-violation";
  const std::vector<std::string> hs = {"H", "T"};
  m.sites = {site{"A", {"a"}, {hs}}, site{"B", {"b", "b2"}, {hs, hs}}};
  m.hidden = {"m0", "m1"};
  m.prior = {{rat(1, 2), rat(1, 2)}, {rat(1, 3), rat(2, 3)}};
  std::vector<rational> uniform = {rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)};
  m.kernel = {{uniform, uniform}, {uniform, uniform}};
  return m;
}

// Two hidden values, each forcing opposite outcomes at the two sites.
// Deterministic and perfectly anticorrelated.
inline model anticorrelated() {
  model m;
  m.name = "anticorrelated";
  const std::vector<std::string> hs = {"H", "T"};
  m.sites = {site{"A", {"m"}, {hs}}, site{"B", {"m"}, {hs}}};
  m.hidden = {"u0", "u1"};
  m.prior = {{rat(1, 2), rat(1, 2)}};
  m.kernel = {
      {{rational(0), rational(1), rational(0), rational(0)}},  // u0 -> (H, T)
      {{rational(0), rational(0), rational(1), rational(0)}},  // u1 -> (T, H)
  };
  return m;
}

// Single hidden value; each site answers a fixed outcome per setting
// regardless of everything else. `first[site][setting]` true means the
// first alphabet entry is produced. Two settings per site.
inline model deterministic_strategy(bool a_first, bool a2_first, bool b_first, bool b2_first) {
  model m;
  m.name = "strategy";
  const std::vector<std::string> hs = {"H", "T"};
  m.sites = {site{"A", {"a", "a2"}, {hs, hs}}, site{"B", {"b", "b2"}, {hs, hs}}};
  m.hidden = {"d"};
  m.prior.assign(4, {rational(1)});
  const bool first[2][2] = {{a_first, a2_first}, {b_first, b2_first}};
  m.kernel.assign(1, std::vector<std::vector<rational>>(4));
  for (std::size_t p = 0; p < 4; ++p) {
    auto settings_ = m.decode_profile(p);
    std::size_t oa = first[0][settings_[0]] ? 0 : 1;
    std::size_t ob = first[1][settings_[1]] ? 0 : 1;
    std::vector<rational> row(4, rational(0));
    row[oa * 2 + ob] = rational(1);
    m.kernel[0][p] = std::move(row);
  }
  m.lambda_parts = {{{"d", "d"}}};
  return m;
}

/// Look up a built-in fixture by name; throws domain_error for unknown names.
inline model by_name(std::string_view name) {
  if (name == "carddeck") return carddeck();
  if (name == "carddeck-complete") return carddeck_complete();
  if (name == "product") return product();
  if (name == "signaling") return signaling();
  if (name == "twosetting") return twosetting();
  if (name == "mi-violation") return mi_violation();
  if (name == "anticorrelated") return anticorrelated();
  throw domain_error("unknown fixture '" + std::string(name) +
                     "' (available: carddeck, carddeck-complete, product, signaling, "
                     "twosetting, mi-violation, anticorrelated)");
}

}  // namespace lhv::fixtures
