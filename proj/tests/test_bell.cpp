#include "lhv/bell.hpp"
#include "lhv/checks.hpp"
#include "lhv/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "oracles.hpp"

using lhv::dichotomic_map;
using lhv::model;
using lhv::rat;
using lhv::rational;
namespace fx = lhv::fixtures;

namespace {

// K cards count +1 on the left, black cards +1 on the right.
dichotomic_map face_color_map(const model& deck) {
  return dichotomic_map::validated(deck, {{{1, 1, -1, -1}}, {{-1, 1, -1, 1}}});
}

}  // namespace

TEST_CASE("card-deck correlator averages to zero across the two decks") {
  model m = fx::carddeck();
  dichotomic_map d = face_color_map(m);

  const std::array<int, 4> sign_l = {1, 1, -1, -1};
  const std::array<int, 4> sign_r = {-1, 1, -1, 1};
  rational e_d1 = oracle::correlator(oracle::joint_table(0), sign_l, sign_r);
  rational e_d2 = oracle::correlator(oracle::joint_table(1), sign_l, sign_r);
  REQUIRE(e_d1 == rat(-2, 5));
  REQUIRE(e_d2 == rat(2, 5));

  REQUIRE(lhv::correlator(m, 0, 0, d) == rational(0));
  REQUIRE(lhv::correlator(lhv::condition_on_lambda(m, "D_1"), 0, 0, d) == e_d1);
  REQUIRE(lhv::correlator(lhv::condition_on_lambda(m, "D_2"), 0, 0, d) == e_d2);
}

TEST_CASE("correlator basics") {
  REQUIRE(lhv::correlator(fx::anticorrelated(), 0, 0,
                          dichotomic_map::default_binary(fx::anticorrelated())) ==
          rational(-1));
  // Uniform product: both factors centered, expectation zero.
  model fair = fx::product(rat(1, 2), rat(1, 2));
  REQUIRE(lhv::correlator(fair, 0, 0, dichotomic_map::default_binary(fair)) == rational(0));
  // Independent coins: E = (2p - 1)(2q - 1).
  model biased = fx::product();
  REQUIRE(lhv::correlator_by_name(biased, "m", "m",
                                  dichotomic_map::default_binary(biased)) == rat(1, 6));
  REQUIRE(lhv::correlator_by_name(biased, "m", "m",
                                  dichotomic_map::by_name(biased, {"H"})) == rat(1, 6));
}

TEST_CASE("correlator preconditions") {
  model three;
  three.name = "three";
  const std::vector<std::string> hs = {"H", "T"};
  three.sites = {lhv::site{"A", {"m"}, {hs}}, lhv::site{"B", {"m"}, {hs}},
                 lhv::site{"C", {"m"}, {hs}}};
  three.hidden = {"u"};
  three.prior = {{rational(1)}};
  three.kernel = {{std::vector<rational>(8, rat(1, 8))}};
  REQUIRE(three.validate().ok());
  REQUIRE_THROWS_AS(lhv::correlator(three, 0, 0, dichotomic_map::default_binary(three)),
                    lhv::precondition_error);

  model varying = fx::mi_violation();
  REQUIRE_THROWS_AS(
      lhv::correlator(varying, 0, 0, dichotomic_map::default_binary(varying)),
      lhv::precondition_error);
}

TEST_CASE("dichotomic map construction rules") {
  model m = fx::carddeck();
  REQUIRE_THROWS_AS(dichotomic_map::default_binary(m), lhv::precondition_error);
  REQUIRE_THROWS_AS(dichotomic_map::by_name(m, {"JOKER"}), lhv::domain_error);
  REQUIRE_THROWS_AS(dichotomic_map::validated(m, {{{1, 1, -1, -1}}}),
                    lhv::precondition_error);
  REQUIRE_THROWS_AS(dichotomic_map::validated(m, {{{1, 1, -1, 0}}, {{-1, 1, -1, 1}}}),
                    lhv::precondition_error);

  // by_name assigns +1 wherever the named outcome occurs.
  dichotomic_map kings = dichotomic_map::by_name(m, {"KR", "KB"});
  REQUIRE(kings.sign[0][0] == std::vector<int>{1, 1, -1, -1});
  REQUIRE(kings.sign[1][0] == std::vector<int>{1, 1, -1, -1});
}

TEST_CASE("chsh on the two-setting fixture stays inside the classical bound") {
  model m = fx::twosetting();
  dichotomic_map d = dichotomic_map::default_binary(m);

  // Independent per-site factors make every correlator a product of biases.
  const rational ph[2][2][2] = {
      {{rat(1, 2), rat(1, 3)}, {rat(1, 4), rat(1, 5)}},
      {{rat(2, 3), rat(1, 6)}, {rat(1, 2), rat(3, 7)}},
  };
  const rational w[2] = {rat(2, 5), rat(3, 5)};
  auto expect = [&](std::size_t sa, std::size_t sb) {
    rational acc;
    for (std::size_t l = 0; l < 2; ++l)
      acc += w[l] * (2 * ph[l][0][sa] - 1) * (2 * ph[l][1][sb] - 1);
    return acc;
  };
  REQUIRE(lhv::correlator(m, 0, 0, d) == expect(0, 0));
  REQUIRE(lhv::correlator(m, 1, 1, d) == expect(1, 1));

  auto r = lhv::chsh_by_name(m, "a", "a2", "b", "b2", d);
  REQUIRE(r.value == expect(0, 0) + expect(0, 1) + expect(1, 0) - expect(1, 1));
  REQUIRE(r.within_classical_bound);
  for (const auto& e : r.correlators) REQUIRE(lhv::prob_abs(e) <= rational(1));
}

TEST_CASE("deterministic strategies reach exactly the bound") {
  model all_plus = fx::deterministic_strategy(true, true, true, true);
  dichotomic_map d = dichotomic_map::default_binary(all_plus);
  auto r = lhv::chsh(all_plus, 0, 1, 0, 1, d);
  REQUIRE(r.value == rational(2));
  REQUIRE(r.within_classical_bound);

  // e2 answers -1 only under b2: the four terms are +1, -1, +1, -(-1).
  model mixed = fx::deterministic_strategy(true, true, true, false);
  REQUIRE(lhv::chsh(mixed, 0, 1, 0, 1, d).value == rational(2));
}

TEST_CASE("coinciding settings collapse chsh to twice one correlator") {
  model d1 = lhv::condition_on_lambda(fx::carddeck(), "D_1");
  dichotomic_map d = face_color_map(d1);
  auto r = lhv::chsh(d1, 0, 0, 0, 0, d);
  REQUIRE(r.value == rat(-4, 5));
  REQUIRE(r.within_classical_bound);
}

TEST_CASE("exhaustive deterministic enumeration pins the bound at 2") {
  auto b = lhv::enumerate_deterministic_bound();
  REQUIRE(b.max_abs_value == rational(2));
  REQUIRE(b.attaining == 16);
  REQUIRE(b.attaining_plus == 8);
  REQUIRE(b.first_attaining == std::array<int, 4>{-1, -1, -1, -1});
}

TEST_CASE("ch74 worked examples") {
  model fair = fx::product(rat(1, 2), rat(1, 2));
  auto r = lhv::ch74(fair, 0, 0, 0, 0, {0}, {0});
  REQUIRE(r.value == rat(-1, 2));
  REQUIRE(r.within_classical_bound);

  model always = fx::deterministic_strategy(true, true, true, true);
  auto top = lhv::ch74(always, 0, 1, 0, 1, {0, 0}, {0, 0});
  REQUIRE(top.value == rational(0));
  REQUIRE(top.within_classical_bound);

  model never = fx::deterministic_strategy(false, false, false, false);
  auto bottom = lhv::ch74(never, 0, 1, 0, 1, {0, 0}, {0, 0});
  REQUIRE(bottom.value == rational(0));
  REQUIRE(bottom.within_classical_bound);

  REQUIRE_THROWS_AS(lhv::ch74(always, 0, 1, 0, 1, {0}, {0, 0}), lhv::precondition_error);
}

TEST_CASE("ch74 and chsh satisfy the standard correspondence") {
  // With targets equal to the +1-mapped outcomes, S = 4 * ch74 + 2.
  model two = fx::twosetting();
  dichotomic_map d = dichotomic_map::default_binary(two);
  auto s = lhv::chsh(two, 0, 1, 0, 1, d);
  auto c = lhv::ch74(two, 0, 1, 0, 1, {0, 0}, {0, 0});
  REQUIRE(s.value == 4 * c.value + 2);

  std::mt19937_64 rng(73);
  gen::options opt = gen::bell_options();
  opt.min_outcomes = opt.max_outcomes = 2;
  for (int i = 0; i < 50; ++i) {
    model m = gen::random_model(rng, opt);
    auto sr = lhv::chsh(m, 0, 1, 0, 1, dichotomic_map::default_binary(m));
    auto cr = lhv::ch74(m, 0, 1, 0, 1, {0, 0}, {0, 0});
    REQUIRE(sr.value == 4 * cr.value + 2);
    REQUIRE(sr.within_classical_bound == cr.within_classical_bound);
  }
}

TEST_CASE("factorable measurement-independent models never break the bound") {
  std::mt19937_64 rng(74);
  for (int i = 0; i < 100; ++i) {
    model m = gen::random_model(rng, gen::bell_options());
    dichotomic_map d = gen::random_map(rng, m);
    auto e = [&](std::size_t a, std::size_t b) { return lhv::correlator(m, a, b, d); };
    rational e00 = e(0, 0), e01 = e(0, 1), e10 = e(1, 0), e11 = e(1, 1);
    for (const rational& v : {e00, e01, e10, e11}) REQUIRE(lhv::prob_abs(v) <= rational(1));
    // The bound is symmetric in which term carries the minus sign.
    REQUIRE(lhv::prob_abs(e00 + e01 + e10 - e11) <= rational(2));
    REQUIRE(lhv::prob_abs(e00 + e01 - e10 + e11) <= rational(2));
    REQUIRE(lhv::prob_abs(e00 - e01 + e10 + e11) <= rational(2));
    REQUIRE(lhv::prob_abs(-e00 + e01 + e10 + e11) <= rational(2));
  }
}

TEST_CASE("chsh is invariant under flipping both sites' maps") {
  std::mt19937_64 rng(75);
  model m = gen::random_model(rng, gen::bell_options());
  dichotomic_map d = gen::random_map(rng, m);
  dichotomic_map flipped = d;
  for (auto& per_site : flipped.sign)
    for (auto& per_setting : per_site)
      for (auto& v : per_setting) v = -v;
  REQUIRE(lhv::chsh(m, 0, 1, 0, 1, d).value == lhv::chsh(m, 0, 1, 0, 1, flipped).value);
}
