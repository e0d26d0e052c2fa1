#include "lhv/report_json.hpp"
#include "lhv/fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <string>

using lhv::model;
using lhv::rat;
using lhv::rational;
namespace fx = lhv::fixtures;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.is_open());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("an empty report carries only the envelope") {
  lhv::report_builder b;
  const auto& doc = b.document();
  REQUIRE(doc["schema_version"] == 1);
  REQUIRE(doc["tool"] == "lhv");
  REQUIRE(doc["tool_version"] == "1.0.0");
  REQUIRE(doc["results"].is_array());
  REQUIRE(doc["results"].empty());
  REQUIRE(b.str().back() == '\n');
  // Envelope keys come first and in a fixed order.
  REQUIRE(b.str().find("{\n  \"schema_version\": 1,\n  \"tool\": \"lhv\",") == 0);
}

TEST_CASE("numbers carry both the exact string and a double rendering") {
  lhv::report_builder b;
  b.add(lhv::check_factorability(fx::carddeck()));
  const auto& r = b.document()["results"][0];
  REQUIRE(r["kind"] == "check");
  REQUIRE(r["max_deviation"]["exact"] == "91/400");
  REQUIRE(r["max_deviation"]["value"] == 0.2275);
  REQUIRE(r["witness"]["lambda"] == "D_1");
  REQUIRE(r["witness"]["outcomes"] == "KB QR");

  // Float mode has no exact form to report.
  lhv::report_builder f;
  f.add(lhv::check_factorability(lhv::to_float_model(fx::carddeck())));
  REQUIRE(f.document()["results"][0]["max_deviation"]["exact"].is_null());

  // A satisfied condition reports a null witness.
  lhv::report_builder ok;
  ok.add(lhv::check_factorability(fx::product()));
  REQUIRE(ok.document()["results"][0]["holds"] == true);
  REQUIRE(ok.document()["results"][0]["witness"].is_null());
}

TEST_CASE("jarrett entries embed the three underlying checks") {
  lhv::report_builder b;
  b.add(lhv::jarrett_report(fx::carddeck()));
  b.add(lhv::jarrett_report(fx::twosetting()));
  const auto& deck = b.document()["results"][0];
  REQUIRE(deck["kind"] == "jarrett");
  REQUIRE(deck["parameter_independence"]["holds"] == true);
  REQUIRE(deck["outcome_independence"]["holds"] == false);
  REQUIRE(deck["factorability"]["holds"] == false);
  REQUIRE(deck["implication_holds"] == true);
  REQUIRE(deck["full_support"] == false);
  REQUIRE(deck["equivalence_holds"].is_null());
  REQUIRE(deck["probabilistic_determinism"] == "structural");

  const auto& two = b.document()["results"][1];
  REQUIRE(two["full_support"] == true);
  REQUIRE(two["equivalence_holds"] == true);
}

TEST_CASE("sample entries list every tuple with count and frequency") {
  model deck = fx::carddeck();
  lhv::report_builder b;
  b.add_sample(deck, lhv::sample(deck, 0, 100, 3));
  const auto& s = b.document()["results"][0];
  REQUIRE(s["kind"] == "sample");
  REQUIRE(s["generator"] == "splitmix64-counter");
  REQUIRE(s["seed"] == 3);
  REQUIRE(s["n"] == 100);
  REQUIRE(s["profile"] == "look look");
  REQUIRE(s["tuples"].size() == 16);
  std::uint64_t total = 0;
  for (const auto& t : s["tuples"]) total += t["count"].get<std::uint64_t>();
  REQUIRE(total == 100);
}

TEST_CASE("report bytes match the committed goldens") {
  {
    lhv::report_builder b;
    model deck = fx::carddeck();
    b.add(lhv::check_factorability(deck));
    b.add(lhv::check_determinism(deck));
    b.add(lhv::jarrett_report(deck));
    b.add_sample(deck, lhv::sample(deck, 0, 20, 1));
    REQUIRE(b.str() == slurp("tests/golden/carddeck_report.json"));
  }
  {
    lhv::report_builder b;
    model two = fx::twosetting();
    auto d = lhv::dichotomic_map::default_binary(two);
    b.add_chsh("a", "a2", "b", "b2", lhv::chsh_by_name(two, "a", "a2", "b", "b2", d));
    b.add_ch74("a", "a2", "b", "b2", lhv::ch74(two, 0, 1, 0, 1, {0, 0}, {0, 0}));
    model coins = fx::product();
    auto ext = lhv::deterministic_extension(coins);
    b.add_extension(ext, lhv::verify_extension(coins, ext));
    REQUIRE(b.str() == slurp("tests/golden/bell_extension_report.json"));
  }
}

TEST_CASE("chsh and ch74 entries agree with the classical relation") {
  model two = fx::twosetting();
  lhv::report_builder b;
  auto s = lhv::chsh(two, 0, 1, 0, 1, lhv::dichotomic_map::default_binary(two));
  auto c = lhv::ch74(two, 0, 1, 0, 1, {0, 0}, {0, 0});
  b.add_chsh("a", "a2", "b", "b2", s);
  b.add_ch74("a", "a2", "b", "b2", c);
  const auto& doc = b.document();
  REQUIRE(doc["results"][0]["s"]["exact"] == "-52/525");
  REQUIRE(doc["results"][1]["value"]["exact"] == "-551/1050");
  REQUIRE(s.value == 4 * c.value + 2);
}
