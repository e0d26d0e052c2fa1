// Command-line front end. Loads a model from a file or a built-in fixture,
// runs condition checks, Bell evaluations, determinization, or sampling, and
// optionally writes a JSON report. Exit codes: 0 success, 1 a checked
// condition failed or a bound was violated, 2 usage or input errors.
#include "lhv/bell.hpp"
#include "lhv/checks.hpp"
#include "lhv/determinize.hpp"
#include "lhv/fixtures.hpp"
#include "lhv/report_json.hpp"
#include "lhv/sampler.hpp"
#include "lhv/text_format.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

lhv::model load_model(const std::string& spec) {
  if (spec.rfind("fixture:", 0) == 0) return lhv::fixtures::by_name(spec.substr(8));
  std::string path = spec;
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) {
    path = spec + ".lhv";
    in.open(path, std::ios::binary);
  }
  if (!in.is_open()) throw lhv::domain_error("cannot open model '" + spec + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto r = lhv::parse_model(buf.str());
  if (!r.ok()) throw lhv::domain_error(path + ": " + r.error->str());
  return *std::move(r.parsed);
}

std::string show(double v) { return nlohmann::json(v).dump(); }
std::string show(const lhv::rational& v) { return lhv::exact_string(v); }

std::string show_both(double v) { return show(v); }
std::string show_both(const lhv::rational& v) {
  return show(v) + " (" + show(lhv::to_double(v)) + ")";
}

std::string describe(const std::optional<lhv::witness>& w) {
  if (!w) return "";
  std::string out = " at";
  if (!w->lambda.empty()) out += " lambda=" + w->lambda;
  if (!w->profile.empty()) out += " profile=(" + w->profile + ")";
  if (!w->profile_b.empty()) out += " vs profile=(" + w->profile_b + ")";
  if (!w->site.empty()) out += " site=" + w->site;
  if (!w->prefix.empty()) {
    out += w->prefix.front() == '(' ? " prefix=" + w->prefix : " prefix=(" + w->prefix + ")";
  }
  if (!w->outcomes.empty()) out += " outcomes=(" + w->outcomes + ")";
  if (!w->detail.empty()) out += " [" + w->detail + "]";
  return out;
}

template <class R>
void print_check(const lhv::check_result<R>& r) {
  std::cout << lhv::condition_name(r.cond) << ": " << (r.holds ? "holds" : "FAILS");
  if (!r.holds) std::cout << "  max deviation " << show(r.max_deviation) << describe(r.where);
  if (r.skipped_contexts > 0)
    std::cout << "  (" << r.skipped_contexts << " zero-probability contexts skipped)";
  std::cout << "\n";
}

void write_report(const std::string& path, const lhv::report_builder& b) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out.is_open()) throw lhv::domain_error("cannot write report to '" + path + "'");
  out << b.str();
}

template <class R>
int do_check(const lhv::basic_model<R>& m, const std::string& which,
             const lhv::check_config<R>& cfg, const std::string& json_path) {
  lhv::report_builder rb;
  bool all_hold = true;
  auto run = [&](lhv::check_result<R> r) {
    print_check(r);
    all_hold = all_hold && r.holds;
    rb.add(r);
  };

  if (which == "all") {
    run(lhv::check_factorability(m, cfg));
    run(lhv::check_parameter_independence(m, cfg));
    run(lhv::check_outcome_independence(m, cfg));
    run(lhv::check_measurement_independence(m, cfg));
    run(lhv::check_determinism(m, cfg));
    if (m.lambda_parts) {
      run(lhv::check_separability(m, cfg));
    } else {
      std::cout << "separability: skipped (no per-site decomposition declared)\n";
    }
  } else if (which == "jarrett") {
    auto j = lhv::jarrett_report(m, cfg);
    print_check(j.parameter_independence);
    print_check(j.outcome_independence);
    print_check(j.factorability);
    std::cout << "full support: " << (j.full_support ? "yes" : "no") << "\n";
    std::cout << "(PI and OI) implies factorability: "
              << (j.implication_holds ? "confirmed" : "VIOLATED") << "\n";
    std::cout << "factorability equivalent to (PI and OI): ";
    if (j.equivalence_holds)
      std::cout << (*j.equivalence_holds ? "yes" : "no") << "\n";
    else
      std::cout << "not determined (model lacks full support)\n";
    rb.add(j);
    all_hold = j.parameter_independence.holds && j.outcome_independence.holds &&
               j.factorability.holds;
  } else if (which == "factorability") {
    run(lhv::check_factorability(m, cfg));
  } else if (which == "parameter-independence") {
    run(lhv::check_parameter_independence(m, cfg));
  } else if (which == "outcome-independence") {
    run(lhv::check_outcome_independence(m, cfg));
  } else if (which == "measurement-independence") {
    run(lhv::check_measurement_independence(m, cfg));
  } else if (which == "determinism") {
    run(lhv::check_determinism(m, cfg));
  } else if (which == "separability") {
    run(lhv::check_separability(m, cfg));
  } else {
    throw lhv::domain_error(
        "unknown condition '" + which +
        "' (expected all, jarrett, factorability, parameter-independence, "
        "outcome-independence, measurement-independence, determinism, separability)");
  }
  write_report(json_path, rb);
  return all_hold ? 0 : 1;
}

struct bell_args {
  std::string a, a2, b, b2;
  std::string map;
};

template <class R>
lhv::dichotomic_map resolve_map(const lhv::basic_model<R>& m, const std::string& spec) {
  if (spec.empty()) return lhv::dichotomic_map::default_binary(m);
  std::vector<std::string> plus;
  std::string cur;
  for (char c : spec + ",") {
    if (c == ',') {
      if (!cur.empty()) plus.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (plus.empty()) throw lhv::domain_error("empty --map");
  return lhv::dichotomic_map::by_name(m, plus);
}

template <class R>
void resolve_settings(const lhv::basic_model<R>& m, bell_args& s) {
  if (m.site_count() != 2) throw lhv::precondition_error("bell evaluation requires two sites");
  auto fallback = [&](std::string& v, std::size_t site, bool second) {
    if (!v.empty()) return;
    const auto& names = m.sites[site].settings;
    v = names[second && names.size() > 1 ? 1 : 0];
  };
  fallback(s.a, 0, false);
  fallback(s.a2, 0, true);
  fallback(s.b, 1, false);
  fallback(s.b2, 1, true);
}

template <class R>
int do_chsh(const lhv::basic_model<R>& m, bell_args s, const R& tol,
            const std::string& json_path) {
  resolve_settings(m, s);
  auto d = resolve_map(m, s.map);
  auto r = lhv::chsh_by_name(m, s.a, s.a2, s.b, s.b2, d, tol);
  const char* names[4][2] = {{s.a.c_str(), s.b.c_str()},
                             {s.a.c_str(), s.b2.c_str()},
                             {s.a2.c_str(), s.b.c_str()},
                             {s.a2.c_str(), s.b2.c_str()}};
  for (int i = 0; i < 4; ++i)
    std::cout << "E(" << names[i][0] << "," << names[i][1]
              << ") = " << show_both(r.correlators[i]) << "\n";
  std::cout << "S = " << show_both(r.value) << "\n";
  std::cout << "classical bound |S| <= 2: "
            << (r.within_classical_bound ? "satisfied" : "VIOLATED") << "\n";
  lhv::report_builder rb;
  rb.add_chsh(s.a, s.a2, s.b, s.b2, r);
  write_report(json_path, rb);
  return r.within_classical_bound ? 0 : 1;
}

/// The counted outcome per (site, setting) is the one the map sends to +1;
/// each alphabet must contain exactly one such outcome.
template <class R>
std::vector<std::size_t> targets_from(const lhv::basic_model<R>& m,
                                      const lhv::dichotomic_map& d, std::size_t site) {
  std::vector<std::size_t> t(m.sites[site].settings.size());
  for (std::size_t s = 0; s < t.size(); ++s) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < d.sign[site][s].size(); ++k) {
      if (d.sign[site][s][k] == 1) {
        t[s] = k;
        ++hits;
      }
    }
    if (hits != 1)
      throw lhv::precondition_error(
          "ch74 needs exactly one counted outcome per setting; adjust --map so each "
          "alphabet maps a single outcome to +1");
  }
  return t;
}

template <class R>
int do_ch74(const lhv::basic_model<R>& m, bell_args s, const R& tol,
            const std::string& json_path) {
  resolve_settings(m, s);
  auto d = resolve_map(m, s.map);
  auto r = lhv::ch74(m, m.find_setting(0, s.a), m.find_setting(0, s.a2),
                     m.find_setting(1, s.b), m.find_setting(1, s.b2), targets_from(m, d, 0),
                     targets_from(m, d, 1), tol);
  const char* names[4][2] = {{s.a.c_str(), s.b.c_str()},
                             {s.a.c_str(), s.b2.c_str()},
                             {s.a2.c_str(), s.b.c_str()},
                             {s.a2.c_str(), s.b2.c_str()}};
  for (int i = 0; i < 4; ++i)
    std::cout << "p(" << names[i][0] << "," << names[i][1]
              << ") = " << show_both(r.joints[i]) << "\n";
  std::cout << "p1(" << s.a << ") = " << show_both(r.singles[0]) << "\n";
  std::cout << "p2(" << s.b << ") = " << show_both(r.singles[1]) << "\n";
  std::cout << "ch74 = " << show_both(r.value) << "\n";
  std::cout << "classical range [-1, 0]: "
            << (r.within_classical_bound ? "satisfied" : "VIOLATED") << "\n";
  lhv::report_builder rb;
  rb.add_ch74(s.a, s.a2, s.b, s.b2, r);
  write_report(json_path, rb);
  return r.within_classical_bound ? 0 : 1;
}

int do_determinize(const lhv::model& m, bool verify, const std::string& json_path) {
  auto ext = lhv::deterministic_extension(m);
  auto rep = lhv::verify_extension(m, ext);
  std::cout << "extension: " << ext.extended.name << "\n";
  std::cout << "boxes: " << ext.extended.hidden_count() << " (ceiling "
            << lhv::box_count_ceiling(m) << ")\n";
  if (verify) {
    std::cout << "deterministic: " << (rep.deterministic ? "yes" : "NO") << "\n";
    std::cout << "recovery: " << (rep.recovery_exact ? "exact" : "MISMATCH") << "\n";
    if (rep.mismatch) std::cout << "  " << *rep.mismatch << "\n";
  }
  lhv::report_builder rb;
  rb.add_extension(ext, rep);
  write_report(json_path, rb);
  return rep.ok() ? 0 : 1;
}

template <class R>
std::size_t resolve_profile(const lhv::basic_model<R>& m, const std::string& spec) {
  bool digits = !spec.empty();
  for (char c : spec)
    if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
  if (digits) {
    std::size_t p = std::stoul(spec);
    if (p >= m.profile_count()) throw lhv::domain_error("no such setting profile");
    return p;
  }
  std::vector<std::string> names;
  std::string cur;
  for (char c : spec + ",") {
    if (c == ',') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return m.profile_by_name(names);
}

template <class R>
int do_sample(const lhv::basic_model<R>& m, const std::string& profile_spec, std::uint64_t n,
              std::uint64_t seed, const std::string& json_path) {
  std::size_t profile = resolve_profile(m, profile_spec);
  auto s = lhv::sample(m, profile, n, seed);
  std::cout << "profile: (" << m.profile_label(profile) << ")  generator: " << s.generator
            << "  seed: " << s.seed << "  n: " << s.n << "\n";
  for (std::size_t t = 0; t < s.counts.size(); ++t) {
    if (s.counts[t] == 0) continue;
    std::cout << m.tuple_label(profile, t) << "  " << s.counts[t] << "  "
              << show_both(s.frequencies[t]) << "\n";
  }
  std::cout << "tv-distance: " << show_both(s.tv_distance) << "\n";
  lhv::report_builder rb;
  rb.add_sample(m, s);
  write_report(json_path, rb);
  return 0;
}

int do_demo(const std::string& which) {
  if (which != "carddeck")
    throw lhv::domain_error("unknown demo '" + which + "' (available: carddeck)");
  lhv::model m = lhv::fixtures::carddeck();

  std::cout << "Two decks of four cards. Deck D_1 contains the pairs (KR,QB) and\n"
               "(KB,QR) with weights 3/10 and 7/10; deck D_2 swaps the weights. A\n"
               "deck is chosen fairly, a pair is drawn, the two cards go to sites L\n"
               "and R in random order.\n\n";

  auto king_black = m.make_query(0, {{"KR", "KB"}, {"KB", "QB"}});
  lhv::rational joint = m.event_prob(0, 0, king_black);
  auto only_king = m.make_query(0, {{"KR", "KB"}, {}});
  auto only_black = m.make_query(0, {{}, {"KB", "QB"}});
  lhv::rational product =
      m.event_prob(0, 0, only_king) * m.event_prob(0, 0, only_black);

  std::cout << "P(K at L, B at R | D_1) = " << show(joint) << "\n";
  std::cout << "P(K at L | D_1) * P(B at R | D_1) = " << show(product) << "\n";
  auto ev = lhv::check_event_factorability(m, 0, 0, king_black);
  std::cout << "event-level deviation: " << show(ev.max_deviation) << "\n\n";

  std::cout << "Fine-grained check over every outcome pair:\n";
  print_check(lhv::check_factorability(m));
  return 0;
}

int do_show(const lhv::model& m) {
  std::cout << lhv::serialize_model(m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite hidden-variable models: checks, Bell bounds, extensions, sampling"};
  app.require_subcommand(1);

  std::string model_spec, mode = "rational", condition = "all", json_path;
  std::string a, a2, b, b2, map_spec, profile_spec = "0", demo_which = "carddeck";
  double tol = 0.0;
  std::uint64_t n = 10000, seed = 0;
  bool verify = false;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", model_spec, "model file path or fixture:NAME")->required();
  };
  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "arithmetic mode (rational | float)")
        ->check(CLI::IsMember({"rational", "float"}));
    return sub->add_option("--tol", tol, "comparison tolerance (float mode only)");
  };

  auto* check = app.add_subcommand("check", "evaluate locality conditions");
  add_model(check);
  auto* check_tol = add_mode(check);
  check->add_option("--condition", condition, "condition name, 'jarrett', or 'all'");
  check->add_option("--json", json_path, "write a JSON report to this path");

  auto* chsh = app.add_subcommand("chsh", "four-term correlator combination");
  add_model(chsh);
  auto* chsh_tol = add_mode(chsh);
  chsh->add_option("--a", a, "first setting at site 0");
  chsh->add_option("--a2", a2, "second setting at site 0");
  chsh->add_option("--b", b, "first setting at site 1");
  chsh->add_option("--b2", b2, "second setting at site 1");
  chsh->add_option("--map", map_spec, "comma-separated outcomes mapped to +1");
  chsh->add_option("--json", json_path, "write a JSON report to this path");

  auto* ch74 = app.add_subcommand("ch74", "probability-form bound");
  add_model(ch74);
  auto* ch74_tol = add_mode(ch74);
  ch74->add_option("--a", a, "first setting at site 0");
  ch74->add_option("--a2", a2, "second setting at site 0");
  ch74->add_option("--b", b, "first setting at site 1");
  ch74->add_option("--b2", b2, "second setting at site 1");
  ch74->add_option("--map", map_spec, "comma-separated outcomes counted as the target");
  ch74->add_option("--json", json_path, "write a JSON report to this path");

  auto* det = app.add_subcommand("determinize", "deterministic extension of a factorable model");
  add_model(det);
  det->add_flag("--verify", verify, "check determinism and exact recovery");
  det->add_option("--json", json_path, "write a JSON report to this path");

  auto* sample = app.add_subcommand("sample", "simulate draws under one setting profile");
  add_model(sample);
  auto* sample_tol = add_mode(sample);
  sample->add_option("--profile", profile_spec, "profile index or comma-separated settings");
  sample->add_option("--n", n, "number of draws");
  sample->add_option("--seed", seed, "generator seed");
  sample->add_option("--json", json_path, "write a JSON report to this path");

  auto* demo = app.add_subcommand("demo", "walk through a built-in example");
  demo->add_option("name", demo_which, "demo name");

  auto* show_cmd = app.add_subcommand("show", "print the canonical text form");
  add_model(show_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto* tol_opt : {check_tol, chsh_tol, ch74_tol, sample_tol}) {
      if (tol_opt->count() > 0 && mode != "float")
        throw lhv::domain_error("--tol requires --mode float");
    }
    if (mode == "float" && tol == 0.0) tol = lhv::default_tolerance<double>();

    if (app.got_subcommand(demo)) return do_demo(demo_which);

    if (app.got_subcommand(check)) {
      lhv::model m = load_model(model_spec);
      if (mode == "float")
        return do_check(lhv::to_float_model(m), condition, lhv::check_config<double>(tol),
                        json_path);
      return do_check(m, condition, lhv::check_config<lhv::rational>{}, json_path);
    }
    if (app.got_subcommand(chsh)) {
      lhv::model m = load_model(model_spec);
      bell_args s{a, a2, b, b2, map_spec};
      if (mode == "float") return do_chsh(lhv::to_float_model(m), s, tol, json_path);
      return do_chsh(m, s, lhv::rational(0), json_path);
    }
    if (app.got_subcommand(ch74)) {
      lhv::model m = load_model(model_spec);
      bell_args s{a, a2, b, b2, map_spec};
      if (mode == "float") return do_ch74(lhv::to_float_model(m), s, tol, json_path);
      return do_ch74(m, s, lhv::rational(0), json_path);
    }
    if (app.got_subcommand(det)) return do_determinize(load_model(model_spec), verify, json_path);
    if (app.got_subcommand(sample)) {
      lhv::model m = load_model(model_spec);
      if (mode == "float")
        return do_sample(lhv::to_float_model(m), profile_spec, n, seed, json_path);
      return do_sample(m, profile_spec, n, seed, json_path);
    }
    if (app.got_subcommand(show_cmd)) return do_show(load_model(model_spec));
  } catch (const lhv::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
