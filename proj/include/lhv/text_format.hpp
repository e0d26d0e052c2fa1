// Line-oriented text format for model documents.
//
//   model NAME
//   site NAME : SETTING...
//   outcomes SITE SETTING : OUTCOME...
//   lambda NAME = WEIGHT            (default prior weight, all profiles)
//   prior SETTING... : WEIGHT...    (per-profile override, one weight per lambda)
//   p LAMBDA | SETTING... : OUTCOME... = WEIGHT
//   parts LAMBDA : COMPONENT...
//
// '#' starts a comment. Weights are "p/q", integers, or decimals (parsed
// exactly, 0.3 is 3/10). Kernel entries not listed are zero. The serializer
// emits declarations in model order, weights in lowest terms, and only
// nonzero kernel entries, so serialize is byte-stable and parse(serialize(m))
// reproduces m exactly.
#pragma once

#include "lhv/model.hpp"

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lhv {

struct diagnostic {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
  std::string message;

  std::string str() const {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
           message;
  }
};

struct parse_result {
  std::optional<model> parsed;
  std::optional<diagnostic> error;

  bool ok() const { return parsed.has_value(); }
};

namespace detail {

struct token {
  std::string text;
  std::size_t column;
  bool is_punct;
};

inline std::vector<token> lex_line(const std::string& line) {
  std::vector<token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == ':' || c == '=' || c == '|') {
      out.push_back({std::string(1, c), i + 1, true});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size()) {
      char d = line[i];
      if (std::isspace(static_cast<unsigned char>(d)) || d == ':' || d == '=' || d == '|' ||
          d == '#')
        break;
      ++i;
    }
    out.push_back({line.substr(start, i - start), start + 1, false});
  }
  return out;
}

struct parse_failure {
  diagnostic diag;
};

[[noreturn]] inline void fail(std::size_t line, std::size_t column, std::string message) {
  throw parse_failure{diagnostic{line, column, std::move(message)}};
}

inline rational parse_weight(const token& t, std::size_t line) {
  const std::string& s = t.text;
  bool digits = !s.empty();
  std::size_t slash = std::string::npos, dot = std::string::npos;
  for (std::size_t i = 0; i < s.size() && digits; ++i) {
    char c = s[i];
    if (c == '/' && slash == std::string::npos && dot == std::string::npos && i > 0 &&
        i + 1 < s.size()) {
      slash = i;
    } else if (c == '.' && dot == std::string::npos && slash == std::string::npos && i > 0 &&
               i + 1 < s.size()) {
      dot = i;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      digits = false;
    }
  }
  if (!digits) fail(line, t.column, "expected a number, got '" + s + "'");
  if (dot != std::string::npos) {
    std::string frac = s.substr(dot + 1);
    rational den(1);
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    return rational(s.substr(0, dot)) + rational(frac) / den;
  }
  return rational(s);  // handles both "n" and "p/q"
}

}  // namespace detail

inline parse_result parse_model(const std::string& text) {
  using detail::fail;
  using detail::token;

  model m;
  bool have_name = false;
  std::vector<rational> lambda_defaults;
  std::vector<std::size_t> lambda_lines;
  std::map<std::size_t, std::pair<std::vector<rational>, std::size_t>> prior_overrides;
  // (lambda, profile) -> (row, first line)
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> row_lines;
  std::vector<std::vector<std::vector<rational>>> kernel_rows;
  std::map<std::size_t, std::vector<std::string>> parts_by_lambda;

  auto find_or_fail = [&](const std::vector<std::string>& names, const token& t,
                          std::size_t line, const char* what) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == t.text) return i;
    fail(line, t.column, std::string("unknown ") + what + " '" + t.text + "'");
  };
  auto parse_profile = [&](const std::vector<token>& toks, std::size_t from, std::size_t count,
                           std::size_t line) {
    if (m.sites.empty()) fail(line, toks[from - 1].column, "no sites declared yet");
    if (count != m.site_count())
      fail(line, toks[from - 1].column,
           "expected one setting per site (" + std::to_string(m.site_count()) + ")");
    std::vector<std::size_t> settings(m.site_count());
    for (std::size_t j = 0; j < m.site_count(); ++j)
      settings[j] = find_or_fail(m.sites[j].settings, toks[from + j], line, "setting");
    return settings;
  };
  auto punct_at = [&](const std::vector<token>& toks, std::size_t line, const char* p) {
    for (std::size_t i = 0; i < toks.size(); ++i)
      if (toks[i].is_punct && toks[i].text == p) return i;
    std::size_t col = toks.empty() ? 1 : toks.back().column + toks.back().text.size();
    fail(line, col, std::string("expected '") + p + "'");
  };

  try {
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      auto toks = detail::lex_line(raw);
      if (toks.empty()) continue;
      const token& head = toks[0];
      if (head.is_punct) fail(lineno, head.column, "statement cannot start with '" + head.text + "'");
      if (!have_name && head.text != "model")
        fail(lineno, head.column, "document must start with a 'model' statement");

      if (head.text == "model") {
        if (have_name) fail(lineno, head.column, "duplicate 'model' statement");
        if (toks.size() != 2 || toks[1].is_punct)
          fail(lineno, head.column, "usage: model NAME");
        m.name = toks[1].text;
        have_name = true;
      } else if (head.text == "site") {
        if (!m.hidden.empty() || !kernel_rows.empty())
          fail(lineno, head.column, "sites must be declared before lambdas");
        std::size_t colon = punct_at(toks, lineno, ":");
        if (colon != 2 || toks.size() < 4)
          fail(lineno, head.column, "usage: site NAME : SETTING...");
        site s;
        s.name = toks[1].text;
        for (const auto& other : m.sites)
          if (other.name == s.name) fail(lineno, toks[1].column, "duplicate site '" + s.name + "'");
        for (std::size_t i = colon + 1; i < toks.size(); ++i) {
          if (toks[i].is_punct) fail(lineno, toks[i].column, "unexpected '" + toks[i].text + "'");
          for (const auto& prev : s.settings)
            if (prev == toks[i].text)
              fail(lineno, toks[i].column, "duplicate setting '" + toks[i].text + "'");
          s.settings.push_back(toks[i].text);
        }
        s.alphabets.resize(s.settings.size());
        m.sites.push_back(std::move(s));
      } else if (head.text == "outcomes") {
        std::size_t colon = punct_at(toks, lineno, ":");
        if (colon != 3 || toks.size() < 5)
          fail(lineno, head.column, "usage: outcomes SITE SETTING : OUTCOME...");
        std::size_t j = 0;
        for (; j < m.sites.size(); ++j)
          if (m.sites[j].name == toks[1].text) break;
        if (j == m.sites.size()) fail(lineno, toks[1].column, "unknown site '" + toks[1].text + "'");
        std::size_t s = find_or_fail(m.sites[j].settings, toks[2], lineno, "setting");
        if (!m.sites[j].alphabets[s].empty())
          fail(lineno, toks[2].column, "alphabet already declared for this setting");
        for (std::size_t i = colon + 1; i < toks.size(); ++i) {
          if (toks[i].is_punct) fail(lineno, toks[i].column, "unexpected '" + toks[i].text + "'");
          for (const auto& prev : m.sites[j].alphabets[s])
            if (prev == toks[i].text)
              fail(lineno, toks[i].column, "duplicate outcome '" + toks[i].text + "'");
          m.sites[j].alphabets[s].push_back(toks[i].text);
        }
      } else if (head.text == "lambda") {
        if (!kernel_rows.empty())
          fail(lineno, head.column, "lambdas must be declared before kernel entries");
        if (toks.size() != 4 || !toks[2].is_punct || toks[2].text != "=")
          fail(lineno, head.column, "usage: lambda NAME = WEIGHT");
        for (const auto& prev : m.hidden)
          if (prev == toks[1].text)
            fail(lineno, toks[1].column, "duplicate lambda '" + toks[1].text + "'");
        m.hidden.push_back(toks[1].text);
        lambda_defaults.push_back(detail::parse_weight(toks[3], lineno));
        lambda_lines.push_back(lineno);
      } else if (head.text == "prior") {
        std::size_t colon = punct_at(toks, lineno, ":");
        auto settings = parse_profile(toks, 1, colon - 1, lineno);
        if (m.hidden.empty()) fail(lineno, head.column, "no lambdas declared yet");
        if (toks.size() - colon - 1 != m.hidden.size())
          fail(lineno, head.column,
               "expected one weight per lambda (" + std::to_string(m.hidden.size()) + ")");
        std::vector<rational> vec(m.hidden.size());
        for (std::size_t i = 0; i < vec.size(); ++i)
          vec[i] = detail::parse_weight(toks[colon + 1 + i], lineno);
        std::size_t p = m.encode_profile(settings);
        if (prior_overrides.count(p))
          fail(lineno, head.column, "duplicate prior for this profile");
        prior_overrides[p] = {std::move(vec), lineno};
      } else if (head.text == "p") {
        std::size_t bar = punct_at(toks, lineno, "|");
        std::size_t colon = punct_at(toks, lineno, ":");
        std::size_t eq = punct_at(toks, lineno, "=");
        if (bar != 2 || colon <= bar || eq != toks.size() - 2 || eq <= colon)
          fail(lineno, head.column, "usage: p LAMBDA | SETTING... : OUTCOME... = WEIGHT");
        std::size_t l = find_or_fail(m.hidden, toks[1], lineno, "lambda");
        auto settings = parse_profile(toks, bar + 1, colon - bar - 1, lineno);
        std::size_t p = m.encode_profile(settings);
        if (eq - colon - 1 != m.site_count())
          fail(lineno, toks[colon].column, "expected one outcome per site");
        std::vector<std::size_t> outs(m.site_count());
        for (std::size_t j = 0; j < m.site_count(); ++j) {
          const auto& alpha = m.sites[j].alphabets[settings[j]];
          if (alpha.empty())
            fail(lineno, toks[colon + 1 + j].column,
                 "site '" + m.sites[j].name + "' has no alphabet for setting '" +
                     m.sites[j].settings[settings[j]] + "'");
          outs[j] = find_or_fail(alpha, toks[colon + 1 + j], lineno, "outcome");
        }
        if (kernel_rows.empty()) {
          kernel_rows.resize(m.hidden_count());
          for (std::size_t li = 0; li < m.hidden_count(); ++li) {
            kernel_rows[li].resize(m.profile_count());
            for (std::size_t pi = 0; pi < m.profile_count(); ++pi)
              kernel_rows[li][pi].assign(m.tuple_count(pi), rational(0));
          }
        }
        std::size_t t = m.encode_tuple(p, outs);
        if (kernel_rows[l][p][t] != rational(0))
          fail(lineno, head.column, "duplicate kernel entry");
        kernel_rows[l][p][t] = detail::parse_weight(toks[eq + 1], lineno);
        row_lines.emplace(std::make_pair(l, p), lineno);
      } else if (head.text == "parts") {
        std::size_t colon = punct_at(toks, lineno, ":");
        if (colon != 2) fail(lineno, head.column, "usage: parts LAMBDA : COMPONENT...");
        std::size_t l = find_or_fail(m.hidden, toks[1], lineno, "lambda");
        if (toks.size() - colon - 1 != m.site_count())
          fail(lineno, head.column, "expected one component per site");
        if (parts_by_lambda.count(l))
          fail(lineno, toks[1].column, "duplicate parts for lambda '" + toks[1].text + "'");
        std::vector<std::string> comps;
        for (std::size_t i = colon + 1; i < toks.size(); ++i) {
          if (toks[i].is_punct) fail(lineno, toks[i].column, "unexpected '" + toks[i].text + "'");
          comps.push_back(toks[i].text);
        }
        parts_by_lambda[l] = std::move(comps);
      } else {
        fail(lineno, head.column, "unknown statement '" + head.text + "'");
      }
    }

    if (!have_name) fail(1, 1, "empty document: expected a 'model' statement");
    if (m.sites.empty()) fail(1, 1, "document declares no sites");
    for (std::size_t j = 0; j < m.sites.size(); ++j)
      for (std::size_t s = 0; s < m.sites[j].settings.size(); ++s)
        if (m.sites[j].alphabets[s].empty())
          fail(1, 1,
               "no outcomes declared for site '" + m.sites[j].name + "', setting '" +
                   m.sites[j].settings[s] + "'");
    if (m.hidden.empty()) fail(1, 1, "document declares no lambdas");

    // Priors: defaults from lambda lines, then per-profile overrides.
    m.prior.assign(m.profile_count(), lambda_defaults);
    for (auto& [p, entry] : prior_overrides) m.prior[p] = entry.first;
    for (std::size_t p = 0; p < m.profile_count(); ++p) {
      rational sum(0);
      for (const auto& w : m.prior[p]) {
        if (w < rational(0) || w > rational(1)) {
          std::size_t at = prior_overrides.count(p) ? prior_overrides[p].second
                                                    : lambda_lines.back();
          fail(at, 1, "prior weight " + exact_string(w) + " outside [0, 1]");
        }
        sum += w;
      }
      if (sum != rational(1)) {
        std::size_t at =
            prior_overrides.count(p) ? prior_overrides[p].second : lambda_lines.back();
        fail(at, 1,
             "prior over profile (" + m.profile_label(p) + ") sums to " + exact_string(sum) +
                 ", expected 1");
      }
    }

    if (kernel_rows.empty()) {
      kernel_rows.resize(m.hidden_count());
      for (std::size_t li = 0; li < m.hidden_count(); ++li) {
        kernel_rows[li].resize(m.profile_count());
        for (std::size_t pi = 0; pi < m.profile_count(); ++pi)
          kernel_rows[li][pi].assign(m.tuple_count(pi), rational(0));
      }
    }
    for (std::size_t l = 0; l < m.hidden_count(); ++l) {
      for (std::size_t p = 0; p < m.profile_count(); ++p) {
        rational sum(0);
        for (const auto& w : kernel_rows[l][p]) {
          if (w < rational(0) || w > rational(1)) {
            std::size_t at = row_lines.count({l, p}) ? row_lines[{l, p}] : lambda_lines[l];
            fail(at, 1, "kernel weight " + exact_string(w) + " outside [0, 1]");
          }
          sum += w;
        }
        if (sum != rational(1)) {
          std::size_t at = row_lines.count({l, p}) ? row_lines[{l, p}] : lambda_lines[l];
          fail(at, 1,
               "kernel row (" + m.hidden[l] + ", " + m.profile_label(p) + ") sums to " +
                   exact_string(sum) + ", expected 1");
        }
      }
    }
    m.kernel = std::move(kernel_rows);

    if (!parts_by_lambda.empty()) {
      if (parts_by_lambda.size() != m.hidden_count())
        fail(1, 1, "parts declared for some lambdas but not all");
      m.lambda_parts.emplace(m.hidden_count());
      for (auto& [l, comps] : parts_by_lambda) (*m.lambda_parts)[l] = std::move(comps);
    }
  } catch (const detail::parse_failure& f) {
    return parse_result{std::nullopt, f.diag};
  }

  parse_result out;
  out.parsed = std::move(m);
  return out;
}

namespace detail {

inline void require_clean_name(const std::string& s) {
  if (s.empty()) throw precondition_error("cannot serialize an empty name");
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == ':' || c == '=' || c == '|' ||
        c == '#')
      throw precondition_error("cannot serialize name '" + s + "': reserved character");
}

}  // namespace detail

inline std::string serialize_model(const model& m) {
  detail::require_clean_name(m.name);
  for (const auto& s : m.sites) {
    detail::require_clean_name(s.name);
    for (const auto& x : s.settings) detail::require_clean_name(x);
    for (const auto& alpha : s.alphabets)
      for (const auto& o : alpha) detail::require_clean_name(o);
  }
  for (const auto& h : m.hidden) detail::require_clean_name(h);
  if (m.lambda_parts)
    for (const auto& comps : *m.lambda_parts)
      for (const auto& c : comps) detail::require_clean_name(c);

  std::string out = "model " + m.name + "\n\n";
  for (const auto& s : m.sites) {
    out += "site " + s.name + " :";
    for (const auto& x : s.settings) out += " " + x;
    out += "\n";
  }
  for (const auto& s : m.sites) {
    for (std::size_t i = 0; i < s.settings.size(); ++i) {
      out += "outcomes " + s.name + " " + s.settings[i] + " :";
      for (const auto& o : s.alphabets[i]) out += " " + o;
      out += "\n";
    }
  }
  out += "\n";
  for (std::size_t l = 0; l < m.hidden_count(); ++l)
    out += "lambda " + m.hidden[l] + " = " + exact_string(m.prior[0][l]) + "\n";
  for (std::size_t p = 1; p < m.profile_count(); ++p) {
    if (m.prior[p] == m.prior[0]) continue;
    out += "prior " + m.profile_label(p) + " :";
    for (const auto& w : m.prior[p]) out += " " + exact_string(w);
    out += "\n";
  }
  out += "\n";
  for (std::size_t l = 0; l < m.hidden_count(); ++l) {
    for (std::size_t p = 0; p < m.profile_count(); ++p) {
      for (std::size_t t = 0; t < m.tuple_count(p); ++t) {
        const rational& w = m.kernel[l][p][t];
        if (w == rational(0)) continue;
        out += "p " + m.hidden[l] + " | " + m.profile_label(p) + " : " +
               m.tuple_label(p, t) + " = " + exact_string(w) + "\n";
      }
    }
  }
  if (m.lambda_parts) {
    out += "\n";
    for (std::size_t l = 0; l < m.hidden_count(); ++l) {
      out += "parts " + m.hidden[l] + " :";
      for (const auto& c : (*m.lambda_parts)[l]) out += " " + c;
      out += "\n";
    }
  }
  return out;
}

}  // namespace lhv
