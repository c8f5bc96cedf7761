#include "npc/instance_io.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <vector>

namespace npc {

namespace {

struct Entry {
  std::size_t line;
  std::vector<std::string> values;
};

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Parse, at_line(line) + msg);
}

// Splits into (line number, tokens) with comments and blank lines dropped.
std::vector<std::pair<std::size_t, std::vector<std::string>>> tokenize(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (!tokens.empty()) out.emplace_back(number, std::move(tokens));
  }
  return out;
}

Integer parse_integer(const std::string& token, std::size_t line) {
  static const std::regex pattern("[+-]?[0-9]+");
  if (!std::regex_match(token, pattern)) parse_error(line, "malformed integer '" + token + "'");
  return Integer(token[0] == '+' ? token.substr(1) : token);
}

}  // namespace

Rational parse_rational(std::string_view token) {
  static const std::regex pattern("([+-]?[0-9]+)(?:/([0-9]+))?");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(token.begin(), token.end(), m, pattern)) {
    throw Error(ErrorCode::Parse, "malformed rational '" + std::string(token) + "'");
  }
  std::string num = m[1].str();
  if (num[0] == '+') num.erase(0, 1);
  const Integer den = m[2].matched ? Integer(m[2].str()) : Integer(1);
  if (den == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + std::string(token) + "'");
  return Rational(Integer(num), den);
}

InstanceFile parse_instance(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw Error(ErrorCode::Parse, "empty instance");
  const auto& [first_line, header] = lines.front();
  if (header != std::vector<std::string>{"npc-instance", "v1"}) {
    parse_error(first_line, "expected header 'npc-instance v1'");
  }

  static const std::regex key_pattern("n|c|[bf](0|[1-9][0-9]*)");
  std::map<std::string, Entry> entries;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [line, tokens] = lines[k];
    const std::string& key = tokens[0];
    if (!std::regex_match(key, key_pattern)) parse_error(line, "unknown key '" + key + "'");
    if (auto it = entries.find(key); it != entries.end()) {
      parse_error(line, "duplicate key '" + key + "' (first on line " +
                            std::to_string(it->second.line) + ")");
    }
    entries.emplace(key, Entry{line, {tokens.begin() + 1, tokens.end()}});
  }

  auto arity = [](const std::string& key, const Entry& e, std::size_t count) {
    if (e.values.size() != count) {
      parse_error(e.line, "key '" + key + "' takes " + std::to_string(count) + " value" +
                              (count == 1 ? "" : "s"));
    }
  };

  auto n_it = entries.find("n");
  if (n_it == entries.end()) throw Error(ErrorCode::Parse, "missing key 'n'");
  arity("n", n_it->second, 1);
  const Integer n_value = parse_integer(n_it->second.values[0], n_it->second.line);
  if (n_value < 0 || n_value > 100000) parse_error(n_it->second.line, "n out of range");
  const auto n = static_cast<std::size_t>(n_value);
  const std::string last_b = "b" + std::to_string(n + 1);

  std::map<std::string, bool> expected{{"n", true}, {"c", true}, {"b0", true}, {last_b, true}};
  for (std::size_t i = 0; i <= n + 1; ++i) expected["f" + std::to_string(i)] = true;
  for (const auto& [key, e] : entries) {
    if (!expected.count(key)) parse_error(e.line, "unknown key '" + key + "' for n=" + std::to_string(n));
  }

  std::map<std::string, std::size_t> line_of;
  auto vector_of = [&](const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) throw Error(ErrorCode::Parse, "missing key '" + key + "'");
    arity(key, it->second, 2);
    RawVector v{parse_integer(it->second.values[0], it->second.line),
                parse_integer(it->second.values[1], it->second.line)};
    if (v.p == 0 && v.q == 0) {
      throw Error(ErrorCode::ZeroVector, at_line(it->second.line) + key + " is the zero vector");
    }
    line_of[key] = it->second.line;
    return v;
  };

  RawGluingData raw;
  raw.b_first = vector_of("b0");
  for (std::size_t i = 0; i <= n + 1; ++i) raw.f.push_back(vector_of("f" + std::to_string(i)));
  raw.b_last = vector_of(last_b);

  std::optional<Rational> c;
  if (auto it = entries.find("c"); it != entries.end()) {
    arity("c", it->second, 1);
    try {
      c = parse_rational(it->second.values[0]);
    } catch (const Error& e) {
      parse_error(it->second.line, e.what());
    }
  }

  try {
    return InstanceFile{validate_instance(raw), c};
  } catch (const Error& e) {
    // Attach the lines of the offending keys.
    auto lines_for = [&](const std::string& a, const std::string& b) {
      return "lines " + std::to_string(line_of[a]) + "," + std::to_string(line_of[b]) + ": ";
    };
    const std::string f_last = "f" + std::to_string(n + 1);
    std::string where;
    switch (e.code()) {
      case ErrorCode::SectionEqualsFiber:
      case ErrorCode::NotUnimodular: {
        const Integer d = det(raw.b_first.p, raw.b_first.q, raw.f[0].p, raw.f[0].q);
        where = (abs(d) != 1) ? lines_for("b0", "f0") : lines_for(f_last, last_b);
        break;
      }
      case ErrorCode::AdjacentFibersEqual:
        for (std::size_t i = 0; i + 1 < raw.f.size(); ++i) {
          if (det(raw.f[i].p, raw.f[i].q, raw.f[i + 1].p, raw.f[i + 1].q) == 0) {
            where = lines_for("f" + std::to_string(i), "f" + std::to_string(i + 1));
            break;
          }
        }
        break;
      default: break;
    }
    throw Error(e.code(), where + e.what());
  }
}

std::string serialize_instance(const GluingData& data, const std::optional<Rational>& c) {
  std::ostringstream os;
  auto put = [&os](const std::string& key, const LatticeVector& v) {
    os << key << ' ' << to_string(v.p()) << ' ' << to_string(v.q()) << '\n';
  };
  os << "npc-instance v1\n";
  os << "n " << data.n() << '\n';
  put("b0", data.b_first());
  for (std::size_t i = 0; i < data.f().size(); ++i) put("f" + std::to_string(i), data.f(i));
  put("b" + std::to_string(data.n() + 1), data.b_last());
  if (c) os << "c " << to_string(*c) << '\n';
  return os.str();
}

WitnessConfiguration parse_witness(std::string_view text) {
  static const std::regex key_pattern("sigma(0|[1-9][0-9]*)");
  WitnessConfiguration w;
  for (const auto& [line, tokens] : tokenize(text)) {
    std::smatch m;
    if (!std::regex_match(tokens[0], m, key_pattern)) {
      parse_error(line, "expected 'sigma<i>', got '" + tokens[0] + "'");
    }
    if (m[1].str() != std::to_string(w.forms.size())) {
      parse_error(line, "expected sigma" + std::to_string(w.forms.size()) + ", got " + tokens[0]);
    }
    if (tokens.size() != 4) parse_error(line, tokens[0] + " takes 3 rationals");
    std::array<Rational, 3> a;
    for (std::size_t k = 0; k < 3; ++k) {
      try {
        a[k] = parse_rational(tokens[k + 1]);
      } catch (const Error& e) {
        parse_error(line, e.what());
      }
    }
    w.forms.push_back(QuadraticForm{a[0], a[1], a[2]});
  }
  if (w.forms.empty()) throw Error(ErrorCode::Parse, "witness has no forms");
  return w;
}

std::string serialize_witness(const WitnessConfiguration& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.forms.size(); ++i) {
    const QuadraticForm& f = w.forms[i];
    os << "sigma" << i << ' ' << to_string(f.a11) << ' ' << to_string(f.a12) << ' '
       << to_string(f.a22) << '\n';
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace npc
