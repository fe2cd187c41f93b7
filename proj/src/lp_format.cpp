#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "fpr/error.hpp"
#include "fpr/io.hpp"
#include "fpr/lp.hpp"

namespace fpr::lp {

namespace {

constexpr int kTermsPerLine = 6;

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::string clean_name(const std::string& name) {
  std::string out;
  for (char c : name) out += name_char(c) ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') {
    out = "v" + out;
  }
  return out;
}

std::string num(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return io::format_number(v);
}

void write_terms(std::ostringstream& out, const std::vector<std::pair<int, double>>& terms,
                 const std::vector<std::string>& names) {
  int k = 0;
  for (auto [j, a] : terms) {
    if (k > 0 && k % kTermsPerLine == 0) out << "\n   ";
    out << (a < 0 ? " - " : " + ") << num(std::abs(a)) << ' ' << names[static_cast<std::size_t>(j)];
    ++k;
  }
}

}  // namespace

std::string to_lp_text(const Problem& p) {
  std::vector<std::string> names;
  for (const auto& n : p.names) names.push_back(clean_name(n));
  std::ostringstream out;
  out << "\\ fpr linear program\n";
  if (p.objective_constant != 0.0) out << "\\ constant " << num(p.objective_constant) << '\n';
  out << "Minimize\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (std::size_t j = 0; j < p.cost.size(); ++j) obj.push_back({static_cast<int>(j), p.cost[j]});
  write_terms(out, obj, names);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const Row& r = p.rows[i];
    out << ' ' << (r.name.empty() ? "c" + std::to_string(i) : clean_name(r.name)) << ':';
    if (r.coefs.empty()) {
      out << " + 0 " << names.front();
    } else {
      write_terms(out, r.coefs, names);
    }
    out << (r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ") << num(r.rhs)
        << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < names.size(); ++j) {
    const double lo = p.lower[j];
    const double hi = p.upper[j];
    if (lo == -kInf && hi == kInf) {
      out << ' ' << names[j] << " free\n";
    } else if (lo == hi) {
      out << ' ' << names[j] << " = " << num(lo) << '\n';
    } else if (hi == kInf) {
      out << ' ' << names[j] << " >= " << num(lo) << '\n';
    } else {
      out << ' ' << num(lo) << " <= " << names[j] << " <= " << num(hi) << '\n';
    }
  }
  out << "End\n";
  return out.str();
}

namespace {

struct Token {
  enum Kind { number, name, op, colon } kind;
  std::string text;
  double value = 0.0;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ':') {
      out.push_back({Token::colon, ":"});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::string t(1, c);
      ++i;
      if (i < s.size() && (s[i] == '=' || s[i] == '<' || s[i] == '>')) t += s[i++];
      if (t == "=<") t = "<=";
      if (t == "=>") t = ">=";
      if (t == "<") t = "<=";
      if (t == ">") t = ">=";
      out.push_back({Token::op, t});
    } else if (c == '+' || c == '-') {
      out.push_back({Token::op, std::string(1, c)});
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t used = 0;
      const double v = std::stod(s.substr(i), &used);
      out.push_back({Token::number, s.substr(i, used), v});
      i += used;
    } else if (name_char(c)) {
      std::size_t j = i;
      while (j < s.size() && name_char(s[j])) ++j;
      std::string w = s.substr(i, j - i);
      std::string lower = w;
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      if (lower == "inf" || lower == "infinity") {
        out.push_back({Token::number, w, kInf});
      } else {
        out.push_back({Token::name, w});
      }
      i = j;
    } else {
      fail(ErrorKind::schema, std::string("LP text: unexpected character '") + c + "'");
    }
  }
  return out;
}

class Parser {
 public:
  explicit Parser(Problem& p) : p_(p) {}

  int var(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const int j = p_.add_variable(name, 0.0);
    index_[name] = j;
    return j;
  }

  /// Linear expression starting at toks[i]; stops at a relational operator,
  /// a following label, or the end.
  std::vector<std::pair<int, double>> terms(const std::vector<Token>& t, std::size_t& i) {
    std::vector<std::pair<int, double>> out;
    while (i < t.size()) {
      if (t[i].kind == Token::op && t[i].text != "+" && t[i].text != "-") break;
      if (t[i].kind == Token::name && i + 1 < t.size() && t[i + 1].kind == Token::colon) break;
      double sign = 1.0;
      while (i < t.size() && t[i].kind == Token::op && (t[i].text == "+" || t[i].text == "-")) {
        if (t[i].text == "-") sign = -sign;
        ++i;
      }
      double coef = 1.0;
      if (i < t.size() && t[i].kind == Token::number) coef = t[i++].value;
      if (i >= t.size() || t[i].kind != Token::name) fail(ErrorKind::schema, "LP text: expected a variable");
      out.push_back({var(t[i++].text), sign * coef});
    }
    return out;
  }

  double signed_number(const std::vector<Token>& t, std::size_t& i) {
    double sign = 1.0;
    while (i < t.size() && t[i].kind == Token::op && (t[i].text == "+" || t[i].text == "-")) {
      if (t[i].text == "-") sign = -sign;
      ++i;
    }
    if (i >= t.size() || t[i].kind != Token::number) fail(ErrorKind::schema, "LP text: expected a number");
    return sign * t[i++].value;
  }

  std::map<std::string, int> index_;
  Problem& p_;
};

std::string lower_trim(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto b = out.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = out.find_last_not_of(" \t\r");
  return out.substr(b, e - b + 1);
}

}  // namespace

Problem from_lp_text(const std::string& text) {
  Problem p;
  Parser parser(p);
  enum class Section { none, objective, constraints, bounds, done } section = Section::none;
  bool maximize = false;
  std::string obj_text, con_text;
  std::vector<std::string> bound_lines;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto bs = line.find('\\');
    if (bs != std::string::npos) {
      const std::string comment = line.substr(bs + 1);
      std::istringstream cs(comment);
      std::string word;
      double v = 0.0;
      if (cs >> word && word == "constant" && cs >> v) p.objective_constant = v;
      line = line.substr(0, bs);
    }
    const std::string key = lower_trim(line);
    if (key.empty()) continue;
    if (key == "minimize" || key == "minimum" || key == "min") {
      section = Section::objective;
    } else if (key == "maximize" || key == "maximum" || key == "max") {
      section = Section::objective;
      maximize = true;
    } else if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.") {
      section = Section::constraints;
    } else if (key == "bounds" || key == "bound") {
      section = Section::bounds;
    } else if (key == "end") {
      section = Section::done;
    } else if (key == "general" || key == "generals" || key == "binary" || key == "binaries") {
      fail(ErrorKind::schema, "LP text: integer sections are not supported");
    } else {
      switch (section) {
        case Section::objective: obj_text += line + "\n"; break;
        case Section::constraints: con_text += line + "\n"; break;
        case Section::bounds: bound_lines.push_back(line); break;
        default: fail(ErrorKind::schema, "LP text: content outside a section: " + line);
      }
    }
  }

  {
    const auto t = tokenize(obj_text);
    std::size_t i = 0;
    if (t.size() >= 2 && t[0].kind == Token::name && t[1].kind == Token::colon) i = 2;
    for (auto [j, a] : parser.terms(t, i)) p.cost[static_cast<std::size_t>(j)] += maximize ? -a : a;
    if (i != t.size()) fail(ErrorKind::schema, "LP text: malformed objective");
  }
  {
    const auto t = tokenize(con_text);
    std::size_t i = 0;
    while (i < t.size()) {
      std::string name = "c" + std::to_string(p.rows.size());
      if (t[i].kind == Token::name && i + 1 < t.size() && t[i + 1].kind == Token::colon) {
        name = t[i].text;
        i += 2;
      }
      auto coefs = parser.terms(t, i);
      if (i >= t.size() || t[i].kind != Token::op) fail(ErrorKind::schema, "LP text: row " + name + " lacks a relation");
      const std::string rel = t[i++].text;
      const double rhs = parser.signed_number(t, i);
      const Sense sense = rel == "<=" ? Sense::le : rel == ">=" ? Sense::ge : Sense::eq;
      // Merge duplicate columns so rows stay canonical.
      std::vector<std::pair<int, double>> merged;
      for (auto [j, a] : coefs) {
        auto it = std::find_if(merged.begin(), merged.end(), [j = j](const auto& e) { return e.first == j; });
        if (it == merged.end()) {
          merged.push_back({j, a});
        } else {
          it->second += a;
        }
      }
      p.add_row(name, "", std::move(merged), sense, rhs);
    }
  }
  for (const auto& bl : bound_lines) {
    const auto t = tokenize(bl);
    std::size_t i = 0;
    auto is_name = [&](std::size_t k) { return k < t.size() && t[k].kind == Token::name; };
    if (t.size() == 2 && is_name(0) && lower_trim(t[1].text) == "free") {
      const auto j = static_cast<std::size_t>(parser.var(t[0].text));
      p.lower[j] = -kInf;
      p.upper[j] = kInf;
      continue;
    }
    if (is_name(0)) {
      const auto j = static_cast<std::size_t>(parser.var(t[0].text));
      i = 1;
      if (i >= t.size() || t[i].kind != Token::op) fail(ErrorKind::schema, "LP text: bad bound: " + bl);
      const std::string rel = t[i++].text;
      const double v = parser.signed_number(t, i);
      if (rel == ">=") p.lower[j] = v;
      if (rel == "<=") p.upper[j] = v;
      if (rel == "=") p.lower[j] = p.upper[j] = v;
    } else {
      const double lo = parser.signed_number(t, i);
      if (i >= t.size() || t[i].text != "<=") fail(ErrorKind::schema, "LP text: bad bound: " + bl);
      ++i;
      if (!is_name(i)) fail(ErrorKind::schema, "LP text: bad bound: " + bl);
      const auto j = static_cast<std::size_t>(parser.var(t[i++].text));
      p.lower[j] = lo;
      if (i < t.size()) {
        if (t[i].text != "<=") fail(ErrorKind::schema, "LP text: bad bound: " + bl);
        ++i;
        p.upper[j] = parser.signed_number(t, i);
      }
    }
    if (i != t.size()) fail(ErrorKind::schema, "LP text: bad bound: " + bl);
  }
  return p;
}

}  // namespace fpr::lp
