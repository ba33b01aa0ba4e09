#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mpcc/errors.hpp"
#include "mpcc/problem.hpp"

namespace mpcc {

namespace {

class ExprParser {
 public:
  ExprParser(const std::string& text, std::size_t line, std::size_t column_offset, std::size_t n)
      : text_(text), line_(line), offset_(column_offset), n_(n) {}

  Expression parse_full() {
    Expression e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t p) { pos_ = p; }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ < text_.size())
        fail(std::string("expected '") + c + "' but found '" + text_[pos_] + "'");
      fail(std::string("expected '") + c + "' at end of line");
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, offset_ + pos_ + 1); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

 private:
  Expression term() {
    Expression e = unary();
    for (;;) {
      skip_space();
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        e = e / unary();
      } else {
        return e;
      }
    }
  }

  Expression unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (accept('^')) {
      skip_space();
      bool negative = accept('-');
      skip_space();
      std::size_t begin = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (begin == pos_) fail("exponent must be an integer literal");
      if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
        fail("exponent must be an integer literal");
      long value = std::strtol(text_.substr(begin, pos_ - begin).c_str(), nullptr, 10);
      if (value > 1000) fail("exponent too large");
      return pow(base, static_cast<int>(negative ? -value : value));
    }
    return base;
  }

  Expression primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expression number() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string token = text_.substr(begin, pos_ - begin);
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      pos_ = begin;
      fail("malformed number '" + token + "'");
    }
    return Expression::constant(v);
  }

  Expression identifier() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    std::string name = text_.substr(begin, pos_ - begin);
    bool canonical = name.size() >= 2 && name[0] == 'x' && name[1] != '0';
    for (std::size_t i = 1; canonical && i < name.size(); ++i)
      canonical = std::isdigit(static_cast<unsigned char>(name[i])) != 0;
    if (!canonical) {
      pos_ = begin;
      fail("unknown identifier '" + name + "'");
    }
    std::size_t index = std::strtoul(name.c_str() + 1, nullptr, 10);
    if (index > n_) {
      pos_ = begin;
      fail("variable " + name + " out of range (n = " + std::to_string(n_) + ")");
    }
    return Expression::variable(index - 1);
  }

  const std::string& text_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Expression parse_expression(const std::string& text, std::size_t n) {
  ExprParser p(text, 1, 0, n);
  return p.parse_full();
}

MpccProblem parse_problem(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;

  std::string name;
  std::size_t n = 0;
  bool have_vars = false;
  bool have_objective = false;
  Expression objective;
  std::vector<std::pair<Expression, Expression>> pairs;
  std::vector<Expression> ineq;
  std::vector<Expression> eq;
  Vector start;
  bool have_start = false;
  std::map<std::string, std::string> metadata;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (line.rfind("#@", 0) == 0) {
      std::string body = trim(line.substr(2));
      std::size_t sp = body.find_first_of(" \t");
      std::string key = body.substr(0, sp);
      metadata[key] = sp == std::string::npos ? "" : trim(body.substr(sp));
      continue;
    }
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t kb = line.find_first_not_of(" \t\r");
    if (kb == std::string::npos) continue;
    std::size_t ke = line.find_first_of(" \t\r(", kb);
    if (ke == std::string::npos) ke = line.size();
    std::string keyword = line.substr(kb, ke - kb);
    std::string rest = line.substr(ke);
    std::size_t col = ke;

    auto need_vars = [&] {
      if (!have_vars) throw ParseError("'" + keyword + "' before 'vars'", line_no, kb + 1);
    };

    if (keyword == "problem") {
      name = trim(rest);
      if (name.empty()) throw ParseError("missing problem name", line_no, ke + 1);
    } else if (keyword == "vars") {
      if (have_vars) throw ParseError("duplicate 'vars'", line_no, kb + 1);
      std::istringstream vs(rest);
      std::string v;
      std::size_t search = 0;
      while (vs >> v) {
        std::size_t at = rest.find(v, search);
        search = at + v.size();
        if (v != "x" + std::to_string(n + 1))
          throw ParseError("expected variable x" + std::to_string(n + 1) + " but found '" + v + "'", line_no,
                           col + at + 1);
        ++n;
      }
      if (n == 0) throw ParseError("'vars' needs at least one variable", line_no, ke + 1);
      have_vars = true;
    } else if (keyword == "objective") {
      need_vars();
      if (have_objective) throw ParseError("duplicate 'objective'", line_no, kb + 1);
      objective = ExprParser(rest, line_no, col, n).parse_full();
      have_objective = true;
    } else if (keyword == "pair") {
      need_vars();
      ExprParser p(rest, line_no, col, n);
      p.expect('(');
      Expression a = p.expr();
      p.expect(',');
      Expression b = p.expr();
      p.expect(')');
      p.skip_space();
      if (p.pos() != rest.size()) p.fail("trailing input after pair");
      pairs.emplace_back(a, b);
    } else if (keyword == "ineq") {
      need_vars();
      ineq.push_back(ExprParser(rest, line_no, col, n).parse_full());
    } else if (keyword == "eq") {
      need_vars();
      eq.push_back(ExprParser(rest, line_no, col, n).parse_full());
    } else if (keyword == "start") {
      need_vars();
      if (have_start) throw ParseError("duplicate 'start'", line_no, kb + 1);
      std::vector<double> values;
      std::size_t p = 0;
      while (p < rest.size()) {
        while (p < rest.size() && std::isspace(static_cast<unsigned char>(rest[p]))) ++p;
        if (p >= rest.size()) break;
        std::size_t e = p;
        while (e < rest.size() && !std::isspace(static_cast<unsigned char>(rest[e]))) ++e;
        std::string tok = rest.substr(p, e - p);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size() || !std::isfinite(v))
          throw ParseError("malformed number '" + tok + "'", line_no, col + p + 1);
        values.push_back(v);
        p = e;
      }
      if (values.size() != n)
        throw ParseError("start has " + std::to_string(values.size()) + " entries but n = " + std::to_string(n),
                         line_no, kb + 1);
      start = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
      have_start = true;
    } else {
      throw ParseError("unknown keyword '" + keyword + "'", line_no, kb + 1);
    }
  }

  if (!have_vars) throw ParseError("missing 'vars'", line_no + 1, 1);
  if (!have_objective) throw ParseError("missing 'objective'", line_no + 1, 1);
  if (pairs.empty()) throw ParseError("at least one 'pair' is required", line_no + 1, 1);

  MpccProblem problem = make_problem(name, n, objective, pairs, ineq, eq, have_start ? start : Vector());
  problem.metadata = std::move(metadata);
  return problem;
}

MpccProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  MpccProblem p = parse_problem(buffer.str());
  if (p.name.empty()) {
    std::string base = path.substr(path.find_last_of('/') + 1);
    p.name = base.substr(0, base.rfind('.'));
  }
  return p;
}

std::string print_problem(const MpccProblem& problem) {
  std::ostringstream out;
  for (const auto& [key, value] : problem.metadata) out << "#@ " << key << (value.empty() ? "" : " ") << value << '\n';
  if (!problem.name.empty()) out << "problem " << problem.name << '\n';
  out << "vars";
  for (std::size_t i = 0; i < problem.n; ++i) out << " x" << i + 1;
  out << '\n';
  out << "objective " << problem.objective.expression().to_string() << '\n';
  for (const auto& p : problem.pairs)
    out << "pair (" << p.first.expression().to_string() << ", " << p.second.expression().to_string() << ")\n";
  for (const auto& g : problem.side_ineq) out << "ineq " << g.expression().to_string() << '\n';
  for (const auto& h : problem.side_eq) out << "eq " << h.expression().to_string() << '\n';
  out << "start";
  char buf[64];
  for (Eigen::Index i = 0; i < problem.start.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %.17g", problem.start[i]);
    out << buf;
  }
  out << '\n';
  return out.str();
}

}  // namespace mpcc
