#include "osc/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace osc {

CRat operator+(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
CRat operator-(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }
CRat operator*(const CRat& a, const CRat& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

void Expr::add_term(const Mono& m, const CRat& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Expr Expr::constant(int nvars, const Rational& c) {
  Expr e(nvars);
  Mono m{std::vector<int>(nvars, 0), std::vector<int>(nvars, 0)};
  e.add_term(m, CRat{c, 0});
  return e;
}

Expr Expr::variable(int nvars, int k) {
  if (k < 0 || k >= nvars) throw MalformedInput("variable index out of range");
  Expr e(nvars);
  Mono m{std::vector<int>(nvars, 0), std::vector<int>(nvars, 0)};
  m.pow[k] = 1;
  e.add_term(m, CRat{1, 0});
  return e;
}

Expr Expr::sin_var(int nvars, int k) {
  if (k < 0 || k >= nvars) throw MalformedInput("variable index out of range");
  Expr e(nvars);
  Mono m{std::vector<int>(nvars, 0), std::vector<int>(nvars, 0)};
  m.freq[k] = 1;
  e.add_term(m, CRat{0, Rational(-1, 2)});
  m.freq[k] = -1;
  e.add_term(m, CRat{0, Rational(1, 2)});
  return e;
}

Expr Expr::cos_var(int nvars, int k) {
  if (k < 0 || k >= nvars) throw MalformedInput("variable index out of range");
  Expr e(nvars);
  Mono m{std::vector<int>(nvars, 0), std::vector<int>(nvars, 0)};
  m.freq[k] = 1;
  e.add_term(m, CRat{Rational(1, 2), 0});
  m.freq[k] = -1;
  e.add_term(m, CRat{Rational(1, 2), 0});
  return e;
}

bool Expr::is_constant() const {
  for (const auto& [m, c] : terms_) {
    for (int p : m.pow)
      if (p != 0) return false;
    for (int f : m.freq)
      if (f != 0) return false;
  }
  return true;
}

bool Expr::is_polynomial() const {
  for (const auto& [m, c] : terms_)
    for (int f : m.freq)
      if (f != 0) return false;
  return true;
}

Expr Expr::operator+(const Expr& o) const {
  Expr out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

Expr& Expr::operator+=(const Expr& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Expr Expr::operator-(const Expr& o) const { return *this + (-o); }

Expr Expr::operator-() const {
  Expr out(nvars_);
  for (const auto& [m, c] : terms_)
    out.terms_.emplace(m, CRat{-c.re, -c.im});
  return out;
}

Expr Expr::operator*(const Expr& o) const {
  Expr out(nvars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Mono m = ma;
      for (int j = 0; j < nvars_; ++j) {
        m.pow[j] += mb.pow[j];
        m.freq[j] += mb.freq[j];
      }
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

bool Expr::operator==(const Expr& o) const { return (*this - o).is_zero(); }

Expr Expr::scaled(const Rational& c) const {
  Expr out(nvars_);
  if (c == 0) return out;
  for (const auto& [m, co] : terms_)
    out.terms_.emplace(m, CRat{co.re * c, co.im * c});
  return out;
}

Expr Expr::derivative(int k) const {
  Expr out(nvars_);
  for (const auto& [m, c] : terms_) {
    // power rule
    if (m.pow[k] > 0) {
      Mono md = m;
      md.pow[k] -= 1;
      Rational f(m.pow[k]);
      out.add_term(md, CRat{c.re * f, c.im * f});
    }
    // phase factor: d/dx exp(i f x) = i f exp(i f x)
    if (m.freq[k] != 0) {
      Rational f(m.freq[k]);
      out.add_term(m, CRat{-c.im * f, c.re * f});
    }
  }
  return out;
}

double Expr::eval(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != nvars_)
    throw MalformedInput("evaluation point has wrong dimension");
  std::complex<double> acc(0, 0);
  for (const auto& [m, c] : terms_) {
    double mag = 1.0;
    double phase = 0.0;
    for (int j = 0; j < nvars_; ++j) {
      for (int p = 0; p < m.pow[j]; ++p) mag *= x[j];
      phase += m.freq[j] * x[j];
    }
    acc += std::complex<double>(to_double(c.re), to_double(c.im)) * mag *
           std::exp(std::complex<double>(0, phase));
  }
  return acc.real();
}

Rational Expr::eval_rational(const RationalVec& x) const {
  if (static_cast<int>(x.size()) != nvars_)
    throw MalformedInput("evaluation point has wrong dimension");
  if (!is_polynomial())
    throw DomainError("exact evaluation requires a polynomial expression");
  Rational acc(0);
  for (const auto& [m, c] : terms_) {
    Rational mag(1);
    for (int j = 0; j < nvars_; ++j)
      for (int p = 0; p < m.pow[j]; ++p) mag *= x[j];
    acc += c.re * mag;  // polynomial expressions built from reals have im = 0
  }
  return acc;
}

Rational Expr::constant_value() const {
  if (!is_constant()) throw DomainError("expression is not constant");
  Rational acc(0);
  for (const auto& [m, c] : terms_) acc += c.re;
  return acc;
}

std::string Expr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << rational_to_string(c.re);
    if (c.im != 0) os << (c.im > 0 ? "+" : "") << rational_to_string(c.im) << "i";
    os << ")";
    for (int j = 0; j < nvars_; ++j) {
      if (m.pow[j] != 0) os << "*x" << j << "^" << m.pow[j];
      if (m.freq[j] != 0) os << "*E" << j << "^" << m.freq[j];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  int nvars;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw MalformedInput("expression parse error at position " +
                         std::to_string(pos) + ": " + what + " in '" + s + "'");
  }

  Expr parse_expr() {
    Expr acc = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        acc = acc + parse_term();
      else if (eat('-'))
        acc = acc - parse_term();
      else
        return acc;
    }
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    for (;;) {
      skip_ws();
      if (eat('*'))
        acc = acc * parse_factor();
      else
        return acc;
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    skip_ws();
    if (eat('^')) {
      int e = parse_uint();
      Expr acc = Expr::constant(nvars, 1);
      for (int i = 0; i < e; ++i) acc = acc * base;
      return acc;
    }
    return base;
  }

  int parse_uint() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos == start) fail("expected integer");
    return std::stoi(s.substr(start, pos - start));
  }

  int parse_var_index() {
    skip_ws();
    if (pos >= s.size()) fail("expected variable");
    char c = s[pos];
    if (c == 'x' && pos + 1 < s.size() &&
        std::isdigit(static_cast<unsigned char>(s[pos + 1]))) {
      ++pos;
      return parse_uint();
    }
    static const std::string aliases = "xyzw";
    auto a = aliases.find(c);
    if (a != std::string::npos) {
      ++pos;
      return static_cast<int>(a);
    }
    fail("expected variable");
  }

  Expr parse_base() {
    skip_ws();
    if (eat('(')) {
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (eat('-')) return -parse_factor();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/'))
        ++pos;
      return Expr::constant(nvars, parse_rational(s.substr(start, pos - start)));
    }
    if (s.compare(pos, 4, "sin(") == 0) {
      pos += 4;
      int k = parse_var_index();
      if (!eat(')')) fail("expected ')'");
      return Expr::sin_var(nvars, k);
    }
    if (s.compare(pos, 4, "cos(") == 0) {
      pos += 4;
      int k = parse_var_index();
      if (!eat(')')) fail("expected ')'");
      return Expr::cos_var(nvars, k);
    }
    int k = parse_var_index();
    if (k >= nvars) fail("variable index out of range");
    return Expr::variable(nvars, k);
  }
};

}  // namespace

Expr Expr::parse(const std::string& text, int nvars) {
  Parser p{text, 0, nvars};
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

}  // namespace osc
