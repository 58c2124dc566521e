#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "osc/error.hpp"
#include "osc/rational.hpp"

namespace osc {

/// Complex rational coefficient.
struct CRat {
  Rational re{0}, im{0};
  bool is_zero() const { return re == 0 && im == 0; }
};

CRat operator+(const CRat& a, const CRat& b);
CRat operator-(const CRat& a, const CRat& b);
CRat operator*(const CRat& a, const CRat& b);

/// Monomial x^pow * exp(i freq . x).  Real trig polynomials live in this
/// basis via cos x = (E + E^-1)/2, which makes the zero test exact.
struct Mono {
  std::vector<int> pow;
  std::vector<int> freq;
  bool operator<(const Mono& o) const {
    if (pow != o.pow) return pow < o.pow;
    return freq < o.freq;
  }
  bool operator==(const Mono& o) const = default;
};

/// Exact polynomial / trig-polynomial expression in n variables.
class Expr {
 public:
  Expr() : nvars_(0) {}
  explicit Expr(int nvars) : nvars_(nvars) {}

  static Expr constant(int nvars, const Rational& c);
  static Expr variable(int nvars, int k);
  static Expr sin_var(int nvars, int k);
  static Expr cos_var(int nvars, int k);

  /// Parse "1/2*x0^2 - sin(x1)*x2 + 3".  Aliases x,y,z,w map to x0..x3.
  static Expr parse(const std::string& text, int nvars);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// True if no trig factors appear (pure polynomial).
  bool is_polynomial() const;

  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator*(const Expr& o) const;
  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  bool operator==(const Expr& o) const;

  Expr scaled(const Rational& c) const;
  /// d/dx_k, exact.
  Expr derivative(int k) const;

  double eval(const std::vector<double>& x) const;
  /// Exact evaluation; requires a pure polynomial expression.
  Rational eval_rational(const RationalVec& x) const;
  /// Constant term as a rational; requires is_constant().
  Rational constant_value() const;

  std::string to_string() const;

  const std::map<Mono, CRat>& terms() const { return terms_; }
  void add_term(const Mono& m, const CRat& c);

 private:
  int nvars_;
  std::map<Mono, CRat> terms_;
};

}  // namespace osc
