#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "osc/filtered_patch.hpp"

namespace osc {

/// Exponent vector over the frame generators; the PBW word is
/// X_1^{a_1} ... X_n^{a_n} in frame index order (lower degree first).
using MultiIndex = std::vector<int>;

int h_weight(const MultiIndex& a, const std::vector<int>& orders);

using PatchRef = std::shared_ptr<const FilteredPatch>;

/// Differential operator sum_a c_a(x) X^a in PBW normal form.
class FilteredDiffOp {
 public:
  explicit FilteredDiffOp(PatchRef patch) : patch_(std::move(patch)) {}

  static FilteredDiffOp identity(PatchRef patch);
  static FilteredDiffOp generator(PatchRef patch, int k);

  const PatchRef& patch() const { return patch_; }
  const std::map<MultiIndex, Expr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MultiIndex& a, const Expr& coeff);

  /// Homogeneous order m = max_a |a|_H over the terms.
  int h_order() const;

  /// Action on a scalar expression, letters applied right to left.  This is
  /// independent of the PBW rewriting engine and serves as its oracle.
  Expr apply(const Expr& f) const;

  FilteredDiffOp operator+(const FilteredDiffOp& o) const;
  FilteredDiffOp operator-(const FilteredDiffOp& o) const;

  std::string to_string() const;

 private:
  PatchRef patch_;
  std::map<MultiIndex, Expr> terms_;
};

/// PBW-normalized product A o B; h_order(AB) <= h_order(A) + h_order(B).
FilteredDiffOp compose(const FilteredDiffOp& A, const FilteredDiffOp& B);

/// Weight-m element of the graded enveloping algebra of the osculating
/// groups: sum over |a|_H = m of c_a(x) Xbar^a.
class Cosymbol {
 public:
  Cosymbol(PatchRef patch, int weight)
      : patch_(std::move(patch)), weight_(weight) {}

  const PatchRef& patch() const { return patch_; }
  int weight() const { return weight_; }
  const std::map<MultiIndex, Expr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MultiIndex& a, const Expr& coeff);

  bool operator==(const Cosymbol& o) const;
  std::string to_string() const;

 private:
  PatchRef patch_;
  int weight_;
  std::map<MultiIndex, Expr> terms_;
};

/// Strict top-order part of A, letters replaced by osculating generators.
Cosymbol principal_cosymbol(const FilteredDiffOp& A);

/// Graded enveloping product; weights add.
Cosymbol cosymbol_compose(const Cosymbol& u, const Cosymbol& v);

/// The extended kernel family sum_a t^{m-|a|_H} c_a(x) delta^(a)(-xi),
/// stored term by term.
struct SymbolicKernelFamily {
  PatchRef patch;
  int weight = 0;  // the m used to generate the t-powers
  struct Term {
    Expr coeff;
    MultiIndex index;
    int t_power;
  };
  std::vector<Term> terms;
  bool has_smooth_term = false;  // an added t-independent smooth remainder

  std::string to_string() const;
};

SymbolicKernelFamily kernel_family(const FilteredDiffOp& A);

/// True iff every term satisfies t_power + |a|_H = m with t_power >= 0 and
/// no smooth remainder is present; characterizes differential operators of
/// H-order <= m.
bool is_homogeneous_on_nose(const SymbolicKernelFamily& F, int m);

/// Restriction of the family at a given t, as the differential operator
/// with coefficients t^{t_power} c_a(x).
FilteredDiffOp restrict_family(const SymbolicKernelFamily& F, const Rational& t);

}  // namespace osc
