#pragma once

#include <string>
#include <vector>

#include "osc/error.hpp"
#include "osc/rational.hpp"

namespace osc {

struct ValidationReport {
  bool ok = true;
  std::string message;  // first violated identity, with indices
};

/// Graded nilpotent Lie algebra given by exact rational structure constants
/// [e_i, e_j] = sum_k c[i][j][k] e_k, with grading weights d_1..d_n.
class GradedLieAlgebra {
 public:
  GradedLieAlgebra(std::vector<int> weights, std::string name = "");

  int dim() const { return dim_; }
  int step() const { return step_; }
  int homogeneous_dimension() const { return d_H_; }
  const std::vector<int>& weights() const { return weights_; }
  const std::string& name() const { return name_; }

  const Rational& c(int i, int j, int k) const {
    return constants_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k];
  }
  void set_bracket(int i, int j, int k, const Rational& value);

  /// [x, y] via structure constants, exact.
  RationalVec bracket(const RationalVec& x, const RationalVec& y) const;

  ValidationReport validate() const;

 private:
  int dim_;
  std::vector<int> weights_;
  int step_;
  int d_H_;
  std::string name_;
  std::vector<Rational> constants_;  // dim^3, row-major (i,j,k)
};

/// delta_lambda: component j scales by lambda^{d_j}.  Exact rational form.
RationalVec dilate(const GradedLieAlgebra& alg, const Rational& lambda,
                   const RationalVec& xi);
std::vector<double> dilate(const GradedLieAlgebra& alg, double lambda,
                           const std::vector<double>& xi);

/// log(exp xi . exp zeta) by the Dynkin series, truncated at the algebra
/// step; exact because all higher brackets vanish.
RationalVec bch_multiply(const GradedLieAlgebra& alg, const RationalVec& xi,
                         const RationalVec& zeta);

/// Canonical homogeneous norm (sum_j |xi_j|^{2L/d_j})^{1/2L}, L = lcm(d_j).
double homogeneous_norm(const GradedLieAlgebra& alg,
                        const std::vector<double>& xi);

RationalVec to_rational_vec(const std::vector<double>& v);
std::vector<double> to_double_vec(const RationalVec& v);

// Shipped catalog.
GradedLieAlgebra abelian_algebra(int n);
GradedLieAlgebra heisenberg_algebra();  // weights (1,1,2), [X,Y] = Z
GradedLieAlgebra engel_algebra();       // weights (1,1,2,3)

}  // namespace osc
