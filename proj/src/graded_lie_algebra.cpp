#include "osc/graded_lie_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace osc {

GradedLieAlgebra::GradedLieAlgebra(std::vector<int> weights, std::string name)
    : dim_(static_cast<int>(weights.size())),
      weights_(std::move(weights)),
      name_(std::move(name)) {
  if (dim_ <= 0) throw MalformedInput("algebra dimension must be positive");
  for (int d : weights_)
    if (d <= 0) throw MalformedInput("grading weights must be positive");
  step_ = *std::max_element(weights_.begin(), weights_.end());
  d_H_ = std::accumulate(weights_.begin(), weights_.end(), 0);
  constants_.assign(static_cast<size_t>(dim_) * dim_ * dim_, Rational(0));
}

void GradedLieAlgebra::set_bracket(int i, int j, int k, const Rational& value) {
  if (i < 0 || i >= dim_ || j < 0 || j >= dim_ || k < 0 || k >= dim_)
    throw MalformedInput("bracket index out of range");
  constants_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k] = value;
  constants_[(static_cast<size_t>(j) * dim_ + i) * dim_ + k] = -value;
}

RationalVec GradedLieAlgebra::bracket(const RationalVec& x,
                                      const RationalVec& y) const {
  if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_)
    throw MalformedInput("coordinate length does not match algebra dimension");
  RationalVec out(dim_, Rational(0));
  for (int i = 0; i < dim_; ++i) {
    if (x[i] == 0) continue;
    for (int j = 0; j < dim_; ++j) {
      if (y[j] == 0) continue;
      for (int k = 0; k < dim_; ++k) {
        const Rational& cijk = c(i, j, k);
        if (cijk != 0) out[k] += x[i] * y[j] * cijk;
      }
    }
  }
  return out;
}

ValidationReport GradedLieAlgebra::validate() const {
  std::ostringstream msg;
  // antisymmetry
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        if (c(i, j, k) != -c(j, i, k)) {
          msg << "antisymmetry violated: c[" << i << "][" << j << "][" << k
              << "] != -c[" << j << "][" << i << "][" << k << "]";
          return {false, msg.str()};
        }
  // grading compatibility (also forces nilpotency: d_i + d_j > step kills all)
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        if (c(i, j, k) != 0 && weights_[k] != weights_[i] + weights_[j]) {
          msg << "grading violated: c[" << i << "][" << j << "][" << k
              << "] nonzero but d_" << k << " = " << weights_[k]
              << " != " << weights_[i] << " + " << weights_[j];
          return {false, msg.str()};
        }
  // Jacobi, exact
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int l = j + 1; l < dim_; ++l) {
        RationalVec ei(dim_, Rational(0)), ej(dim_, Rational(0)),
            el(dim_, Rational(0));
        ei[i] = 1;
        ej[j] = 1;
        el[l] = 1;
        RationalVec s = bracket(ei, bracket(ej, el));
        RationalVec s2 = bracket(ej, bracket(el, ei));
        RationalVec s3 = bracket(el, bracket(ei, ej));
        for (int k = 0; k < dim_; ++k) {
          if (s[k] + s2[k] + s3[k] != 0) {
            msg << "Jacobi violated on (e_" << i << ", e_" << j << ", e_" << l
                << ") component " << k;
            return {false, msg.str()};
          }
        }
      }
  return {true, ""};
}

RationalVec dilate(const GradedLieAlgebra& alg, const Rational& lambda,
                   const RationalVec& xi) {
  if (lambda <= 0) throw DomainError("dilation parameter must be positive");
  if (static_cast<int>(xi.size()) != alg.dim())
    throw MalformedInput("coordinate length mismatch in dilate");
  RationalVec out(xi.size());
  for (int j = 0; j < alg.dim(); ++j) {
    Rational p(1);
    for (int d = 0; d < alg.weights()[j]; ++d) p *= lambda;
    out[j] = p * xi[j];
  }
  return out;
}

std::vector<double> dilate(const GradedLieAlgebra& alg, double lambda,
                           const std::vector<double>& xi) {
  if (!(lambda > 0)) throw DomainError("dilation parameter must be positive");
  if (static_cast<int>(xi.size()) != alg.dim())
    throw MalformedInput("coordinate length mismatch in dilate");
  std::vector<double> out(xi.size());
  for (int j = 0; j < alg.dim(); ++j)
    out[j] = std::pow(lambda, alg.weights()[j]) * xi[j];
  return out;
}

namespace {

// Right-nested bracket of the word w: ad(w_0) ad(w_1) ... ad(w_{m-2}) w_{m-1},
// with letters taken from {x, y}.
RationalVec nested_bracket(const GradedLieAlgebra& alg,
                           const std::vector<int>& word, const RationalVec& x,
                           const RationalVec& y) {
  RationalVec acc = word.back() == 0 ? x : y;
  for (int p = static_cast<int>(word.size()) - 2; p >= 0; --p)
    acc = alg.bracket(word[p] == 0 ? x : y, acc);
  return acc;
}

Integer factorial(int n) {
  Integer f(1);
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Recursively enumerate the Dynkin blocks (p_1,q_1)...(p_n,q_n) with
// p_i + q_i >= 1 and total letter count <= max_len.
void dynkin_rec(const GradedLieAlgebra& alg, const RationalVec& x,
                const RationalVec& y, int max_len, std::vector<int>& word,
                Rational fact_prod, int n_blocks, RationalVec& out) {
  int len = static_cast<int>(word.size());
  if (n_blocks > 0 && len > 0) {
    // contribution of the blocks accumulated so far
    Rational coeff = ((n_blocks % 2 == 1) ? Rational(1) : Rational(-1)) /
                     (Rational(n_blocks) * Rational(len)) * fact_prod;
    RationalVec br = nested_bracket(alg, word, x, y);
    for (size_t k = 0; k < out.size(); ++k)
      if (br[k] != 0) out[k] += coeff * br[k];
  }
  if (len >= max_len) return;
  // append one more block of p x's followed by q y's
  for (int p = 0; p + len <= max_len; ++p) {
    for (int q = (p == 0 ? 1 : 0); p + q + len <= max_len; ++q) {
      for (int a = 0; a < p; ++a) word.push_back(0);
      for (int a = 0; a < q; ++a) word.push_back(1);
      Rational f = fact_prod / Rational(factorial(p) * factorial(q));
      dynkin_rec(alg, x, y, max_len, word, f, n_blocks + 1, out);
      word.resize(len);
    }
  }
}

}  // namespace

RationalVec bch_multiply(const GradedLieAlgebra& alg, const RationalVec& xi,
                         const RationalVec& zeta) {
  if (static_cast<int>(xi.size()) != alg.dim() ||
      static_cast<int>(zeta.size()) != alg.dim())
    throw MalformedInput("coordinate length mismatch in bch_multiply");
  RationalVec out(alg.dim(), Rational(0));
  std::vector<int> word;
  // Brackets of word length > step vanish by the grading, so the Dynkin
  // series truncated at the step is exact.
  dynkin_rec(alg, xi, zeta, alg.step(), word, Rational(1), 0, out);
  return out;
}

double homogeneous_norm(const GradedLieAlgebra& alg,
                        const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != alg.dim())
    throw MalformedInput("coordinate length mismatch in homogeneous_norm");
  long L = 1;
  for (int d : alg.weights()) L = std::lcm(L, static_cast<long>(d));
  double s = 0;
  for (int j = 0; j < alg.dim(); ++j)
    s += std::pow(std::abs(xi[j]), 2.0 * L / alg.weights()[j]);
  return std::pow(s, 1.0 / (2.0 * L));
}

RationalVec to_rational_vec(const std::vector<double>& v) {
  RationalVec out;
  out.reserve(v.size());
  for (double x : v) {
    // exact binary expansion of the double
    out.push_back(Rational(x));
  }
  return out;
}

std::vector<double> to_double_vec(const RationalVec& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const Rational& r : v) out.push_back(to_double(r));
  return out;
}

GradedLieAlgebra abelian_algebra(int n) {
  return GradedLieAlgebra(std::vector<int>(n, 1), "abelian");
}

GradedLieAlgebra heisenberg_algebra() {
  GradedLieAlgebra alg({1, 1, 2}, "heis1");
  alg.set_bracket(0, 1, 2, Rational(1));
  return alg;
}

GradedLieAlgebra engel_algebra() {
  GradedLieAlgebra alg({1, 1, 2, 3}, "engel");
  alg.set_bracket(0, 1, 2, Rational(1));  // [X1,X2] = X3
  alg.set_bracket(0, 2, 3, Rational(1));  // [X1,X3] = X4
  return alg;
}

}  // namespace osc
