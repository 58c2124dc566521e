#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osc/expr.hpp"
#include "osc/graded_lie_algebra.hpp"

namespace osc {

/// Vector field sum_k coeffs[k] d/dx_k with exact coefficients.
struct VectorField {
  std::vector<Expr> coeffs;

  /// Apply the field to a scalar expression (directional derivative).
  Expr apply(const Expr& f) const;
};

VectorField bracket(const VectorField& X, const VectorField& Y);

/// A filtered manifold on one coordinate patch: a frame X_1..X_n with
/// filtration orders d_1..d_n, H^m = span of the fields of order <= m.
class FilteredPatch {
 public:
  FilteredPatch(std::vector<VectorField> frame, std::vector<int> orders,
                int depth, bool periodic, double injectivity_radius,
                double domain_radius = 0.0 /* 0 = unbounded */,
                std::string name = "");

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  bool periodic() const { return periodic_; }
  double injectivity_radius() const { return injectivity_radius_; }
  const std::vector<int>& orders() const { return orders_; }
  const std::vector<VectorField>& frame() const { return frame_; }
  const std::string& name() const { return name_; }

  /// Symbolic verification of Def-3.1-style closure: every frame bracket
  /// [X_i, X_j] expands in the frame with identically-zero coefficient on
  /// any X_k of order > d_i + d_j.  Also checks depth consistency and frame
  /// independence on a sample grid.
  ValidationReport check_filtration() const;

  /// Expansion coefficient of X_k in [X_i, X_j] (computed symbolically).
  const Expr& bracket_coeff(int i, int j, int k) const;

  /// Osculating algebra at x: frame-bracket coefficients at x restricted to
  /// the grading-compatible entries.  Exact; requires polynomial frames.
  GradedLieAlgebra osculating_at(const RationalVec& x) const;

  struct ChartPoint {
    std::vector<double> x;
    std::vector<double> second;  // y for t != 0, xi (fibre coords) for t = 0
    double t;
  };

  /// Tangent-groupoid chart: for t != 0 returns (x, y) with
  /// y = exp_x(-psi(delta_t xi)) under the flat connection; for t = 0 the
  /// osculating fibre point (x, xi).
  ChartPoint exp_chart(const std::vector<double>& x,
                       const std::vector<double>& xi, double t) const;

  /// Homogeneous norm of graded coordinates with this patch's weights.
  double graded_norm(const std::vector<double>& xi) const;

  /// Frame matrix A(x) with A[k][j] = coefficient of d/dx_k in X_j.
  std::vector<std::vector<double>> frame_matrix(
      const std::vector<double>& x) const;

 private:
  void compute_bracket_coeffs() const;
  void check_point(const std::vector<double>& x) const;

  int dim_;
  int depth_;
  bool periodic_;
  double injectivity_radius_;
  double domain_radius_;
  std::string name_;
  std::vector<VectorField> frame_;
  std::vector<int> orders_;

  mutable bool coeffs_ready_ = false;
  mutable Expr frame_det_;
  mutable std::vector<Expr> bracket_coeffs_;  // (i*dim + j)*dim + k
};

// Shipped patch catalog.
FilteredPatch trivial_patch(int n, bool periodic = false);
FilteredPatch heisenberg_patch();
FilteredPatch engel_patch();
/// Negative case: heisenberg frame declared as a depth-1 filtration.
FilteredPatch heisenberg_bad_patch();

}  // namespace osc
