#pragma once

#include <string>
#include <vector>

#include "osc/symbol_family.hpp"

namespace osc {

/// Polyhomogeneous expansion a ~ sum_j a_j with a_j exactly
/// delta'_lambda-homogeneous of weight m - j outside the unit shell and cut
/// off by chi inside it.
struct Expansion {
  TorusGrid xgrid;
  TorusGrid egrid;
  std::vector<int> weights;
  double m = 0;                    // base weight
  std::vector<SymbolSlice> terms;  // a_j, weight m - j
  std::string cutoff = "chi(r) = radial_cutoff(|eta|_H): 0 below 1/2, 1 from 1";
  /// Fitted order of S|_{t=1} - sum_{j<k} a_j for k = 1..J (diagnostic).
  std::vector<double> remainder_order;
};

/// Exactly dilation-homogeneous extension of a slice: every lattice point
/// takes its value from the most-contracted on-lattice representative
/// (exact dyadic propagation), then chi cuts the unit-shell core.  The
/// result passes measure_slice_homogeneity exactly.
SymbolSlice homogenize_slice(const SymbolSlice& s);

/// Expansion extraction: a_j = homogenization of B_j|_{t=0},
/// B_{j+1} = t^{-1}(B_j - A_j) with the t = 0 slice recovered by one-sided
/// quadratic extrapolation in t (step-halving consistency to 1e-6 of the
/// family scale, checked outside the cutoff core).
Expansion extract_expansion(const SymbolFamily& S, int J);

/// Borel-style asymptotic sum sum_j chi(|eta|_H / R_j) a_j, constant in t;
/// R_j is the smallest power of two >= max(1, c_j 2^j) where c_j is the
/// unit-shell sup of a_j, so the j-th tail addition is O(2^-j) one order
/// below its own weight.  Empty expansions sum to the zero family.
SymbolFamily asymptotic_sum(const Expansion& E, int t_levels = 12);

/// Convolution inverse of an H-elliptic cosymbol (trivial filtration):
/// chi(|eta|_H) / c pointwise, weight -m.  Throws DomainError with a
/// witness point if |c| < eps * shell scale * |eta|_H^m anywhere chi > 0.
SymbolSlice invert_cosymbol(const SymbolSlice& c, double eps = 1e-8);

struct ParametrixState {
  SymbolSlice P;               // t = 1 slice of the input family
  SymbolSlice Q0;              // cosymbol inverse lift, t = 1 slice
  SymbolSlice R;               // I - P o Q0
  SymbolSlice Qp;              // Q0 o sum_{j<=k} R^j
  SymbolSlice residual_right;  // I - P o Qp
  SymbolSlice residual_left;   // I - Qp o P
  double right_order = 0;      // fitted shell slopes of the residuals
  double left_order = 0;
  int k = 0;
};

/// Neumann parametrix of Thm-9.7 type: Q0 from the inverted t = 0 cosymbol,
/// then Qp = Q0 o sum_{j<=k} (I - P o Q0)^j; both residuals carry fitted
/// orders <= -(k+1) for H-elliptic input.
ParametrixState parametrix(const SymbolFamily& P, int k);

/// Applies the grid operator of a t = 1 slice to a function (x-grid must
/// match the frequency grid or be trivial).
std::vector<cplx> apply_slice(const SymbolSlice& s, const std::vector<cplx>& f);

/// Dense LU solve of the grid operator equation P u = f (reference solve).
std::vector<cplx> solve_slice(const SymbolSlice& P, const std::vector<cplx>& f);

struct HypoellipticityReport {
  double spectral_mismatch = 0;    // sup |Qp f - direct solve|
  double shell_radius = 64;        // residual coefficients measured beyond
  double max_residual_beyond = 0;  // sup |(P Qp f - f)^(eta)|, |eta|_H >= r
  bool pass = false;
};

/// Solves P u = f approximately via u = Qp f and certifies smoothing: the
/// residual's Fourier coefficients (integral normalization) vanish beyond
/// shell_radius to tol, and u is compared against the dense reference
/// solve.
HypoellipticityReport hypoellipticity_demo(const ParametrixState& st,
                                           const std::vector<cplx>& f,
                                           double shell_radius = 64,
                                           double tol = 1e-6);

}  // namespace osc
