#pragma once

#include <functional>
#include <vector>

#include "osc/symbol_family.hpp"

namespace osc {

/// Koranyi gauge ((x^2+y^2)^2 + 16 z^2)^{1/4}, the homogeneous norm of the
/// Heisenberg group with dilation delta_lambda(x,y,z) = (lx, ly, l^2 z).
double koranyi_gauge(double x, double y, double z);

/// Sublaplacian L = -(X^2 + Y^2) of the left-invariant frame
/// X = dx - (y/2) dz, Y = dy + (x/2) dz, applied to a function by 8th-order
/// differences.  The z step is separate: homogeneous functions vary on the
/// scale gauge^2 in the weight-2 direction.
double sublaplacian_fd(const std::function<double(double, double, double)>& f,
                       double x, double y, double z, double step_xy,
                       double step_z);

/// Fundamental-solution kernel Gamma = c / gauge^2 with the constant fixed
/// by the delta-mass oracle: the flux of (X Gamma) X + (Y Gamma) Y through
/// the unit box boundary equals -1 (so L Gamma has delta mass 1).  The
/// constant is computed, never transcribed.
struct HeisenbergGamma {
  double constant = 0;
  double mass_coarse = 0;  // unit-mass defect at two quadrature levels
  double mass_fine = 0;
};
HeisenbergGamma calibrate_gamma();

double gamma_value(const HeisenbergGamma& G, double x, double y, double z);

struct GammaReport {
  double max_L_gamma = 0;          // sup |L Gamma| at gauge >= 1/4
  double homogeneity_defect = 0;   // Gamma(delta_2 g) vs 2^-2 Gamma(g)
  double mass_consistency = 0;     // quadrature step-halving defect
  double weight = 0;               // 2 - d_H with d_H = 4
  bool pass = false;
};
GammaReport verify_gamma(const HeisenbergGamma& G, double tol_L = 1e-4);

/// Full symbol family of the sublaplacian on the osculating group: the
/// operator is homogeneous on the nose of H-order 2, so the family is the
/// t-independent cosymbol polynomial eta1^2 + eta2^2 on the weighted
/// (1,1,2) frequency lattice.
SymbolFamily sublaplacian_family(int G, int t_levels = 12);

/// L(Gamma * f) vs f for a smooth compactly supported f by direct group
/// convolution on a Heisenberg grid; returns the relative sup residual over
/// interior points (quadrature-limited, first order in the grid step).
double gamma_convolution_residual(const HeisenbergGamma& G, int n,
                                  double halfwidth);

}  // namespace osc
