#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "osc/grid.hpp"

namespace osc {

/// One t-slice of a full symbol: values a(x,eta) on x-grid times frequency
/// lattice, row-major [x][eta].
struct SymbolSlice {
  TorusGrid xgrid;
  TorusGrid egrid;
  std::vector<int> weights;  // dual dilation weights d_j
  double weight = 0;         // declared homogeneity weight
  std::vector<cplx> values;

  std::size_t nx() const { return xgrid.total(); }
  std::size_t ne() const { return egrid.total(); }
  cplx& at(std::size_t xi, std::size_t ei) { return values[xi * ne() + ei]; }
  const cplx& at(std::size_t xi, std::size_t ei) const {
    return values[xi * ne() + ei];
  }
  /// Homogeneous norm of the frequency at lattice index ei.
  double eta_norm(std::size_t ei) const;
};

/// Extended full symbol P(x,eta,t) over the dyadic t-grid.  Values are
/// stored slice-major [t][x][eta]; NaN entries mark points not covered by a
/// lattice resampling and are skipped by every measurement.
struct SymbolFamily {
  TorusGrid xgrid;
  TorusGrid egrid;
  std::vector<int> weights;
  double weight = 0;
  std::vector<double> tgrid;  // ascending, from dyadic_tgrid or {1}
  std::vector<cplx> values;
  /// Set by normalize_outside_interval: slices for |t| > 1 may be produced
  /// by the exact t-power homogeneous extension of the t = +-1 slices.
  bool nose_normalized = false;

  std::size_t nx() const { return xgrid.total(); }
  std::size_t ne() const { return egrid.total(); }
  std::size_t slice_size() const { return nx() * ne(); }
  int nt() const { return static_cast<int>(tgrid.size()); }
  cplx& at(int ti, std::size_t xi, std::size_t ei) {
    return values[(ti * nx() + xi) * ne() + ei];
  }
  const cplx& at(int ti, std::size_t xi, std::size_t ei) const {
    return values[(ti * nx() + xi) * ne() + ei];
  }
  /// Exact index of t in the grid; GridError if absent.
  int t_index(double t) const;

  SymbolSlice slice(int ti) const;
  void set_slice(int ti, const SymbolSlice& s);
};

/// {-1, -1/2, ..., -2^-K, 0, 2^-K, ..., 1}, ascending.
std::vector<double> dyadic_tgrid(int K);

/// Builds a family by direct evaluation of f(x, eta, t); x and eta are
/// coordinate/frequency vectors.
SymbolFamily family_from_function(
    const TorusGrid& xgrid, const TorusGrid& egrid, std::vector<int> weights,
    double weight, std::vector<double> tgrid,
    const std::function<cplx(const std::vector<double>&,
                             const std::vector<double>&, double)>& f);

/// Full symbol of a gridded kernel K(x,y) at t = 1 via the flat chart
/// pullback a(x,xi) = K(x, x - xi) and the fibrewise transform in xi.
/// support_radius > 0 requires |K| below 1e-12 * max outside that distance
/// from the diagonal (the properly-supported cut-off must be applied first).
SymbolFamily symbol_from_kernel(const TorusGrid& grid,
                                const std::vector<cplx>& kernel, double weight,
                                std::vector<int> eta_weights,
                                double support_radius = -1);

/// Kernel K(x,y) of a t = 1 slice, inverse of symbol_from_kernel.
std::vector<cplx> kernel_from_slice(const SymbolSlice& s);

/// beta_lambda pullback: values resampled at (x, delta'_lambda eta,
/// lambda t).  lambda must be a power of two; off-lattice targets become
/// NaN unless the family is nose-normalized and |lambda t| > 1.
SymbolFamily zoom_pullback(const SymbolFamily& S, double lambda);

/// Slice of the nose-extension at dyadic |t| >= 1:
/// value(eta) = t^m S(delta'_{1/|t|} eta, sign t).
SymbolSlice slice_at(const SymbolFamily& S, double t);

struct SeminormEntry {
  std::vector<int> a, b;  // eta power and eta derivative multi-indices
  int k = 0;              // t derivative order
  std::vector<double> shell_sup;  // sup over dyadic shells, radius 2^s
  std::vector<double> shell_radius;  // radius where each shell sup is taken
  double fitted_slope = 0;  // least-squares slope of log2 sup vs log2 radius
  int fit_points = 0;       // shells contributing; < 2 cannot certify growth
  double bound = 0;         // slope bound this entry is tested against
  bool pass = false;
};

struct SchwartzSeminormReport {
  std::vector<SeminormEntry> entries;
  bool pass = false;
  std::string note;
};

/// Shell sups of |eta^a d_eta^b d_t^k S| with the slope bound
/// m + |a|_H - |b|_H - k + margin (the decay estimates for essentially
/// homogeneous families).  Entries run over |a|_H, |b|_H <= max_ab,
/// k <= max_k.
SchwartzSeminormReport decay_report(const SymbolFamily& S, int max_ab = 2,
                                    int max_k = 2, double margin = 0.1);

/// Rapid-decay fit: passes iff every entry's fitted decay exponent exceeds
/// max_order.  Shell values below 1e-9 of ref_scale (default: the family's
/// own max) count as exact zeros; cocycles pass the scale of the family
/// they were built from so that pure-roundoff differences are not fitted.
SchwartzSeminormReport rapid_decay_report(const SymbolFamily& S,
                                          int max_order = 8,
                                          double ref_scale = -1);

struct CocycleResult {
  double lambda = 1;
  SymbolFamily difference;  // F_lambda = lambda^-m beta-pullback - S
  SchwartzSeminormReport report;
};

CocycleResult cocycle(const SymbolFamily& S, double lambda);

struct HomogeneityResult {
  bool pass = false;
  std::vector<CocycleResult> per_lambda;
};

/// Essential homogeneity of weight m: every cocycle over the dyadic lambda
/// set (default 2^-3..2^3) is rapid-decay.
HomogeneityResult essential_homogeneity_test(
    const SymbolFamily& S, double m,
    const std::vector<double>& lambdas = {});

/// Marks the family exactly t-power homogeneous outside [-1,1] by the
/// phi-/phi0/phi+ partition; on the stored grid (|t| <= 1) values are
/// unchanged, slices beyond are served by slice_at.
SymbolFamily normalize_outside_interval(const SymbolFamily& S);

/// Constant-in-t extension of a homogeneous t = 0 slice, made properly
/// supported by a kernel-side cut-off whose frequency side is a symmetric
/// mollifier with two lattice steps of support and vanishing moments, so
/// the symbol changes only within two steps of its singular set and inside
/// the Nyquist band.  The input must be delta'_lambda-homogeneous of its
/// weight on the lattice to tol.
SymbolFamily extend_cosymbol(const SymbolSlice& K, int t_levels = 12,
                             double tol = 1e-8);

/// Measured homogeneity defect of a slice: max relative error of
/// K(delta'_2 eta) = 2^m K(eta) over the covered lattice beyond the unit
/// shell, plus the fitted growth slope.
struct HomogeneitySlopeReport {
  double max_rel_error = 0;
  double fitted_slope = 0;
  bool pass = false;
};
HomogeneitySlopeReport measure_slice_homogeneity(const SymbolSlice& K,
                                                 double tol = 1e-8);

SymbolSlice restrict_t(const SymbolFamily& S, double t);

/// t = 0 slice; verifies the dyadic convergence P_{2^-k} -> P_0.
SymbolSlice cosymbol_limit(const SymbolFamily& S, double tol = 1e-6);

/// Kernel-side composition of two t = 1 slices on the same grids; exact
/// for band-limited data.
SymbolSlice compose_slices(const SymbolSlice& A, const SymbolSlice& B);

/// Pointwise algebra on matching slices/families.
SymbolSlice slice_difference(const SymbolSlice& A, const SymbolSlice& B);
double slice_max_abs(const SymbolSlice& s);
double family_max_abs(const SymbolFamily& S);

/// Dyadic shell statistics over the frequency lattice: sup[s] over
/// |eta|_H in [2^s, 2^{s+1}) and all x, t (-1 marks empty shells), and the
/// |eta|_H where the sup is attained (smallest among ties).  Lattice points
/// inside the Nyquist band |eta_a| >= 3 G_a / 8 are never measured.
struct ShellProfile {
  std::vector<double> sup;
  std::vector<double> radius;
};
ShellProfile slice_shell_profile(const SymbolSlice& s);

struct SlopeFit {
  double slope = 0;  // least squares of log2 sup vs log2 radius, shells >= 1
  int points = 0;    // fewer than 2 points cannot certify growth
};
SlopeFit fit_slope(const ShellProfile& p);

/// Smooth radial cutoff: 0 for r <= 1/2, 1 for r >= 1.
double radial_cutoff(double r);

/// Reality check: if the t = 1 kernel is real then S(x,-eta,t) must equal
/// conj S(x,eta,t); returns the max defect.
double reality_defect(const SymbolFamily& S);

}  // namespace osc
