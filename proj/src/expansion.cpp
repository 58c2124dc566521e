#include "osc/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "osc/parallel.hpp"

namespace osc {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

bool nanc(const cplx& z) {
  return std::isnan(z.real()) || std::isnan(z.imag());
}

std::vector<long long> eta_of(const TorusGrid& egrid, std::size_t ei) {
  auto idx = egrid.unflatten(ei);
  std::vector<long long> eta(idx.size());
  for (int a = 0; a < egrid.dim(); ++a) eta[a] = egrid.freq_of_index(a, idx[a]);
  return eta;
}

double norm_of(const std::vector<int>& weights,
               const std::vector<long long>& eta) {
  std::vector<double> e(eta.begin(), eta.end());
  return lattice_norm_H(weights, e);
}

// Value at 0 of the quadratic through (t1,f1),(t2,f2),(t3,f3).
cplx extrap0(double t1, double t2, double t3, cplx f1, cplx f2, cplx f3) {
  double w1 = t2 * t3 / ((t1 - t2) * (t1 - t3));
  double w2 = t1 * t3 / ((t2 - t1) * (t2 - t3));
  double w3 = t1 * t2 / ((t3 - t1) * (t3 - t2));
  return w1 * f1 + w2 * f2 + w3 * f3;
}

// B_{j+1} = t^{-1}(B - A), the t = 0 slice recovered by one-sided
// extrapolation from the four smallest positive t with a step-halving
// consistency check outside the cutoff core (inside it chi kills every
// later use, and t^{-1} amplification is expected there).
SymbolFamily divide_by_t(const SymbolFamily& B, const SymbolSlice& A) {
  SymbolFamily out = B;
  out.weight = B.weight - 1;
  const std::size_t sz = B.slice_size();
  parallel_for(B.nt(), [&](std::int64_t ti) {
    double t = B.tgrid[ti];
    if (t == 0) return;
    for (std::size_t q = 0; q < sz; ++q)
      out.values[ti * sz + q] = (B.values[ti * sz + q] - A.values[q]) / t;
  });
  int i0 = B.t_index(0.0);
  if (i0 + 4 >= B.nt())
    throw DomainError("t-grid too coarse for the t = 0 extrapolation");
  double t1 = B.tgrid[i0 + 1], t2 = B.tgrid[i0 + 2], t3 = B.tgrid[i0 + 3],
         t4 = B.tgrid[i0 + 4];
  // the cutoff transition 1/2 < |eta|_H < 1 carries a 1/t divergence by
  // construction; chi kills every later use of it, so the whole region
  // |eta|_H < 1 is excluded from the consistency check and its scale
  std::vector<char> core(B.ne());
  for (std::size_t ei = 0; ei < B.ne(); ++ei)
    core[ei] = norm_of(B.weights, eta_of(B.egrid, ei)) < 1.0;
  double scale = 1e-300;
  for (int d = 1; d <= 4; ++d)
    for (std::size_t q = 0; q < sz; ++q) {
      if (core[q % B.ne()]) continue;
      const cplx& z = out.values[(i0 + d) * sz + q];
      if (!nanc(z)) scale = std::max(scale, std::abs(z));
    }
  double defect = 0;
  for (std::size_t q = 0; q < sz; ++q) {
    cplx f1 = out.values[(i0 + 1) * sz + q],
         f2 = out.values[(i0 + 2) * sz + q],
         f3 = out.values[(i0 + 3) * sz + q],
         f4 = out.values[(i0 + 4) * sz + q];
    if (nanc(f1) || nanc(f2) || nanc(f3) || nanc(f4)) {
      out.values[i0 * sz + q] = cplx(kNaN, kNaN);
      continue;
    }
    cplx e1 = extrap0(t1, t2, t3, f1, f2, f3);
    cplx e2 = extrap0(t2, t3, t4, f2, f3, f4);
    out.values[i0 * sz + q] = e1;
    if (!core[q % B.ne()]) defect = std::max(defect, std::abs(e1 - e2));
  }
  if (defect > 1e-6 * scale) {
    std::ostringstream os;
    os << "t = 0 extrapolation unstable: step-halving defect " << defect
       << " exceeds 1e-6 of the family scale " << scale
       << "; reduce the t-grid step";
    throw DomainError(os.str());
  }
  return out;
}

void lu_solve_inplace(std::size_t n, std::vector<cplx>& M,
                      std::vector<cplx>& b) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(M[i * n + k]) > std::abs(M[p * n + k])) p = i;
    if (std::abs(M[p * n + k]) < 1e-300)
      throw DomainError("grid operator is singular");
    if (p != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(M[p * n + j], M[k * n + j]);
      std::swap(b[p], b[k]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      cplx f = M[i * n + k] / M[k * n + k];
      if (f == cplx(0)) continue;
      for (std::size_t j = k; j < n; ++j) M[i * n + j] -= f * M[k * n + j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    cplx acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= M[i * n + j] * b[j];
    b[i] = acc / M[i * n + i];
  }
}

SymbolSlice add_slices(const SymbolSlice& A, const SymbolSlice& B) {
  // broadcast a trivial x-grid against a full one
  if (A.nx() == B.nx()) {
    SymbolSlice out = A;
    for (std::size_t q = 0; q < out.values.size(); ++q)
      out.values[q] += B.values[q];
    return out;
  }
  const SymbolSlice& big = A.nx() > B.nx() ? A : B;
  const SymbolSlice& small = A.nx() > B.nx() ? B : A;
  if (small.nx() != 1) throw GridError("slice shapes differ");
  SymbolSlice out = big;
  for (std::size_t xi = 0; xi < big.nx(); ++xi)
    for (std::size_t ei = 0; ei < big.ne(); ++ei)
      out.at(xi, ei) += small.at(0, ei);
  return out;
}

}  // namespace

SymbolSlice homogenize_slice(const SymbolSlice& s) {
  SymbolSlice out = s;
  const std::size_t ne = s.ne();
  for (std::size_t ei = 0; ei < ne; ++ei) {
    auto eta = eta_of(s.egrid, ei);
    double chi = radial_cutoff(norm_of(s.weights, eta));
    if (chi == 0) {
      for (std::size_t xi = 0; xi < s.nx(); ++xi) out.at(xi, ei) = 0;
      continue;
    }
    // contract to the most dyadically divisible on-lattice representative;
    // its value propagates back by exact homogeneous scaling
    auto e = eta;
    int p = 0;
    for (;;) {
      bool div = true;
      for (std::size_t j = 0; j < e.size(); ++j)
        if (e[j] % (1LL << s.weights[j]) != 0) {
          div = false;
          break;
        }
      if (!div) break;
      for (std::size_t j = 0; j < e.size(); ++j) e[j] >>= s.weights[j];
      ++p;
    }
    std::vector<int> idx(e.size());
    for (int a = 0; a < s.egrid.dim(); ++a)
      idx[a] = static_cast<int>(s.egrid.index_of_freq(a, e[a]));
    std::size_t src = s.egrid.flatten(idx);
    double scale = chi * std::pow(2.0, p * s.weight);
    for (std::size_t xi = 0; xi < s.nx(); ++xi)
      out.at(xi, ei) = scale * s.at(xi, src);
  }
  return out;
}

Expansion extract_expansion(const SymbolFamily& S, int J) {
  if (J < 1) throw MalformedInput("term count must be positive");
  if (!S.nose_normalized)
    throw DomainError("extract_expansion requires a nose-normalized family");
  Expansion E;
  E.xgrid = S.xgrid;
  E.egrid = S.egrid;
  E.weights = S.weights;
  E.m = S.weight;
  SymbolFamily B = S;
  for (int j = 0; j < J; ++j) {
    SymbolSlice b0 = B.slice(B.t_index(0.0));
    b0.weight = S.weight - j;
    SymbolSlice aj = homogenize_slice(b0);
    E.terms.push_back(aj);
    if (j + 1 < J) B = divide_by_t(B, aj);
  }
  SymbolSlice diff = S.slice(S.t_index(1.0));
  for (int j = 0; j < J; ++j) {
    diff = slice_difference(diff, E.terms[j]);
    E.remainder_order.push_back(fit_slope(slice_shell_profile(diff)).slope);
  }
  return E;
}

SymbolFamily asymptotic_sum(const Expansion& E, int t_levels) {
  for (std::size_t j = 1; j < E.terms.size(); ++j)
    if (!(E.terms[j].weight < E.terms[j - 1].weight - 1e-12))
      throw DomainError("term weights must be strictly decreasing");
  SymbolFamily S;
  S.xgrid = E.xgrid;
  S.egrid = E.egrid;
  S.weights = E.weights;
  S.weight = E.m;
  S.tgrid = dyadic_tgrid(t_levels);
  S.values.assign(S.nt() * S.slice_size(), cplx(0));
  const std::size_t ne = S.ne(), nx = S.nx();
  std::vector<cplx> sum(nx * ne, cplx(0));
  for (std::size_t j = 0; j < E.terms.size(); ++j) {
    const SymbolSlice& a = E.terms[j];
    double cj = 0;
    for (std::size_t ei = 0; ei < ne; ++ei) {
      double r = a.eta_norm(ei);
      if (r < 1 || r >= 2) continue;
      for (std::size_t xi = 0; xi < nx; ++xi)
        cj = std::max(cj, std::abs(a.at(xi, ei)));
    }
    double R = 1;
    while (R < cj * std::ldexp(1.0, static_cast<int>(j))) R *= 2;
    for (std::size_t ei = 0; ei < ne; ++ei) {
      double chi = radial_cutoff(a.eta_norm(ei) / R);
      if (chi == 0) continue;
      for (std::size_t xi = 0; xi < nx; ++xi)
        sum[xi * ne + ei] += chi * a.at(xi, ei);
    }
  }
  for (int ti = 0; ti < S.nt(); ++ti)
    std::copy(sum.begin(), sum.end(), S.values.begin() + ti * S.slice_size());
  return S;
}

SymbolSlice invert_cosymbol(const SymbolSlice& c, double eps) {
  const std::size_t ne = c.ne();
  double h0 = 0;
  for (std::size_t ei = 0; ei < ne; ++ei) {
    double r = c.eta_norm(ei);
    if (r < 1 || r >= 2) continue;
    for (std::size_t xi = 0; xi < c.nx(); ++xi)
      h0 = std::max(h0, std::abs(c.at(xi, ei)));
  }
  h0 = std::max(h0, 1e-300);
  SymbolSlice out = c;
  out.weight = -c.weight;
  for (std::size_t ei = 0; ei < ne; ++ei) {
    double r = c.eta_norm(ei);
    double chi = radial_cutoff(r);
    if (chi == 0) {
      for (std::size_t xi = 0; xi < c.nx(); ++xi) out.at(xi, ei) = 0;
      continue;
    }
    double thr = eps * h0 * std::pow(std::max(r, 1.0), c.weight);
    for (std::size_t xi = 0; xi < c.nx(); ++xi) {
      const cplx& z = c.at(xi, ei);
      if (std::abs(z) < thr) {
        auto eta = eta_of(c.egrid, ei);
        std::ostringstream os;
        os << "not H-elliptic: cosymbol magnitude " << std::abs(z)
           << " below threshold " << thr << " at eta = (";
        for (std::size_t a = 0; a < eta.size(); ++a)
          os << (a ? "," : "") << eta[a];
        os << "), x index " << xi;
        throw DomainError(os.str());
      }
      out.at(xi, ei) = chi / z;
    }
  }
  return out;
}

ParametrixState parametrix(const SymbolFamily& Pf, int k) {
  ParametrixState st;
  st.k = k;
  st.P = Pf.slice(Pf.t_index(1.0));
  st.P.weight = Pf.weight;
  SymbolSlice c = Pf.slice(Pf.t_index(0.0));
  c.weight = Pf.weight;
  SymbolSlice inv = invert_cosymbol(c);
  int levels = std::max(3, (Pf.nt() - 3) / 2);
  SymbolFamily Q0f = extend_cosymbol(inv, levels);
  st.Q0 = Q0f.slice(Q0f.t_index(1.0));
  st.Q0.weight = inv.weight;
  SymbolSlice PQ0 = compose_slices(st.P, st.Q0);
  st.R = PQ0;
  st.R.weight = -1;
  for (auto& z : st.R.values) z = cplx(1, 0) - z;
  SymbolSlice Qp = st.Q0;
  if (k > 0) {
    SymbolSlice acc = st.R;
    SymbolSlice Rj = st.R;
    for (int j = 2; j <= k; ++j) {
      Rj = compose_slices(st.R, Rj);
      acc = add_slices(acc, Rj);
    }
    Qp = add_slices(st.Q0, compose_slices(st.Q0, acc));
  }
  st.Qp = Qp;
  st.Qp.weight = -Pf.weight;
  st.residual_right = compose_slices(st.P, st.Qp);
  for (auto& z : st.residual_right.values) z = cplx(1, 0) - z;
  st.residual_left = compose_slices(st.Qp, st.P);
  for (auto& z : st.residual_left.values) z = cplx(1, 0) - z;
  st.right_order = fit_slope(slice_shell_profile(st.residual_right)).slope;
  st.left_order = fit_slope(slice_shell_profile(st.residual_left)).slope;
  return st;
}

std::vector<cplx> apply_slice(const SymbolSlice& s,
                              const std::vector<cplx>& f) {
  const TorusGrid& grid = s.egrid;
  const std::size_t N = grid.total();
  if (f.size() != N) throw GridError("function does not match the grid");
  auto K = kernel_from_slice(s);
  std::vector<cplx> u(N);
  const double v = grid.cell_volume();
  parallel_for(static_cast<std::int64_t>(N), [&](std::int64_t i) {
    cplx acc = 0;
    for (std::size_t j = 0; j < N; ++j) acc += K[i * N + j] * f[j];
    u[i] = v * acc;
  });
  return u;
}

std::vector<cplx> solve_slice(const SymbolSlice& P,
                              const std::vector<cplx>& f) {
  const TorusGrid& grid = P.egrid;
  const std::size_t N = grid.total();
  if (f.size() != N) throw GridError("function does not match the grid");
  auto M = kernel_from_slice(P);
  const double v = grid.cell_volume();
  for (auto& z : M) z *= v;
  std::vector<cplx> u = f;
  lu_solve_inplace(N, M, u);
  return u;
}

HypoellipticityReport hypoellipticity_demo(const ParametrixState& st,
                                           const std::vector<cplx>& f,
                                           double shell_radius, double tol) {
  HypoellipticityReport rep;
  rep.shell_radius = shell_radius;
  auto u = apply_slice(st.Qp, f);
  auto pu = apply_slice(st.P, u);
  auto uref = solve_slice(st.P, f);
  const TorusGrid& grid = st.P.egrid;
  const std::size_t N = grid.total();
  std::vector<cplx> res(N), diff(N);
  for (std::size_t i = 0; i < N; ++i) {
    res[i] = pu[i] - f[i];
    diff[i] = u[i] - uref[i];
    rep.spectral_mismatch = std::max(rep.spectral_mismatch, std::abs(diff[i]));
  }
  kernel_to_symbol(grid, res);
  kernel_to_symbol(grid, diff);
  // smoothing: both P u - f and u - u_ref have no high-frequency content
  for (std::size_t ei = 0; ei < N; ++ei) {
    auto eta = eta_of(grid, ei);
    if (norm_of(st.P.weights, eta) < shell_radius) continue;
    rep.max_residual_beyond = std::max(
        rep.max_residual_beyond, std::max(std::abs(res[ei]), std::abs(diff[ei])));
  }
  rep.pass = rep.max_residual_beyond < tol;
  return rep;
}

}  // namespace osc
