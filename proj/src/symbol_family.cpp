#include "osc/symbol_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "osc/parallel.hpp"

namespace osc {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.1415926535897932384626433832795;

bool nanc(const cplx& z) {
  return std::isnan(z.real()) || std::isnan(z.imag());
}

int dyadic_exponent(double lambda) {
  if (!(lambda > 0)) throw GridError("lambda must be positive");
  double p = std::log2(lambda);
  double r = std::round(p);
  if (std::abs(p - r) > 1e-12)
    throw GridError(
        "lattice mismatch: lambda must be a power of two "
        "(interpolation is not supported)");
  return static_cast<int>(r);
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

// Multi-indices a with sum a_j * w_j <= maxw, lexicographic order.
void enum_weighted(const std::vector<int>& w, int maxw, std::vector<int>& cur,
                   std::size_t pos, std::vector<std::vector<int>>& out) {
  if (pos == w.size()) {
    out.push_back(cur);
    return;
  }
  for (int v = 0;; ++v) {
    cur[pos] = v;
    int used = 0;
    for (std::size_t j = 0; j <= pos; ++j) used += cur[j] * w[j];
    if (used > maxw) break;
    enum_weighted(w, maxw, cur, pos + 1, out);
  }
  cur[pos] = 0;
}

std::vector<std::vector<int>> weighted_indices(const std::vector<int>& w,
                                               int maxw) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(w.size(), 0);
  enum_weighted(w, maxw, cur, 0, out);
  return out;
}

int weight_of(const std::vector<int>& a, const std::vector<int>& w) {
  int s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * w[j];
  return s;
}

int shell_of(double r) {
  if (r < 2) return 0;
  return static_cast<int>(std::floor(std::log2(r)));
}

// Derivative at p of the quadratic through (xa,fa),(xb,fb),(xc,fc).  The
// three weights sum to zero, so the difference form below is exactly zero
// on constant data.
cplx lagrange_d(double xa, double xb, double xc, cplx fa, cplx fb, cplx fc,
                double p) {
  double wa = (2 * p - xb - xc) / ((xa - xb) * (xa - xc));
  double wc = (2 * p - xa - xb) / ((xc - xa) * (xc - xb));
  return wa * (fa - fb) + wc * (fc - fb);
}

// Frequencies within a 3/8 de-aliasing margin of the Nyquist edge are never
// measured: kernel-side cut-offs and dilations produce spurious values
// there.
bool in_measured_band(const TorusGrid& egrid, const std::vector<int>& idx) {
  for (int a = 0; a < egrid.dim(); ++a) {
    long limit = std::max(1, 3 * egrid.sizes[a] / 8);
    if (std::abs(egrid.freq_of_index(a, idx[a])) >= limit) return false;
  }
  return true;
}

}  // namespace

double SymbolSlice::eta_norm(std::size_t ei) const {
  return norm_of(weights, eta_of(egrid, ei));
}

int SymbolFamily::t_index(double t) const {
  for (int i = 0; i < nt(); ++i)
    if (std::abs(tgrid[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  throw GridError("t is not on the family's t-grid");
}

SymbolSlice SymbolFamily::slice(int ti) const {
  SymbolSlice s{xgrid, egrid, weights, weight, {}};
  s.values.assign(values.begin() + ti * slice_size(),
                  values.begin() + (ti + 1) * slice_size());
  return s;
}

void SymbolFamily::set_slice(int ti, const SymbolSlice& s) {
  std::copy(s.values.begin(), s.values.end(),
            values.begin() + ti * slice_size());
}

std::vector<double> dyadic_tgrid(int K) {
  std::vector<double> ts;
  for (int k = 0; k <= K; ++k) ts.push_back(-std::ldexp(1.0, -k));
  ts.push_back(0.0);
  for (int k = K; k >= 0; --k) ts.push_back(std::ldexp(1.0, -k));
  return ts;
}

SymbolFamily family_from_function(
    const TorusGrid& xgrid, const TorusGrid& egrid, std::vector<int> weights,
    double weight, std::vector<double> tgrid,
    const std::function<cplx(const std::vector<double>&,
                             const std::vector<double>&, double)>& f) {
  SymbolFamily S;
  S.xgrid = xgrid;
  S.egrid = egrid;
  S.weights = std::move(weights);
  S.weight = weight;
  S.tgrid = std::move(tgrid);
  S.values.assign(S.nt() * S.slice_size(), cplx(0));
  const std::size_t nx = S.nx(), ne = S.ne();
  std::vector<std::vector<double>> xs(nx), es(ne);
  for (std::size_t xi = 0; xi < nx; ++xi) {
    auto idx = xgrid.unflatten(xi);
    xs[xi].resize(xgrid.dim());
    for (int a = 0; a < xgrid.dim(); ++a) xs[xi][a] = xgrid.coord(a, idx[a]);
  }
  for (std::size_t ei = 0; ei < ne; ++ei) {
    auto eta = eta_of(egrid, ei);
    es[ei].assign(eta.begin(), eta.end());
  }
  parallel_for(S.nt(), [&](std::int64_t ti) {
    for (std::size_t xi = 0; xi < nx; ++xi)
      for (std::size_t ei = 0; ei < ne; ++ei)
        S.at(static_cast<int>(ti), xi, ei) = f(xs[xi], es[ei], S.tgrid[ti]);
  });
  return S;
}

SymbolFamily symbol_from_kernel(const TorusGrid& grid,
                                const std::vector<cplx>& kernel, double weight,
                                std::vector<int> eta_weights,
                                double support_radius) {
  const std::size_t N = grid.total();
  if (kernel.size() != N * N)
    throw MalformedInput("kernel must be a square grid matrix");
  if (support_radius > 0) {
    double mx = 0;
    for (const auto& z : kernel) mx = std::max(mx, std::abs(z));
    for (std::size_t i = 0; i < N; ++i) {
      auto ii = grid.unflatten(i);
      for (std::size_t l = 0; l < N; ++l) {
        auto ll = grid.unflatten(l);
        double d2 = 0;
        for (int a = 0; a < grid.dim(); ++a) {
          double d = grid.coord(a, ii[a]) - grid.coord(a, ll[a]);
          while (d > grid.period / 2) d -= grid.period;
          while (d < -grid.period / 2) d += grid.period;
          d2 += d * d;
        }
        if (std::sqrt(d2) > support_radius &&
            std::abs(kernel[i * N + l]) > 1e-12 * mx)
          throw DomainError(
              "cutoff required: kernel support leaks outside the chart "
              "injectivity radius");
      }
    }
  }
  SymbolFamily S;
  S.xgrid = grid;
  S.egrid = grid;
  S.weights = std::move(eta_weights);
  S.weight = weight;
  S.tgrid = {1.0};
  S.values.resize(N * N);
  // chart pullback a(x, xi) = K(x, x - xi), then fibrewise transform
  parallel_for(static_cast<std::int64_t>(N), [&](std::int64_t i) {
    auto ii = grid.unflatten(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < N; ++j) {
      auto jj = grid.unflatten(j);
      std::vector<int> ll(grid.dim());
      for (int a = 0; a < grid.dim(); ++a)
        ll[a] = (ii[a] - jj[a] + grid.sizes[a]) % grid.sizes[a];
      S.values[i * N + j] = kernel[i * N + grid.flatten(ll)];
    }
    kernel_to_symbol(grid, std::span<cplx>(S.values.data() + i * N, N));
  });
  return S;
}

std::vector<cplx> kernel_from_slice(const SymbolSlice& s) {
  const TorusGrid& grid = s.egrid;
  const std::size_t N = grid.total();
  if (s.nx() != 1 && s.nx() != N)
    throw GridError("x-grid must be trivial or match the frequency grid");
  std::vector<cplx> K(N * N);
  parallel_for(static_cast<std::int64_t>(N), [&](std::int64_t i) {
    std::size_t xi = s.nx() == 1 ? 0 : static_cast<std::size_t>(i);
    std::vector<cplx> u(s.values.begin() + xi * N,
                        s.values.begin() + (xi + 1) * N);
    symbol_to_kernel(grid, u);
    auto ii = grid.unflatten(static_cast<std::size_t>(i));
    for (std::size_t l = 0; l < N; ++l) {
      auto ll = grid.unflatten(l);
      std::vector<int> jj(grid.dim());
      for (int a = 0; a < grid.dim(); ++a)
        jj[a] = (ii[a] - ll[a] + grid.sizes[a]) % grid.sizes[a];
      K[i * N + l] = u[grid.flatten(jj)];
    }
  });
  return K;
}

namespace {

// Source lookup for the value S(eta, t), using the exact t-power extension
// beyond |t| = 1 when the family is nose-normalized.
struct Resolved {
  bool ok = false;
  int ti = 0;
  std::size_t ei = 0;
  double scale = 1;
};

Resolved resolve_point(const SymbolFamily& S, std::vector<long long> eta,
                       double t) {
  Resolved r;
  double scale = 1;
  if (std::abs(t) > 1 + 1e-12) {
    if (!S.nose_normalized) return r;
    int q = dyadic_exponent(std::abs(t));
    for (std::size_t j = 0; j < eta.size(); ++j) {
      long long div = 1LL << (q * S.weights[j]);
      if (eta[j] % div != 0) return r;
      eta[j] /= div;
    }
    scale = std::pow(std::abs(t), S.weight);
    t = t > 0 ? 1.0 : -1.0;
  }
  int ti;
  try {
    ti = S.t_index(t);
  } catch (const GridError&) {
    return r;
  }
  std::vector<int> idx(eta.size());
  for (int a = 0; a < S.egrid.dim(); ++a) {
    if (!S.egrid.freq_in_range(a, eta[a])) return r;
    idx[a] = static_cast<int>(S.egrid.index_of_freq(a, eta[a]));
  }
  r.ok = true;
  r.ti = ti;
  r.ei = S.egrid.flatten(idx);
  r.scale = scale;
  return r;
}

}  // namespace

SymbolSlice slice_at(const SymbolFamily& S, double t) {
  if (std::abs(t) < 1)
    return S.slice(S.t_index(t));
  SymbolSlice out{S.xgrid, S.egrid, S.weights, S.weight, {}};
  out.values.assign(S.slice_size(), cplx(kNaN, kNaN));
  for (std::size_t ei = 0; ei < S.ne(); ++ei) {
    auto r = resolve_point(S, eta_of(S.egrid, ei), t);
    if (!r.ok) continue;
    for (std::size_t xi = 0; xi < S.nx(); ++xi)
      out.values[xi * S.ne() + ei] = r.scale * S.at(r.ti, xi, r.ei);
  }
  return out;
}

SymbolFamily zoom_pullback(const SymbolFamily& S, double lambda) {
  int p = dyadic_exponent(lambda);
  SymbolFamily out = S;
  if (p == 0) return out;
  const std::size_t ne = S.ne(), nx = S.nx();
  // dilated frequency per lattice point (or uncovered)
  std::vector<std::vector<long long>> deta(ne);
  std::vector<char> eok(ne, 1);
  for (std::size_t ei = 0; ei < ne; ++ei) {
    auto eta = eta_of(S.egrid, ei);
    for (std::size_t j = 0; j < eta.size(); ++j) {
      int shift = p * S.weights[j];
      if (shift >= 0) {
        eta[j] <<= shift;
      } else if (eta[j] % (1LL << -shift) == 0) {
        eta[j] >>= -shift;
      } else {
        eok[ei] = 0;
        break;
      }
    }
    deta[ei] = std::move(eta);
  }
  parallel_for(S.nt(), [&](std::int64_t ti) {
    double tt = lambda * S.tgrid[ti];
    for (std::size_t ei = 0; ei < ne; ++ei) {
      Resolved r;
      if (eok[ei]) r = resolve_point(S, deta[ei], tt);
      for (std::size_t xi = 0; xi < nx; ++xi)
        out.at(static_cast<int>(ti), xi, ei) =
            r.ok ? r.scale * S.at(r.ti, xi, r.ei) : cplx(kNaN, kNaN);
    }
  });
  return out;
}

double radial_cutoff(double r) {
  if (r <= 0.5) return 0;
  if (r >= 1) return 1;
  double s = (r - 0.5) * 2;
  double a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
  return a / (a + b);
}

double slice_max_abs(const SymbolSlice& s) {
  double m = 0;
  for (const auto& z : s.values)
    if (!nanc(z)) m = std::max(m, std::abs(z));
  return m;
}

double family_max_abs(const SymbolFamily& S) {
  double m = 0;
  for (const auto& z : S.values)
    if (!nanc(z)) m = std::max(m, std::abs(z));
  return m;
}

namespace {

void shell_record(ShellProfile& p, int s, double v, double r) {
  if (s >= static_cast<int>(p.sup.size())) {
    p.sup.resize(s + 1, -1.0);
    p.radius.resize(s + 1, 0.0);
  }
  if (v > p.sup[s] || (v == p.sup[s] && r < p.radius[s])) {
    p.sup[s] = v;
    p.radius[s] = r;
  }
}

// Shell sups over |eta|_H (sup over x and t), skipping the Nyquist band.
ShellProfile family_shell_profile(const SymbolFamily& S) {
  ShellProfile p;
  for (std::size_t ei = 0; ei < S.ne(); ++ei) {
    if (!in_measured_band(S.egrid, S.egrid.unflatten(ei))) continue;
    double r = norm_of(S.weights, eta_of(S.egrid, ei));
    int s = shell_of(r);
    for (int ti = 0; ti < S.nt(); ++ti)
      for (std::size_t xi = 0; xi < S.nx(); ++xi) {
        const cplx& z = S.at(ti, xi, ei);
        if (nanc(z)) continue;
        shell_record(p, s, std::abs(z), r);
      }
  }
  return p;
}

}  // namespace

ShellProfile slice_shell_profile(const SymbolSlice& s) {
  ShellProfile p;
  for (std::size_t ei = 0; ei < s.ne(); ++ei) {
    if (!in_measured_band(s.egrid, s.egrid.unflatten(ei))) continue;
    double r = s.eta_norm(ei);
    int sh = shell_of(r);
    for (std::size_t xi = 0; xi < s.nx(); ++xi) {
      const cplx& z = s.at(xi, ei);
      if (nanc(z)) continue;
      shell_record(p, sh, std::abs(z), r);
    }
  }
  return p;
}

SlopeFit fit_slope(const ShellProfile& prof) {
  // least squares of log2 sup against log2 of the radius where the sup is
  // attained; fitting against the attained radius removes the shell
  // granularity bias of fitting against the shell index
  SlopeFit out;
  double mx = 0;
  int present = 0;
  for (std::size_t s = 1; s < prof.sup.size(); ++s)
    if (prof.sup[s] >= 0) {
      mx = std::max(mx, prof.sup[s]);
      ++present;
    }
  if (mx < 1e-300) {
    out.slope = -1e9;
    out.points = present;
    return out;
  }
  // two or more identically vanishing shells at the top certify a
  // compactly supported (or sub-noise) tail: no finite slope fits that
  int top_zero = 0;
  for (std::size_t s = prof.sup.size(); s-- > 1;) {
    if (prof.sup[s] < 0) continue;
    if (prof.sup[s] > 0) break;
    ++top_zero;
  }
  if (top_zero >= 2) {
    out.slope = -1e9;
    out.points = present;
    return out;
  }
  double floor_v = mx * 1e-13;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t s = 1; s < prof.sup.size(); ++s)
    if (prof.sup[s] >= 0)
      pts.emplace_back(std::log2(std::max(prof.radius[s], 2.0)),
                       std::log2(std::max(prof.sup[s], floor_v)));
  out.points = static_cast<int>(pts.size());
  if (pts.size() < 2) return out;
  double x0 = pts.front().first, x1 = x0;
  for (auto [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
  }
  if (x1 - x0 < 0.5) {
    out.points = 1;  // radial range too short to certify a slope
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(pts.size());
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

namespace {

SymbolFamily t_derivative(const SymbolFamily& S) {
  SymbolFamily out = S;
  if (S.nt() < 3) {
    std::fill(out.values.begin(), out.values.end(), cplx(kNaN, kNaN));
    return out;
  }
  const std::size_t sz = S.slice_size();
  parallel_for(S.nt(), [&](std::int64_t ti) {
    int i = static_cast<int>(ti);
    int a = i == 0 ? 0 : (i == S.nt() - 1 ? S.nt() - 3 : i - 1);
    double xa = S.tgrid[a], xb = S.tgrid[a + 1], xc = S.tgrid[a + 2];
    for (std::size_t q = 0; q < sz; ++q) {
      cplx fa = S.values[a * sz + q], fb = S.values[(a + 1) * sz + q],
           fc = S.values[(a + 2) * sz + q];
      out.values[i * sz + q] =
          (nanc(fa) || nanc(fb) || nanc(fc))
              ? cplx(kNaN, kNaN)
              : lagrange_d(xa, xb, xc, fa, fb, fc, S.tgrid[i]);
    }
  });
  return out;
}

SymbolFamily eta_derivative(const SymbolFamily& S, int axis) {
  SymbolFamily out = S;
  const std::size_t ne = S.ne();
  const std::int64_t rows = static_cast<std::int64_t>(S.nt()) * S.nx();
  // centered lattice differences (the symbols are not periodic in eta, so
  // spectral differentiation is not applicable); exact on polynomials of
  // degree <= 2 and second-order accurate otherwise, which is enough for
  // slope measurements
  parallel_for(rows, [&](std::int64_t r) {
    cplx* row = out.values.data() + r * ne;
    const cplx* src = S.values.data() + r * ne;
    std::vector<cplx> buf(ne, cplx(kNaN, kNaN));
    for (std::size_t ei = 0; ei < ne; ++ei) {
      auto idx = S.egrid.unflatten(ei);
      if (idx[axis] == 0 || idx[axis] == S.egrid.sizes[axis] - 1) continue;
      auto ip = idx, im = idx;
      ip[axis] += 1;
      im[axis] -= 1;
      cplx fp = src[S.egrid.flatten(ip)], fm = src[S.egrid.flatten(im)];
      if (!nanc(fp) && !nanc(fm)) buf[ei] = (fp - fm) * 0.5;
    }
    std::copy(buf.begin(), buf.end(), row);
  });
  return out;
}

SymbolFamily eta_multiply(const SymbolFamily& S, const std::vector<int>& a) {
  SymbolFamily out = S;
  const std::size_t ne = S.ne();
  std::vector<double> factor(ne, 1.0);
  for (std::size_t ei = 0; ei < ne; ++ei) {
    auto eta = eta_of(S.egrid, ei);
    for (std::size_t j = 0; j < a.size(); ++j)
      for (int r = 0; r < a[j]; ++r)
        factor[ei] *= static_cast<double>(eta[j]);
  }
  parallel_for(S.nt() * static_cast<std::int64_t>(S.nx()),
               [&](std::int64_t row) {
                 cplx* p = out.values.data() + row * ne;
                 for (std::size_t ei = 0; ei < ne; ++ei) p[ei] *= factor[ei];
               });
  return out;
}

SchwartzSeminormReport seminorm_scan(const SymbolFamily& S, int max_ab,
                                     int max_k, bool rapid, double bound_base,
                                     double margin, double ref_scale = -1) {
  SchwartzSeminormReport rep;
  rep.pass = true;
  auto idxset = weighted_indices(S.weights, max_ab);
  // Shell values below 1e-9 of the family scale (amplified by the largest
  // measured |eta^a|) are grid-transform roundoff, not data; they are
  // treated as exact zeros so that noise-only entries do not fit fake
  // growth slopes.
  const double base = ref_scale >= 0 ? ref_scale : family_max_abs(S);
  auto noise_floor = [&](const std::vector<int>& a) {
    double amp = 1;
    for (std::size_t j = 0; j < a.size(); ++j) {
      double top = std::max(
          1.0, static_cast<double>(std::max(1, 3 * S.egrid.sizes[j] / 8) - 1));
      for (int r = 0; r < a[j]; ++r) amp *= top;
    }
    return 1e-9 * base * amp;
  };
  SymbolFamily Dk = S;
  for (int k = 0; k <= max_k; ++k) {
    if (k > 0) {
      if (S.nt() < 3) break;  // no t-direction data on single-slice families
      Dk = t_derivative(Dk);
    }
    for (const auto& b : idxset) {
      SymbolFamily Db = Dk;
      for (std::size_t ax = 0; ax < b.size(); ++ax)
        for (int r = 0; r < b[ax]; ++r)
          Db = eta_derivative(Db, static_cast<int>(ax));
      for (const auto& a : idxset) {
        SymbolFamily g = eta_multiply(Db, a);
        SeminormEntry e;
        e.a = a;
        e.b = b;
        e.k = k;
        auto prof = family_shell_profile(g);
        const double nf = noise_floor(a);
        for (auto& v : prof.sup)
          if (v >= 0 && v <= nf) v = 0;
        auto fit = fit_slope(prof);
        e.shell_sup = std::move(prof.sup);
        e.shell_radius = std::move(prof.radius);
        e.fitted_slope = fit.slope;
        e.fit_points = fit.points;
        e.bound = rapid ? bound_base
                        : S.weight + weight_of(a, S.weights) -
                              weight_of(b, S.weights) - k + margin;
        e.pass = e.fit_points < 2 || e.fitted_slope <= e.bound;
        rep.pass = rep.pass && e.pass;
        rep.entries.push_back(std::move(e));
      }
    }
  }
  return rep;
}

}  // namespace

SchwartzSeminormReport decay_report(const SymbolFamily& S, int max_ab,
                                    int max_k, double margin) {
  return seminorm_scan(S, max_ab, max_k, /*rapid=*/false, 0, margin);
}

SchwartzSeminormReport rapid_decay_report(const SymbolFamily& S, int max_order,
                                          double ref_scale) {
  return seminorm_scan(S, /*max_ab=*/1, /*max_k=*/1, /*rapid=*/true,
                       -static_cast<double>(max_order), 0, ref_scale);
}

CocycleResult cocycle(const SymbolFamily& S, double lambda) {
  CocycleResult res;
  res.lambda = lambda;
  SymbolFamily Z = zoom_pullback(S, lambda);
  double c = std::pow(lambda, -S.weight);
  res.difference = S;
  for (std::size_t i = 0; i < S.values.size(); ++i)
    res.difference.values[i] = c * Z.values[i] - S.values[i];
  // the Nyquist band is never measured; points whose zoomed source lies in
  // it carry the same spurious values, so mask them as uncovered
  for (std::size_t ei = 0; ei < S.ne(); ++ei) {
    auto eta = eta_of(S.egrid, ei);
    bool ok = true;
    for (int a = 0; a < S.egrid.dim(); ++a) {
      double f = std::pow(lambda, S.weights[a]) * static_cast<double>(eta[a]);
      if (std::abs(f) >= std::max(1, 3 * S.egrid.sizes[a] / 8)) {
        ok = false;
        break;
      }
    }
    if (ok) continue;
    for (int ti = 0; ti < S.nt(); ++ti)
      for (std::size_t xi = 0; xi < S.nx(); ++xi)
        res.difference.at(ti, xi, ei) = cplx(kNaN, kNaN);
  }
  res.report = rapid_decay_report(res.difference, 8, family_max_abs(S));
  return res;
}

HomogeneityResult essential_homogeneity_test(
    const SymbolFamily& S, double m, const std::vector<double>& lambdas) {
  std::vector<double> ls = lambdas;
  if (ls.empty()) ls = {0.125, 0.25, 0.5, 2, 4, 8};
  SymbolFamily T = S;
  T.weight = m;
  HomogeneityResult out;
  out.pass = true;
  for (double l : ls) {
    out.per_lambda.push_back(cocycle(T, l));
    out.pass = out.pass && out.per_lambda.back().report.pass;
  }
  return out;
}

SymbolFamily normalize_outside_interval(const SymbolFamily& S) {
  // phi0 = 1 on [-1,1], so the stored slices are unchanged; beyond the
  // interval the family is served by the exact t^m extension (slice_at).
  SymbolFamily out = S;
  out.nose_normalized = true;
  return out;
}

HomogeneitySlopeReport measure_slice_homogeneity(const SymbolSlice& K,
                                                 double tol) {
  HomogeneitySlopeReport rep;
  rep.fitted_slope = fit_slope(slice_shell_profile(K)).slope;
  double scale = slice_max_abs(K);
  if (scale < 1e-300) {
    rep.pass = true;
    return rep;
  }
  double c = std::pow(2.0, K.weight);
  for (std::size_t ei = 0; ei < K.ne(); ++ei) {
    if (!in_measured_band(K.egrid, K.egrid.unflatten(ei))) continue;
    auto eta = eta_of(K.egrid, ei);
    if (norm_of(K.weights, eta) < 1) continue;
    std::vector<int> idx2(eta.size());
    bool ok = true;
    for (int a = 0; a < K.egrid.dim(); ++a) {
      long long f2 = eta[a] * (1LL << K.weights[a]);
      long limit = std::max(1, 3 * K.egrid.sizes[a] / 8);
      if (!K.egrid.freq_in_range(a, f2) || std::abs(f2) >= limit) {
        ok = false;
        break;
      }
      idx2[a] = static_cast<int>(K.egrid.index_of_freq(a, f2));
    }
    if (!ok) continue;
    std::size_t ei2 = K.egrid.flatten(idx2);
    for (std::size_t xi = 0; xi < K.nx(); ++xi) {
      cplx want = c * K.at(xi, ei);
      double err = std::abs(K.at(xi, ei2) - want) /
                   std::max(std::abs(want), 1e-12 * scale);
      rep.max_rel_error = std::max(rep.max_rel_error, err);
    }
  }
  rep.pass = rep.max_rel_error <= tol;
  return rep;
}

SymbolFamily extend_cosymbol(const SymbolSlice& K, int t_levels, double tol) {
  auto rep = measure_slice_homogeneity(K, tol);
  if (!rep.pass) {
    std::ostringstream os;
    os << "cosymbol slice is not dilation-homogeneous of weight " << K.weight
       << ": max relative defect " << rep.max_rel_error << " (tol " << tol
       << "), fitted shell slope " << rep.fitted_slope;
    throw DomainError(os.str());
  }
  // Properly supporting cut-off, applied on the kernel side: per axis
  // psi(xi) = 1 - sin^4(pi xi / period), which vanishes at the cut locus
  // xi = +-period/2.  Its frequency side is the symmetric mollifier
  // {-1, 4, 10, 4, -1}/16 with support 2 and vanishing moments
  // through order 3, so the symbol changes only within two lattice steps of
  // eta-points whose kernel contribution is singular, plus the (never
  // measured) Nyquist band.
  SymbolSlice cut = K;
  const std::size_t ne = K.ne();
  parallel_for(static_cast<std::int64_t>(K.nx()), [&](std::int64_t xi) {
    std::vector<cplx> buf(cut.values.begin() + xi * ne,
                          cut.values.begin() + (xi + 1) * ne);
    symbol_to_kernel(K.egrid, buf);
    for (std::size_t j = 0; j < ne; ++j) {
      auto idx = K.egrid.unflatten(j);
      for (int a = 0; a < K.egrid.dim(); ++a) {
        double s = std::sin(kPi * K.egrid.coord(a, idx[a]) / K.egrid.period);
        double s4 = s * s * s * s;
        buf[j] *= 1 - s4;
      }
    }
    kernel_to_symbol(K.egrid, buf);
    std::copy(buf.begin(), buf.end(), cut.values.begin() + xi * ne);
  });
  SymbolFamily S;
  S.xgrid = K.xgrid;
  S.egrid = K.egrid;
  S.weights = K.weights;
  S.weight = K.weight;
  S.tgrid = dyadic_tgrid(t_levels);
  S.values.resize(S.nt() * S.slice_size());
  for (int ti = 0; ti < S.nt(); ++ti) S.set_slice(ti, cut);
  return S;
}

SymbolSlice restrict_t(const SymbolFamily& S, double t) {
  return S.slice(S.t_index(t));
}

SymbolSlice cosymbol_limit(const SymbolFamily& S, double tol) {
  SymbolSlice p0 = S.slice(S.t_index(0.0));
  double scale = std::max(family_max_abs(S), 1e-300);
  std::vector<char> ok(S.ne());
  for (std::size_t ei = 0; ei < S.ne(); ++ei)
    ok[ei] = in_measured_band(S.egrid, S.egrid.unflatten(ei));
  std::vector<std::pair<double, double>> diffs;  // (k, sup diff) for t = 2^-k
  for (int ti = 0; ti < S.nt(); ++ti) {
    double t = S.tgrid[ti];
    if (t <= 0) continue;
    double d = 0;
    auto s = S.slice(ti);
    for (std::size_t xi = 0; xi < S.nx(); ++xi)
      for (std::size_t ei = 0; ei < S.ne(); ++ei) {
        if (!ok[ei]) continue;
        const cplx &a = s.at(xi, ei), &b = p0.at(xi, ei);
        if (!nanc(a) && !nanc(b)) d = std::max(d, std::abs(a - b));
      }
    diffs.emplace_back(std::round(-std::log2(t)), d);
  }
  std::sort(diffs.begin(), diffs.end());
  if (!diffs.empty()) {
    double last = diffs.back().second;  // smallest t
    if (last > std::min(tol, 1e-10) * scale) {
      // require a decreasing dyadic tail: fit log2 diff against k
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = diffs.size() / 2; i < diffs.size(); ++i)
        pts.emplace_back(diffs[i].first,
                         std::log2(std::max(diffs[i].second, 1e-300)));
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      double n = static_cast<double>(pts.size());
      double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      if (!(slope <= -0.5))
        throw DomainError(
            "dyadic slices do not converge to the t=0 slice (fitted slope " +
            std::to_string(slope) + ")");
    }
  }
  return p0;
}

SymbolSlice compose_slices(const SymbolSlice& A, const SymbolSlice& B) {
  if (A.egrid.sizes != B.egrid.sizes)
    throw GridError("slices live on different grids");
  if (A.xgrid.sizes != B.xgrid.sizes && A.nx() != 1 && B.nx() != 1)
    throw GridError("slices live on different grids");
  const TorusGrid& grid = A.egrid;
  const std::size_t N = grid.total();
  auto KA = kernel_from_slice(A);
  auto KB = kernel_from_slice(B);
  std::vector<cplx> KC(N * N);
  compose_kernel_matrices(N, grid.cell_volume(), KA.data(), KB.data(),
                          KC.data());
  // trivial x-grids broadcast; the product is x-independent only if both are
  SymbolSlice out{A.nx() == 1 ? B.xgrid : A.xgrid, A.egrid, A.weights,
                  A.weight + B.weight, {}};
  const std::size_t nx = A.nx() == 1 && B.nx() == 1 ? 1 : N;
  out.values.assign(nx * N, cplx(0));
  parallel_for(static_cast<std::int64_t>(nx), [&](std::int64_t xi) {
    std::size_t i = nx == 1 ? 0 : static_cast<std::size_t>(xi);
    auto ii = grid.unflatten(i);
    std::vector<cplx> u(N);
    for (std::size_t j = 0; j < N; ++j) {
      auto jj = grid.unflatten(j);
      std::vector<int> ll(grid.dim());
      for (int a = 0; a < grid.dim(); ++a)
        ll[a] = (ii[a] - jj[a] + grid.sizes[a]) % grid.sizes[a];
      u[j] = KC[i * N + grid.flatten(ll)];
    }
    kernel_to_symbol(grid, u);
    std::copy(u.begin(), u.end(), out.values.begin() + xi * N);
  });
  return out;
}

SymbolSlice slice_difference(const SymbolSlice& A, const SymbolSlice& B) {
  if (A.values.size() != B.values.size())
    throw GridError("slice shapes differ");
  SymbolSlice out = A;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] -= B.values[i];
  return out;
}

double reality_defect(const SymbolFamily& S) {
  double m = 0;
  for (int ti = 0; ti < S.nt(); ++ti)
    for (std::size_t ei = 0; ei < S.ne(); ++ei) {
      auto idx = S.egrid.unflatten(ei);
      std::vector<int> neg(idx.size());
      bool ok = true;
      for (int a = 0; a < S.egrid.dim(); ++a) {
        long f = -S.egrid.freq_of_index(a, idx[a]);
        if (!S.egrid.freq_in_range(a, f)) {
          ok = false;
          break;
        }
        neg[a] = static_cast<int>(S.egrid.index_of_freq(a, f));
      }
      if (!ok) continue;
      std::size_t en = S.egrid.flatten(neg);
      for (std::size_t xi = 0; xi < S.nx(); ++xi) {
        const cplx &zp = S.at(ti, xi, ei), &zn = S.at(ti, xi, en);
        if (nanc(zp) || nanc(zn)) continue;
        m = std::max(m, std::abs(zn - std::conj(zp)));
      }
    }
  return m;
}

}  // namespace osc
