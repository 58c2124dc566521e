#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "osc/grid.hpp"

using namespace osc;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(u(rng), u(rng));
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("fft matches the naive dft") {
  for (std::size_t n : {8u, 32u, 64u}) {
    auto v = random_vec(n, 11 + static_cast<unsigned>(n));
    auto want = ref::dft(v, false);
    std::vector<cplx> got = v;
    fft_inplace(got, false);
    CHECK(max_diff(got, want) < 1e-11);
    auto want_inv = ref::dft(v, true);
    got = v;
    fft_inplace(got, true);
    CHECK(max_diff(got, want_inv) < 1e-11);
  }
  std::vector<cplx> bad(6);
  CHECK_THROWS_AS(fft_inplace(bad, false), GridError);
}

TEST_CASE("kernel/symbol transforms are mutually inverse") {
  for (TorusGrid grid :
       {TorusGrid{{64}}, TorusGrid{{16, 16}}, TorusGrid{{8, 8, 8}}}) {
    auto v = random_vec(grid.total(), 5);
    auto w = v;
    kernel_to_symbol(grid, w);
    symbol_to_kernel(grid, w);
    CHECK(max_diff(v, w) < 1e-12);
  }
}

TEST_CASE("pure oscillation transforms to a single lattice point") {
  TorusGrid grid{{64}};
  const int m = 5;
  std::vector<cplx> u(grid.total());
  for (int j = 0; j < grid.sizes[0]; ++j) {
    double x = grid.coord(0, j);
    u[j] = cplx(std::cos(m * x), std::sin(m * x));
  }
  kernel_to_symbol(grid, u);
  for (int i = 0; i < grid.sizes[0]; ++i) {
    double want = grid.freq_of_index(0, i) == m ? grid.period : 0.0;
    CHECK(std::abs(u[i] - cplx(want, 0)) < 1e-10);
  }
}

TEST_CASE("derivative becomes multiplication by i f") {
  TorusGrid grid{{32}};
  std::vector<cplx> u(grid.total()), du(grid.total());
  for (int j = 0; j < grid.sizes[0]; ++j) {
    double x = grid.coord(0, j);
    u[j] = std::cos(3 * x) + 0.5 * std::sin(7 * x);
    du[j] = -3 * std::sin(3 * x) + 3.5 * std::cos(7 * x);
  }
  kernel_to_symbol(grid, u);
  kernel_to_symbol(grid, du);
  for (int i = 0; i < grid.sizes[0]; ++i) {
    cplx want = cplx(0, grid.freq_of_index(0, i)) * u[i];
    CHECK(std::abs(du[i] - want) < 1e-9);
  }
}

TEST_CASE("2d transform matches a direct double sum") {
  TorusGrid grid{{8, 8}};
  auto u = random_vec(grid.total(), 3);
  auto got = u;
  kernel_to_symbol(grid, got);
  for (int i0 = 0; i0 < 8; ++i0)
    for (int i1 = 0; i1 < 8; ++i1) {
      int f0 = grid.freq_of_index(0, i0), f1 = grid.freq_of_index(1, i1);
      cplx acc = 0;
      for (int j0 = 0; j0 < 8; ++j0)
        for (int j1 = 0; j1 < 8; ++j1) {
          double ph = -(f0 * grid.coord(0, j0) + f1 * grid.coord(1, j1));
          acc += u[j0 * 8 + j1] * cplx(std::cos(ph), std::sin(ph));
        }
      acc *= grid.cell_volume();
      CHECK(std::abs(got[i0 * 8 + i1] - acc) < 1e-10);
    }
}

TEST_CASE("batched transform equals blockwise serial transform bit for bit") {
  TorusGrid grid{{32}};
  const int batch = 24;
  auto v = random_vec(grid.total() * batch, 17);
  auto serial = v;
  for (int b = 0; b < batch; ++b)
    kernel_to_symbol(grid, std::span<cplx>(serial.data() + b * grid.total(),
                                           grid.total()));
  auto parallel = v;
  kernel_to_symbol_batch(grid, parallel);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(parallel[i] == serial[i]);
}

TEST_CASE("parallel kernel composition is bit-identical to the reference") {
  const std::size_t n = 48;
  const double h = 0.1;
  auto A = random_vec(n * n, 7);
  auto B = random_vec(n * n, 8);
  std::vector<cplx> C1(n * n), C2(n * n);
  compose_kernel_matrices(n, h, A.data(), B.data(), C1.data());
  ref::compose_kernel_matrices(n, h, A.data(), B.data(), C2.data());
  for (std::size_t i = 0; i < n * n; ++i) CHECK(C1[i] == C2[i]);
}

TEST_CASE("kernel composition diagonalizes convolutions") {
  // translation-invariant kernels K(x,y) = k(x-y): composition of matrices
  // multiplies the symbols.
  TorusGrid grid{{32}};
  const std::size_t G = grid.total();
  const double h = grid.h(0);
  auto sym_of = [&](const std::vector<double>& fc) {
    std::vector<cplx> k(G);
    for (std::size_t j = 0; j < G; ++j) {
      double u = grid.coord(0, static_cast<int>(j));
      double s = 0;
      for (std::size_t m = 0; m < fc.size(); ++m) s += fc[m] * std::cos(m * u);
      k[j] = s;
    }
    return k;
  };
  auto ka = sym_of({1.0, 0.5, 0.25});
  auto kb = sym_of({0.2, -0.3, 0.0, 0.7});
  auto build = [&](const std::vector<cplx>& k) {
    std::vector<cplx> M(G * G);
    for (std::size_t i = 0; i < G; ++i)
      for (std::size_t j = 0; j < G; ++j)
        M[i * G + j] = k[(i + G - j) % G];
    return M;
  };
  auto A = build(ka), B = build(kb);
  std::vector<cplx> C(G * G);
  compose_kernel_matrices(G, h, A.data(), B.data(), C.data());
  // first column of C is the composed convolution kernel at y = 0
  std::vector<cplx> kc(G);
  for (std::size_t i = 0; i < G; ++i) kc[i] = C[i * G];
  auto sa = ka, sb = kb, sc = kc;
  kernel_to_symbol(grid, sa);
  kernel_to_symbol(grid, sb);
  kernel_to_symbol(grid, sc);
  for (std::size_t i = 0; i < G; ++i)
    CHECK(std::abs(sc[i] - sa[i] * sb[i]) < 1e-9);
}

TEST_CASE("lattice homogeneous norm values and dilation scaling") {
  std::vector<int> w{1, 1, 2};
  CHECK(lattice_norm_H(w, {3, 0, 0}) == doctest::Approx(3.0));
  CHECK(lattice_norm_H(w, {0, 0, 4}) == doctest::Approx(2.0));
  CHECK(lattice_norm_H(w, {0, 0, -4}) == doctest::Approx(2.0));
  CHECK(lattice_norm_H({1, 1}, {3, 4}) == doctest::Approx(5.0));
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> eta{u(rng), u(rng), u(rng)};
    double base = lattice_norm_H(w, eta);
    for (double lam : {2.0, 4.0, 0.5}) {
      std::vector<double> de(3);
      for (int j = 0; j < 3; ++j) de[j] = std::pow(lam, w[j]) * eta[j];
      CHECK(lattice_norm_H(w, de) == doctest::Approx(lam * base).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(lattice_norm_H(w, {1.0}), GridError);
}
