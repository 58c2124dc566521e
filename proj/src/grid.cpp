#include "osc/grid.hpp"

#include <cmath>
#include <numeric>

#include "osc/parallel.hpp"

namespace osc {

namespace {

bool power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr double kPi = 3.1415926535897932384626433832795;

// One output row of C = h * A * B; shared by the parallel kernel and the
// serial reference so the two are bit-identical.
void compose_row(std::size_t i, std::size_t n, double h, const cplx* A,
                 const cplx* B, cplx* C) {
  for (std::size_t j = 0; j < n; ++j) {
    cplx acc = 0;
    for (std::size_t k = 0; k < n; ++k) acc += A[i * n + k] * B[k * n + j];
    C[i * n + j] = h * acc;
  }
}

}  // namespace

void fft_inplace(std::span<cplx> data, bool inverse) {
  const std::size_t n = data.size();
  if (!power_of_two(n)) throw GridError("fft size must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2 : -2) * kPi / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w = 1;
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = data[i + k];
        cplx v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

namespace {

// Transform every line of the block along one axis.  shift=true converts
// standard DFT output order (k = 0..G-1) to ascending frequency order
// (f = i - G/2) on the way out; for the inverse the permutation is applied
// on the way in.
void axis_transform(std::span<cplx> block, const TorusGrid& grid, int axis,
                    bool inverse) {
  const int G = grid.sizes[axis];
  std::size_t stride = 1;
  for (int a = axis + 1; a < grid.dim(); ++a) stride *= grid.sizes[a];
  const std::size_t total = grid.total();
  const std::size_t lines = total / G;
  std::vector<cplx> buf(G);
  for (std::size_t line = 0; line < lines; ++line) {
    const std::size_t inner = line % stride;
    const std::size_t outer = line / stride;
    const std::size_t base = outer * stride * G + inner;
    if (inverse) {
      for (int k = 0; k < G; ++k)
        buf[k] = block[base + ((k + G / 2) % G) * stride];
      fft_inplace(buf, true);
      for (int j = 0; j < G; ++j) block[base + j * stride] = buf[j];
    } else {
      for (int j = 0; j < G; ++j) buf[j] = block[base + j * stride];
      fft_inplace(buf, false);
      for (int i = 0; i < G; ++i)
        block[base + i * stride] = buf[(i + G / 2) % G];
    }
  }
}

}  // namespace

void kernel_to_symbol(const TorusGrid& grid, std::span<cplx> block) {
  if (block.size() != grid.total())
    throw GridError("block size does not match grid");
  for (int a = 0; a < grid.dim(); ++a) axis_transform(block, grid, a, false);
  const double scale = grid.cell_volume();
  for (auto& z : block) z *= scale;
}

void symbol_to_kernel(const TorusGrid& grid, std::span<cplx> block) {
  if (block.size() != grid.total())
    throw GridError("block size does not match grid");
  for (int a = 0; a < grid.dim(); ++a) axis_transform(block, grid, a, true);
  const double scale = 1.0 / grid.volume();
  for (auto& z : block) z *= scale;
}

void kernel_to_symbol_batch(const TorusGrid& grid, std::vector<cplx>& values) {
  const std::size_t n = grid.total();
  if (values.size() % n != 0)
    throw GridError("batch size is not a multiple of the grid size");
  const std::int64_t batch = static_cast<std::int64_t>(values.size() / n);
  parallel_for(batch, [&](std::int64_t b) {
    kernel_to_symbol(grid, std::span<cplx>(values.data() + b * n, n));
  });
}

void symbol_to_kernel_batch(const TorusGrid& grid, std::vector<cplx>& values) {
  const std::size_t n = grid.total();
  if (values.size() % n != 0)
    throw GridError("batch size is not a multiple of the grid size");
  const std::int64_t batch = static_cast<std::int64_t>(values.size() / n);
  parallel_for(batch, [&](std::int64_t b) {
    symbol_to_kernel(grid, std::span<cplx>(values.data() + b * n, n));
  });
}

void compose_kernel_matrices(std::size_t n, double h, const cplx* A,
                             const cplx* B, cplx* C) {
  parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t i) {
    compose_row(static_cast<std::size_t>(i), n, h, A, B, C);
  });
}

double lattice_norm_H(const std::vector<int>& weights,
                      const std::vector<double>& eta) {
  if (weights.size() != eta.size())
    throw GridError("weights/eta dimension mismatch");
  long L = 1;
  for (int d : weights) L = std::lcm(L, static_cast<long>(d));
  double s = 0;
  for (std::size_t j = 0; j < eta.size(); ++j)
    s += std::pow(std::abs(eta[j]), 2.0 * L / weights[j]);
  return std::pow(s, 1.0 / (2.0 * L));
}

namespace ref {

std::vector<cplx> dft(const std::vector<cplx>& in, bool inverse) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double ang = (inverse ? 2 : -2) * kPi * static_cast<double>(k) *
                   static_cast<double>(j) / static_cast<double>(n);
      acc += in[j] * cplx(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

void compose_kernel_matrices(std::size_t n, double h, const cplx* A,
                             const cplx* B, cplx* C) {
  for (std::size_t i = 0; i < n; ++i) compose_row(i, n, h, A, B, C);
}

}  // namespace ref

}  // namespace osc
