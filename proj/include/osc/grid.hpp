#pragma once

#include <complex>
#include <span>
#include <vector>

#include "osc/error.hpp"

namespace osc {

using cplx = std::complex<double>;

/// Periodic grid on a torus (R/period)^dim, one power-of-two size per axis.
/// Kernel-side index j on axis a sits at j*h, identified with the
/// fundamental domain [-period/2, period/2).  Frequency-side index i on an
/// axis of size G carries the integer frequency i - G/2 (ascending order).
struct TorusGrid {
  std::vector<int> sizes;
  double period = 6.283185307179586476925286766559;  // 2 pi

  int dim() const { return static_cast<int>(sizes.size()); }
  std::size_t total() const {
    std::size_t n = 1;
    for (int g : sizes) n *= g;
    return n;
  }
  double h(int axis) const { return period / sizes[axis]; }
  double cell_volume() const {
    double v = 1;
    for (int a = 0; a < dim(); ++a) v *= h(a);
    return v;
  }
  double volume() const {
    double v = 1;
    for (int a = 0; a < dim(); ++a) v *= period;
    return v;
  }
  /// Coordinate of kernel index idx, mapped to [-period/2, period/2).
  double coord(int axis, int idx) const {
    double c = idx * h(axis);
    if (c >= period / 2) c -= period;
    return c;
  }
  int freq_of_index(int axis, int idx) const { return idx - sizes[axis] / 2; }
  bool freq_in_range(int axis, long f) const {
    return f >= -sizes[axis] / 2 && f < sizes[axis] / 2;
  }
  std::size_t index_of_freq(int axis, long f) const {
    return static_cast<std::size_t>(f + sizes[axis] / 2);
  }

  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> idx(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % sizes[a]);
      flat /= sizes[a];
    }
    return idx;
  }
  std::size_t flatten(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat = flat * sizes[a] + idx[a];
    return flat;
  }
};

/// In-place radix-2 FFT, n a power of two.  inverse=true applies the
/// conjugate transform without the 1/n factor.
void fft_inplace(std::span<cplx> data, bool inverse);

/// Fibrewise transform of one kernel block (n-dim, row-major) into the
/// symbol storage order:  symbol(f) = cell_volume * sum_j u(xi_j) e^{-i f.xi_j}.
void kernel_to_symbol(const TorusGrid& grid, std::span<cplx> block);
/// Inverse of kernel_to_symbol.
void symbol_to_kernel(const TorusGrid& grid, std::span<cplx> block);

/// Batched transforms: values holds `batch` consecutive blocks of
/// grid.total() entries; blocks are processed in parallel.
void kernel_to_symbol_batch(const TorusGrid& grid, std::vector<cplx>& values);
void symbol_to_kernel_batch(const TorusGrid& grid, std::vector<cplx>& values);

/// Operator composition on the grid: kernels as G x G matrices acting by
/// (Af)(x) = h * sum_y K(x,y) f(y); C = h * A * B.  OpenMP across rows,
/// fixed-order inner summation.
void compose_kernel_matrices(std::size_t n, double h, const cplx* A,
                             const cplx* B, cplx* C);

/// Homogeneous norm of a frequency vector for dual weights d_j.
double lattice_norm_H(const std::vector<int>& weights,
                      const std::vector<double>& eta);

/// Serial reference implementations used to pin down the parallel kernels.
namespace ref {
std::vector<cplx> dft(const std::vector<cplx>& in, bool inverse);
void compose_kernel_matrices(std::size_t n, double h, const cplx* A,
                             const cplx* B, cplx* C);
}  // namespace ref

}  // namespace osc
