// Timing comparison of the OpenMP kernels against their serial reference
// implementations, with agreement checks on the same inputs.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "osc/grid.hpp"
#include "osc/parallel.hpp"

using namespace osc;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

std::vector<cplx> random_block(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(u(rng), u(rng));
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

int main() {
  std::mt19937_64 rng(12345);
  std::printf("workers: %d\n", worker_count());
  std::printf("%-28s %10s %10s %8s %12s\n", "kernel", "serial_ms",
              "parallel_ms", "speedup", "max_diff");

  {
    // batched fibrewise transform: 256 blocks of a 256-point grid
    TorusGrid g{{256}};
    const int batch = 256;
    auto data = random_block(g.total() * batch, rng);
    auto ser = data;
    double t0 = now_ms();
    for (int b = 0; b < batch; ++b) {
      std::vector<cplx> blk(ser.begin() + b * 256, ser.begin() + (b + 1) * 256);
      blk = ref::dft(blk, false);
      double cv = g.cell_volume();
      // match kernel_to_symbol's frequency ordering and normalization
      for (int i = 0; i < 256; ++i) {
        int f = g.freq_of_index(0, i);
        ser[b * 256 + i] = cv * blk[(f + 256) % 256];
      }
    }
    double t1 = now_ms();
    auto par = data;
    kernel_to_symbol_batch(g, par);
    double t2 = now_ms();
    std::printf("%-28s %10.2f %10.2f %8.2f %12.3e\n", "kernel_to_symbol x256",
                t1 - t0, t2 - t1, (t1 - t0) / std::max(t2 - t1, 1e-9),
                max_diff(ser, par));
  }

  {
    // grid operator composition, 512 x 512 kernel matrices
    const std::size_t n = 512;
    const double h = 2 * 3.141592653589793 / n;
    auto A = random_block(n * n, rng);
    auto B = random_block(n * n, rng);
    std::vector<cplx> Cs(n * n), Cp(n * n);
    double t0 = now_ms();
    ref::compose_kernel_matrices(n, h, A.data(), B.data(), Cs.data());
    double t1 = now_ms();
    compose_kernel_matrices(n, h, A.data(), B.data(), Cp.data());
    double t2 = now_ms();
    std::printf("%-28s %10.2f %10.2f %8.2f %12.3e\n", "compose_kernels 512",
                t1 - t0, t2 - t1, (t1 - t0) / std::max(t2 - t1, 1e-9),
                max_diff(Cs, Cp));
  }
  return 0;
}
