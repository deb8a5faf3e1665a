// Timing comparison of the OpenMP kernels against their serial references.
// Run with OMP_NUM_THREADS=k ./bench_kernels [repeats].

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

#include "granular/kernels.hpp"

namespace {

using granular::kernels::make_conv_table;

double time_of(int repeats, const std::function<void()>& fn) {
  fn();  // warm up
  const double t0 = omp_get_wtime();
  for (int r = 0; r < repeats; ++r) fn();
  return (omp_get_wtime() - t0) / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  std::printf("threads=%d repeats=%d\n", omp_get_max_threads(), repeats);
  std::printf("%-28s %8s %12s %12s %8s\n", "kernel", "size", "serial[ms]", "openmp[ms]",
              "speedup");

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto cubic = [](double d) { return std::abs(d) * d * d; };

  for (int m : {400, 1600, 6400}) {
    const double dx = 20.0 / m;
    std::vector<double> rho(m);
    for (double& r : rho) r = unif(gen);
    const std::vector<double> tbl = make_conv_table(cubic, m, dx);
    std::vector<double> out;
    const double ts = time_of(repeats, [&] { granular::kernels::serial::lattice_convolve(tbl, rho, dx, out); });
    const double tp = time_of(repeats, [&] { granular::kernels::lattice_convolve(tbl, rho, dx, out); });
    std::printf("%-28s %8d %12.3f %12.3f %8.2f\n", "lattice_convolve", m, ts * 1e3, tp * 1e3,
                ts / tp);
  }

  const auto grad = [](double d) { return 3.0 * std::abs(d) * d; };
  for (int n : {1000, 4000, 16000}) {
    std::vector<double> x(n), f;
    for (double& xi : x) xi = 4.0 * unif(gen) - 2.0;
    const double ts = time_of(repeats, [&] { granular::kernels::serial::pairwise_forces(grad, x, f); });
    const double tp = time_of(repeats, [&] { granular::kernels::pairwise_forces(grad, x, f); });
    std::printf("%-28s %8d %12.3f %12.3f %8.2f\n", "pairwise_forces", n, ts * 1e3, tp * 1e3,
                ts / tp);
  }

  for (int n : {1000, 4000, 16000}) {
    std::vector<double> x(n), f;
    for (double& xi : x) xi = 4.0 * unif(gen) - 2.0;
    const double ts = time_of(repeats, [&] { granular::kernels::serial::pairwise_forces(grad, x, f); });
    const double tp = time_of(repeats, [&] { granular::kernels::pairwise_forces_cubic(x, f); });
    std::printf("%-28s %8d %12.3f %12.3f %8.2f\n", "pairwise_forces_cubic", n, ts * 1e3, tp * 1e3,
                ts / tp);
  }
  return 0;
}
