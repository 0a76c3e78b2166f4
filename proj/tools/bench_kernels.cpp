// bench_kernels: times the OpenMP kernels against the plain serial
// implementations in covaudit::reference and checks that the two agree.
// wsc and kmeans must match exactly (their floating-point operations are
// identical, only scheduled differently); hsic sums in a different order, so
// it is compared to 1e-9.
//
//   bench_kernels [--n 1200] [--d 8] [--directions 100] [--reps 3] [--seed 0]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covaudit/kmeans.hpp"
#include "covaudit/matrix.hpp"
#include "covaudit/metrics.hpp"
#include "covaudit/parallel.hpp"
#include "covaudit/reference.hpp"
#include "covaudit/rng.hpp"

namespace {

using namespace covaudit;

// Best-of-reps wall time in milliseconds; the result of the last run lands in
// `out` so the two sides can be compared.
double time_ms(int reps, const std::function<double()>& fn, double& out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    out = fn();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool report(const char* kernel, double serial_ms, double parallel_ms,
            bool agree) {
  std::printf("%-8s %10.1f ms %10.1f ms   speedup %.2fx   %s\n", kernel,
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              agree ? "agree" : "MISMATCH");
  return agree;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  std::size_t n = 1200, d = 8;
  int directions = 100, reps = 3;
  std::uint64_t seed = 0;
  CLI::App app{"serial-vs-parallel kernel benchmark"};
  app.add_option("--n", n, "rows");
  app.add_option("--d", d, "feature dimension");
  app.add_option("--directions", directions, "WSC directions");
  app.add_option("--reps", reps, "repetitions (best-of)");
  app.add_option("--seed", seed, "RNG seed");
  CLI11_PARSE(app, argc, argv);

  std::printf("n=%zu d=%zu directions=%d reps=%d threads=%d\n", n, d,
              directions, reps, max_threads());

  Rng rng(seed);
  Matrix design(n, d);
  std::vector<int> z(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) design.at(i, j) = rng.normal();
    v[i] = rng.uniform(0.0, 4.0);
    z[i] = rng.uniform01() < 0.85 + 0.03 * design.at(i, 0) ? 1 : 0;
  }

  double a = 0.0, b = 0.0;
  bool ok = true;

  double s_ms = time_ms(reps, [&] {
    return reference::wsc(design, z, 0.25, directions, seed);
  }, a);
  double p_ms = time_ms(reps, [&] {
    return wsc(design, z, 0.25, directions, seed);
  }, b);
  ok = report("wsc", s_ms, p_ms, a == b) && ok;

  // Serial reference builds explicit H and multiplies matrices; cap n so the
  // O(n^3) side stays in budget.
  std::size_t hn = std::min<std::size_t>(n, 600);
  std::vector<double> az(hn), av(v.begin(), v.begin() + long(hn));
  for (std::size_t i = 0; i < hn; ++i) az[i] = double(z[i]);
  s_ms = time_ms(reps, [&] { return reference::hsic(az, av); }, a);
  p_ms = time_ms(reps, [&] { return hsic_dependence(
      std::vector<int>(z.begin(), z.begin() + long(hn)), av, hn, seed); }, b);
  ok = report("hsic", s_ms, p_ms, std::abs(a - b) <= 1e-9) && ok;

  const int k = 8;
  reference::KMeansRef ref;
  s_ms = time_ms(reps, [&] {
    ref = reference::kmeans(design, k, seed);
    return double(ref.assignment.back());
  }, a);
  KMeansResult prod;
  p_ms = time_ms(reps, [&] {
    prod = kmeans(design, k, seed);
    return double(prod.assignment.back());
  }, b);
  bool same = ref.assignment == prod.assignment &&
              ref.centroids.data == prod.centroids.data;
  ok = report("kmeans", s_ms, p_ms, same) && ok;

  return ok ? 0 : 1;
}
