#pragma once
// Plain single-threaded implementations of the parallel kernels.  They follow
// the same documented tie/seed rules as the production code but are written
// as straight loops; tests pin the OpenMP kernels against them and the
// bench_kernels tool times the two side by side.

#include <cstdint>
#include <vector>

#include "covaudit/matrix.hpp"

namespace covaudit::reference {

// Worst-slab coverage; each window's coverage is recomputed by division.
double wsc(const Matrix& design, const std::vector<int>& z, double delta,
           int n_directions, std::uint64_t seed);

// HSIC sqrt statistic via the explicit centering matrix H and two O(n^3)
// multiplications of trace(K H L H).
double hsic(const std::vector<double>& a, const std::vector<double>& b);

// Lloyd k-means, serial assignment and update.
struct KMeansRef {
  Matrix centroids;
  std::vector<int> assignment;
};
KMeansRef kmeans(const Matrix& points, int k, std::uint64_t seed,
                 int max_iter = 100, double tol = 1e-4);

}  // namespace covaudit::reference
