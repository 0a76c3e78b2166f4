#pragma once
// Lloyd's k-means with k-means++ seeding.  Deterministic for a given seed:
// nearest-centroid ties break to the lowest centroid index, an emptied
// cluster is re-seeded to the point farthest from its assigned centroid, and
// iteration stops when the largest centroid move drops below tol (or at
// max_iter).  The assignment pass is OpenMP-parallel; per-point work is
// independent, so results do not depend on the thread count.

#include <cstdint>
#include <vector>

#include "covaudit/matrix.hpp"

namespace covaudit {

struct KMeansResult {
  Matrix centroids;             // k x d
  std::vector<int> assignment;  // point -> centroid index
  int iterations = 0;
};

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                    int max_iter = 100, double tol = 1e-4);

// Nearest centroid of a single point (lowest index wins ties).
int nearest_centroid(const Matrix& centroids, const double* point);

// Fourth-root cluster-count rule: max(1, floor(m^(1/4))).
int fourth_root_clusters(std::size_t m);

}  // namespace covaudit
