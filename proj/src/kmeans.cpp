#include "covaudit/kmeans.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "covaudit/rng.hpp"

namespace covaudit {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

// k-means++: first centroid uniform, then D^2 sampling.  When every point
// coincides with a chosen centroid (total weight 0), take the lowest-index
// point not yet chosen so initialization still terminates deterministically.
Matrix init_plus_plus(const Matrix& pts, int k, Rng& rng) {
  const std::size_t n = pts.rows, d = pts.cols;
  Matrix cent(std::size_t(k), d);
  std::vector<std::size_t> chosen;
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());

  std::size_t first = std::size_t(rng.uniform_int(n));
  chosen.push_back(first);
  for (std::size_t j = 0; j < d; ++j) cent.at(0, j) = pts.at(first, j);

  for (int c = 1; c < k; ++c) {
    const double* last = cent.row(std::size_t(c - 1));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = sq_dist(pts.row(i), last, d);
      if (d2 < dist2[i]) dist2[i] = d2;
      total += dist2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = rng.uniform01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      bool found = false;
      for (std::size_t i = 0; i < n && !found; ++i) {
        bool used = false;
        for (std::size_t s : chosen) used = used || s == i;
        if (!used) {
          pick = i;
          found = true;
        }
      }
      if (!found) pick = 0;  // fewer distinct points than clusters
    }
    chosen.push_back(pick);
    for (std::size_t j = 0; j < d; ++j)
      cent.at(std::size_t(c), j) = pts.at(pick, j);
  }
  return cent;
}

}  // namespace

int nearest_centroid(const Matrix& centroids, const double* point) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    double d2 = sq_dist(centroids.row(c), point, centroids.cols);
    if (d2 < best_d) {  // strict: ties keep the lowest index
      best_d = d2;
      best = int(c);
    }
  }
  return best;
}

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                    int max_iter, double tol) {
  const std::size_t n = points.rows, d = points.cols;
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (n == 0) throw std::invalid_argument("kmeans: no points");
  if (std::size_t(k) > n)
    throw std::invalid_argument("kmeans: k exceeds the number of points");

  Rng rng(seed);
  KMeansResult res;
  res.centroids = init_plus_plus(points, k, rng);
  res.assignment.assign(n, 0);

  std::vector<double> sums(std::size_t(k) * d, 0.0);
  std::vector<std::size_t> counts(std::size_t(k), 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)n; ++i)
      res.assignment[std::size_t(i)] =
          nearest_centroid(res.centroids, points.row(std::size_t(i)));

    // Serial accumulation in row order keeps the update independent of the
    // thread count.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t c = std::size_t(res.assignment[i]);
      ++counts[c];
      const double* p = points.row(i);
      double* s = sums.data() + c * d;
      for (std::size_t j = 0; j < d; ++j) s[j] += p[j];
    }

    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      double* ct = res.centroids.row(std::size_t(c));
      if (counts[std::size_t(c)] > 0) {
        double shift2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          double nv = sums[std::size_t(c) * d + j] / double(counts[std::size_t(c)]);
          double diff = nv - ct[j];
          shift2 += diff * diff;
          ct[j] = nv;
        }
        max_shift = std::max(max_shift, std::sqrt(shift2));
      } else {
        // Re-seed an emptied cluster to the point farthest from its current
        // centroid (highest distance, lowest index on ties).
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double d2 = sq_dist(
              points.row(i),
              res.centroids.row(std::size_t(res.assignment[i])), d);
          if (d2 > far_d) {
            far_d = d2;
            far = i;
          }
        }
        double shift2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          double diff = points.at(far, j) - ct[j];
          shift2 += diff * diff;
          ct[j] = points.at(far, j);
        }
        max_shift = std::max(max_shift, std::sqrt(shift2));
      }
    }
    if (max_shift < tol) break;
  }

  // Final assignment against the converged centroids.
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; ++i)
    res.assignment[std::size_t(i)] =
        nearest_centroid(res.centroids, points.row(std::size_t(i)));
  return res;
}

int fourth_root_clusters(std::size_t m) {
  int k = int(std::floor(std::pow(double(m), 0.25) + 1e-9));
  return k < 1 ? 1 : k;
}

}  // namespace covaudit
