#include "covaudit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "covaudit/rng.hpp"

namespace covaudit::reference {

double wsc(const Matrix& design, const std::vector<int>& z, double delta,
           int n_directions, std::uint64_t seed) {
  const std::size_t n = design.rows, d = design.cols;
  if (n != z.size() || n == 0) throw std::invalid_argument("reference::wsc: bad input");
  if (!(delta > 0.0) || delta * double(n) < 1.0)
    throw std::invalid_argument("reference::wsc: delta*n must be at least 1");
  const std::size_t len = std::size_t(std::ceil(delta * double(n)));

  Rng rng(seed);
  double result = 1.0;
  std::vector<double> dir(d), proj(n);
  std::vector<std::size_t> order(n);
  for (int k = 0; k < n_directions; ++k) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dir[j] = rng.normal();
      norm2 += dir[j] * dir[j];
    }
    double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
    for (std::size_t j = 0; j < d; ++j) dir[j] *= inv;

    for (std::size_t i = 0; i < n; ++i) {
      double p = 0.0;
      for (std::size_t j = 0; j < d; ++j) p += dir[j] * design.at(i, j);
      proj[i] = p;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      prefix[i + 1] = prefix[i] + double(z[order[i]]);
    for (std::size_t s = 0; s + len <= n; ++s)
      for (std::size_t e = s + len; e <= n; ++e) {
        double c = (prefix[e] - prefix[s]) / double(e - s);
        if (c < result) result = c;
      }
  }
  return result;
}

double hsic(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n == 0 || b.size() != n) throw std::invalid_argument("reference::hsic: bad input");

  auto median_dist = [](const std::vector<double>& v) {
    std::vector<double> d;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j)
        d.push_back(std::abs(v[i] - v[j]));
    if (d.empty()) return 0.0;
    std::sort(d.begin(), d.end());
    return d[(d.size() - 1) / 2];
  };
  auto kernel = [&](const std::vector<double>& v, double sigma) {
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double diff = v[i] - v[j];
        k.at(i, j) = std::exp(-diff * diff / (2.0 * sigma * sigma));
      }
    return k;
  };

  double sa = median_dist(a), sb = median_dist(b);
  if (sa <= 0.0) sa = 1.0;
  if (sb <= 0.0) sb = 1.0;
  Matrix k = kernel(a, sa), l = kernel(b, sb);

  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h.at(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / double(n);

  auto matmul = [&](const Matrix& x, const Matrix& y) {
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t jj = 0; jj < n; ++jj) {
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) s += x.at(i, t) * y.at(t, jj);
        r.at(i, jj) = s;
      }
    return r;
  };
  Matrix khl = matmul(matmul(k, h), matmul(l, h));
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += khl.at(i, i);
  double stat = tr / (double(n) * double(n));
  return std::sqrt(std::max(stat, 0.0));
}

KMeansRef kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter,
                 double tol) {
  const std::size_t n = points.rows, d = points.cols;
  if (k < 1 || n == 0 || std::size_t(k) > n)
    throw std::invalid_argument("reference::kmeans: bad input");

  auto sq = [&](const double* a, const double* b) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double diff = a[j] - b[j];
      s += diff * diff;
    }
    return s;
  };

  Rng rng(seed);
  Matrix cent(std::size_t(k), d);
  std::vector<std::size_t> chosen{std::size_t(rng.uniform_int(n))};
  for (std::size_t j = 0; j < d; ++j) cent.at(0, j) = points.at(chosen[0], j);
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = sq(points.row(i), cent.row(std::size_t(c - 1)));
      if (d2 < dist2[i]) dist2[i] = d2;
      total += dist2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = rng.uniform01() * total, acc = 0.0;
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
    }
    chosen.push_back(pick);
    for (std::size_t j = 0; j < d; ++j)
      cent.at(std::size_t(c), j) = points.at(pick, j);
  }

  KMeansRef res;
  res.assignment.assign(n, 0);
  auto assign = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d2 = sq(points.row(i), cent.row(std::size_t(c)));
        if (d2 < bd) {
          bd = d2;
          best = c;
        }
      }
      res.assignment[i] = best;
    }
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    assign();
    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      std::vector<double> mean(d, 0.0);
      std::size_t cnt = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (res.assignment[i] == c) {
          ++cnt;
          for (std::size_t j = 0; j < d; ++j) mean[j] += points.at(i, j);
        }
      double shift2 = 0.0;
      if (cnt > 0) {
        for (std::size_t j = 0; j < d; ++j) {
          mean[j] /= double(cnt);
          double diff = mean[j] - cent.at(std::size_t(c), j);
          shift2 += diff * diff;
          cent.at(std::size_t(c), j) = mean[j];
        }
      } else {
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double d2 =
              sq(points.row(i), cent.row(std::size_t(res.assignment[i])));
          if (d2 > far_d) {
            far_d = d2;
            far = i;
          }
        }
        for (std::size_t j = 0; j < d; ++j) {
          double diff = points.at(far, j) - cent.at(std::size_t(c), j);
          shift2 += diff * diff;
          cent.at(std::size_t(c), j) = points.at(far, j);
        }
      }
      max_shift = std::max(max_shift, std::sqrt(shift2));
    }
    if (max_shift < tol) break;
  }
  assign();
  res.centroids = std::move(cent);
  return res;
}

}  // namespace covaudit::reference
