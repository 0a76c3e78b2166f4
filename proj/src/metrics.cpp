#include "covaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "covaudit/kmeans.hpp"
#include "covaudit/rng.hpp"
#include "covaudit/standardize.hpp"

namespace covaudit {

GroupAssignment groups_from_kmeans(const Dataset& ds, int clusters,
                                   std::uint64_t seed) {
  DesignMatrix dm = one_hot_standardize(ds);
  int k = clusters > 0 ? clusters : fourth_root_clusters(ds.m());
  if (std::size_t(k) > ds.m()) k = int(ds.m());
  KMeansResult km = kmeans(dm.x, k, seed);
  GroupAssignment g;
  g.groups = k;
  g.group_of_row = std::move(km.assignment);
  g.source = "feature-kmeans";
  return g;
}

GroupAssignment groups_from_quantiles(const std::vector<double>& v, int bins,
                                      const std::string& source) {
  if (v.empty()) throw std::invalid_argument("groups_from_quantiles: empty vector");
  if (bins < 1) throw std::invalid_argument("groups_from_quantiles: bins must be >= 1");

  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int b = 1; b < bins; ++b) {
    double e = sorted[std::size_t(b) * sorted.size() / std::size_t(bins)];
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }

  // A value equal to an edge opens the upper bin; duplicate edges were merged
  // above, and bins emptied by ties are compacted away.
  std::vector<int> raw(v.size());
  std::vector<int> count(edges.size() + 1, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    raw[i] = int(std::upper_bound(edges.begin(), edges.end(), v[i]) - edges.begin());
    ++count[std::size_t(raw[i])];
  }
  std::vector<int> remap(edges.size() + 1, -1);
  int next = 0;
  for (std::size_t b = 0; b < count.size(); ++b)
    if (count[b] > 0) remap[b] = next++;

  GroupAssignment g;
  g.groups = next;
  g.source = source;
  g.group_of_row.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    g.group_of_row[i] = remap[std::size_t(raw[i])];
  return g;
}

std::vector<double> group_coverages(const std::vector<int>& z,
                                    const GroupAssignment& g) {
  if (z.size() != g.group_of_row.size())
    throw std::invalid_argument("group_coverages: length mismatch");
  std::vector<double> pos(std::size_t(g.groups), 0.0);
  std::vector<double> cnt(std::size_t(g.groups), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    int gi = g.group_of_row[i];
    if (gi < 0 || gi >= g.groups)
      throw std::invalid_argument("group_coverages: group index out of range");
    pos[std::size_t(gi)] += double(z[i]);
    cnt[std::size_t(gi)] += 1.0;
  }
  std::vector<double> cov(std::size_t(g.groups));
  for (int gi = 0; gi < g.groups; ++gi)
    cov[std::size_t(gi)] = cnt[std::size_t(gi)] > 0.0
                               ? pos[std::size_t(gi)] / cnt[std::size_t(gi)]
                               : std::numeric_limits<double>::quiet_NaN();
  return cov;
}

double covgap(const std::vector<int>& z, const GroupAssignment& g, double target) {
  std::vector<double> cov = group_coverages(z, g);
  double sum = 0.0;
  int n = 0;
  for (double c : cov)
    if (!std::isnan(c)) {
      sum += std::abs(c - target);
      ++n;
    }
  if (n == 0) throw std::invalid_argument("covgap: no nonempty groups");
  return sum / double(n);
}

double wcovgap(const std::vector<int>& z, const GroupAssignment& g, double target) {
  std::vector<double> cov = group_coverages(z, g);
  std::vector<double> cnt(std::size_t(g.groups), 0.0);
  for (int gi : g.group_of_row) cnt[std::size_t(gi)] += 1.0;
  double sum = 0.0;
  for (int gi = 0; gi < g.groups; ++gi)
    if (!std::isnan(cov[std::size_t(gi)]))
      sum += cnt[std::size_t(gi)] / double(z.size()) *
             std::abs(cov[std::size_t(gi)] - target);
  return sum;
}

double fsc(const std::vector<int>& z, const GroupAssignment& g) {
  std::vector<double> cov = group_coverages(z, g);
  double lo = std::numeric_limits<double>::infinity();
  for (double c : cov)
    if (!std::isnan(c)) lo = std::min(lo, c);
  if (!std::isfinite(lo)) throw std::invalid_argument("fsc: no nonempty groups");
  return lo;
}

double ssc(const std::vector<int>& z, const std::vector<double>& set_size,
           int bins, double target) {
  if (z.size() != set_size.size())
    throw std::invalid_argument("ssc: length mismatch");
  return covgap(z, groups_from_quantiles(set_size, bins, "size-quantile"), target);
}

double eoc(const std::vector<int>& z, const std::vector<double>& y, int bins,
           double target) {
  if (z.size() != y.size()) throw std::invalid_argument("eoc: length mismatch");
  GroupAssignment g = groups_from_quantiles(y, bins, "y-quantile");
  std::vector<double> cov = group_coverages(z, g);
  double worst = 0.0;
  for (double c : cov)
    if (!std::isnan(c)) worst = std::max(worst, std::abs(c - target));
  return worst;
}

namespace {

// Minimum mean of z over contiguous sorted-projection windows of length >= len.
// The prefix-sum scan compares p[e]-p[s] < cmin*(e-s) to avoid a division per
// window.
double min_window_coverage(const std::vector<double>& proj,
                           const std::vector<int>& z, std::size_t len) {
  const std::size_t n = proj.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    prefix[i + 1] = prefix[i] + double(z[order[i]]);

  double cmin = 1.0 + 1e-9;
  for (std::size_t s = 0; s + len <= n; ++s) {
    const double ps = prefix[s];
    for (std::size_t e = s + len; e <= n; ++e) {
      double covered = prefix[e] - ps;
      if (covered < cmin * double(e - s))
        cmin = covered / double(e - s);
    }
  }
  return cmin > 1.0 ? 1.0 : cmin;
}

}  // namespace

double wsc(const Matrix& design, const std::vector<int>& z, double delta,
           int n_directions, std::uint64_t seed) {
  const std::size_t n = design.rows;
  if (n != z.size()) throw std::invalid_argument("wsc: length mismatch");
  if (n == 0) throw std::invalid_argument("wsc: empty input");
  if (n_directions < 1) throw std::invalid_argument("wsc: needs at least one direction");
  if (!(delta > 0.0) || delta * double(n) < 1.0)
    throw std::invalid_argument("wsc: delta*n must be at least 1");
  const std::size_t len = std::size_t(std::ceil(delta * double(n)));

  // Directions come off one sequential stream so a larger n_directions is a
  // superset of a smaller one.
  const std::size_t d = design.cols;
  Matrix dirs(std::size_t(n_directions), d);
  Rng rng(seed);
  for (int k = 0; k < n_directions; ++k) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double g = rng.normal();
      dirs.at(std::size_t(k), j) = g;
      norm2 += g * g;
    }
    double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
    for (std::size_t j = 0; j < d; ++j) dirs.at(std::size_t(k), j) *= inv;
  }

  std::vector<double> per_dir(std::size_t(n_directions), 0.0);
#pragma omp parallel
  {
    std::vector<double> proj(n);
#pragma omp for schedule(dynamic)
    for (int k = 0; k < n_directions; ++k) {
      const double* v = dirs.row(std::size_t(k));
      for (std::size_t i = 0; i < n; ++i) {
        const double* x = design.row(i);
        double p = 0.0;
        for (std::size_t j = 0; j < d; ++j) p += v[j] * x[j];
        proj[i] = p;
      }
      per_dir[std::size_t(k)] = min_window_coverage(proj, z, len);
    }
  }
  return *std::min_element(per_dir.begin(), per_dir.end());
}

double pearson_dependence(const std::vector<int>& z, const std::vector<double>& v) {
  if (z.size() != v.size() || z.empty())
    throw std::invalid_argument("pearson_dependence: bad input lengths");
  // A constant input carries no dependence signal; detect it directly, since
  // mean roundoff can leave the two-pass variance a hair above zero.
  bool const_z = true, const_v = true;
  for (std::size_t i = 1; i < z.size(); ++i) {
    const_z = const_z && z[i] == z[0];
    const_v = const_v && v[i] == v[0];
  }
  if (const_z || const_v) return 0.0;
  const double m = double(z.size());
  double mz = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    mz += double(z[i]);
    mv += v[i];
  }
  mz /= m;
  mv /= m;
  double cov = 0.0, vz = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double dz = double(z[i]) - mz, dv = v[i] - mv;
    cov += dz * dv;
    vz += dz * dz;
    vv += dv * dv;
  }
  if (vz <= 0.0 || vv <= 0.0) return 0.0;
  return std::abs(cov) / std::sqrt(vz * vv);
}

namespace {

double median_pairwise_distance(const std::vector<double>& a) {
  const std::size_t n = a.size();
  std::vector<double> dist;
  dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist.push_back(std::abs(a[i] - a[j]));
  if (dist.empty()) return 0.0;
  std::size_t mid = (dist.size() - 1) / 2;
  std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
  return dist[mid];
}

// Gaussian kernel matrix exp(-(ai-aj)^2 / (2 sigma^2)).
Matrix gaussian_kernel(const std::vector<double>& a, double sigma) {
  const std::size_t n = a.size();
  Matrix k(n, n);
  const double inv = 1.0 / (2.0 * sigma * sigma);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = a[std::size_t(i)] - a[j];
      k.at(std::size_t(i), j) = std::exp(-d * d * inv);
    }
  return k;
}

// Double-centers k in place: k <- H k H with H = I - 11^T/n.
void center_kernel(Matrix& k) {
  const std::size_t n = k.rows;
  std::vector<double> row_mean(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += k.at(i, j);
    row_mean[i] = s / double(n);
  }
  double grand = 0.0;
  for (double r : row_mean) grand += r;
  grand /= double(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      k.at(i, j) += grand - row_mean[i] - row_mean[j];
}

}  // namespace

double hsic_dependence(const std::vector<int>& z, const std::vector<double>& v,
                       std::size_t max_points, std::uint64_t seed) {
  if (z.size() != v.size() || z.empty())
    throw std::invalid_argument("hsic_dependence: bad input lengths");

  std::vector<double> az, av;
  if (z.size() > max_points) {
    std::vector<std::size_t> idx(z.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(max_points);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) {
      az.push_back(double(z[i]));
      av.push_back(v[i]);
    }
  } else {
    for (std::size_t i = 0; i < z.size(); ++i) {
      az.push_back(double(z[i]));
      av.push_back(v[i]);
    }
  }

  const std::size_t n = az.size();
  // HSIC against a constant is identically zero; kernel centering only gets
  // there up to rounding, so short-circuit the exact law.
  bool const_z2 = true, const_v2 = true;
  for (std::size_t i = 1; i < n; ++i) {
    const_z2 = const_z2 && az[i] == az[0];
    const_v2 = const_v2 && av[i] == av[0];
  }
  if (const_z2 || const_v2) return 0.0;

  double sz = median_pairwise_distance(az);
  double sv = median_pairwise_distance(av);
  if (sz <= 0.0) sz = 1.0;
  if (sv <= 0.0) sv = 1.0;

  Matrix k = gaussian_kernel(az, sz);
  Matrix l = gaussian_kernel(av, sv);
  center_kernel(k);

  // trace(K H L H) = sum_ij (HKH)_ij L_ij by symmetry; row partials merge in
  // row order to stay independent of the thread count.
  std::vector<double> row_acc(n, 0.0);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < (long long)n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      s += k.at(std::size_t(i), j) * l.at(std::size_t(i), j);
    row_acc[std::size_t(i)] = s;
  }
  double total = 0.0;
  for (double s : row_acc) total += s;
  double stat = total / (double(n) * double(n));
  return std::sqrt(std::max(stat, 0.0));
}

}  // namespace covaudit
