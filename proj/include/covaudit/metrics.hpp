#pragma once
// Baseline conditional-coverage diagnostics.  All of them consume the binary
// coverage vector z plus some auxiliary grouping/feature information; none of
// them needs a trained model.

#include <cstdint>
#include <string>
#include <vector>

#include "covaudit/dataset.hpp"
#include "covaudit/matrix.hpp"

namespace covaudit {

struct GroupAssignment {
  int groups = 0;
  std::vector<int> group_of_row;
  std::string source;  // "feature-kmeans", "y-quantile", "size-quantile", "user"
};

// Default grouping: k-means cells over the standardized one-hot design,
// cluster count from the fourth-root rule unless overridden.
GroupAssignment groups_from_kmeans(const Dataset& ds, int clusters,
                                   std::uint64_t seed);

// Quantile bins of a real-valued vector; duplicate edges merge, so a constant
// vector collapses to a single bin.
GroupAssignment groups_from_quantiles(const std::vector<double>& v, int bins,
                                      const std::string& source);

// Per-group empirical coverage; groups with no rows report NaN and are
// skipped by the aggregations below.
std::vector<double> group_coverages(const std::vector<int>& z,
                                    const GroupAssignment& g);

// Mean absolute coverage gap over nonempty groups.
double covgap(const std::vector<int>& z, const GroupAssignment& g, double target);
// Size-weighted absolute gap: sum_g (|I_g|/m) |C_g - target|.
double wcovgap(const std::vector<int>& z, const GroupAssignment& g, double target);
// Feature-stratified coverage: the worst (lowest) group coverage.
double fsc(const std::vector<int>& z, const GroupAssignment& g);

// Size-stratified coverage gap: covgap over set-size quantile bins.
double ssc(const std::vector<int>& z, const std::vector<double>& set_size,
           int bins, double target);
// Equalized-outcome coverage: the largest |C_g - target| over y-quantile bins.
double eoc(const std::vector<int>& z, const std::vector<double>& y, int bins,
           double target);

// Worst-slab coverage: minimum window coverage over seeded random unit
// directions, windows being contiguous runs of at least ceil(delta*n) points
// in projection-sorted order.  Directions are drawn sequentially from one
// stream, so results for growing n_directions are nested (monotone
// nonincreasing).  The direction scan runs under OpenMP; per-direction minima
// combine by min, so the thread count cannot change the result.
double wsc(const Matrix& design, const std::vector<int>& z, double delta,
           int n_directions, std::uint64_t seed);

// |Pearson correlation| between z and v; exactly 0 when either is constant.
double pearson_dependence(const std::vector<int>& z, const std::vector<double>& v);

// sqrt of the biased HSIC V-statistic with Gaussian kernels (median-distance
// bandwidths, fallback 1 when the median vanishes); rows are subsampled to
// max_points with the given seed when larger.
double hsic_dependence(const std::vector<int>& z, const std::vector<double>& v,
                       std::size_t max_points, std::uint64_t seed);

}  // namespace covaudit
