#pragma once
// Standard normal CDF and quantile.  The quantile has no <cmath> counterpart;
// it uses a rational approximation polished with one Halley step against the
// erf-based CDF, giving near machine precision (tests cross-check a bisection
// oracle to 1e-7 and tighter).

namespace covaudit {

double normal_cdf(double x);
double normal_pdf(double x);
// Inverse of normal_cdf on (0,1); throws std::domain_error outside.
double normal_quantile(double u);

}  // namespace covaudit
