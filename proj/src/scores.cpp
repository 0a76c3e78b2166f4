#include "covaudit/scores.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace covaudit {

double l1_score(double p, int y, double target) {
  double s = p > target ? 1.0 : (p < target ? -1.0 : 0.0);
  return s * (target - double(y));
}

double brier_score(double p, int y) {
  double d = double(y) - p;
  return d * d;
}

double log_loss_score(double p, int y) {
  return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

ProperScore make_l1() {
  ProperScore s;
  s.name = "l1";
  s.needs_target = true;
  s.fn = [](double p, int y, double t) { return l1_score(p, y, t); };
  return s;
}

ProperScore make_brier() {
  ProperScore s;
  s.name = "l2";
  s.fn = [](double p, int y, double) { return brier_score(p, y); };
  return s;
}

ProperScore make_log_loss(double clamp) {
  ProperScore s;
  s.name = "kl";
  s.clamp = clamp;
  s.fn = [](double p, int y, double) { return log_loss_score(p, y); };
  return s;
}

namespace {
std::map<std::string, ProperScore>& registry() {
  static std::map<std::string, ProperScore> reg = {
      {"l1", make_l1()}, {"l2", make_brier()}, {"kl", make_log_loss()}};
  return reg;
}
}  // namespace

ProperScore score_by_name(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown score '" + name + "'");
  return it->second;
}

void register_score(const ProperScore& score) {
  if (score.name.empty())
    throw std::invalid_argument("register_score: score needs a name");
  registry()[score.name] = score;
}

std::vector<std::string> registered_scores() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

double divergence(const ProperScore& s, double p, double q, double target) {
  double gap1 = s.eval(p, 1, target) - s.eval(q, 1, target);
  double gap0 = s.eval(p, 0, target) - s.eval(q, 0, target);
  return q * gap1 + (1.0 - q) * gap0;
}

bool properness_check(const ProperScore& s, double tol) {
  for (int qi = 1; qi <= 99; ++qi) {
    double q = qi / 100.0;
    for (int ti = 1; ti <= 99; ++ti) {
      double t = ti / 100.0;
      double at_q = q * s.eval(q, 1, t) + (1.0 - q) * s.eval(q, 0, t);
      for (int pi = 0; pi <= 100; ++pi) {
        double p = pi / 100.0;
        double at_p = q * s.eval(p, 1, t) + (1.0 - q) * s.eval(p, 0, t);
        if (at_p < at_q - tol) return false;
      }
      if (!s.needs_target) break;  // target plays no role; one sweep suffices
    }
  }
  return true;
}

namespace {

// Midpoint-convexity plus anchor conditions for a distance f at target t on a
// 1001-point grid.
void validate_distance(const ConvexDistanceSpec& spec, double t) {
  const int n = 1000;
  const double anchor_tol = 1e-9, conv_tol = 1e-9;
  if (std::abs(spec.f(t, t)) > anchor_tol)
    throw std::invalid_argument("score_from_convex: f(target) != 0");
  if (std::abs(spec.f_prime(t, t)) > anchor_tol)
    throw std::invalid_argument("score_from_convex: f'(target) != 0");
  std::vector<double> fv(n + 1);
  for (int i = 0; i <= n; ++i) {
    double p = double(i) / n;
    fv[i] = spec.f(p, t);
    if (fv[i] < -1e-12)
      throw std::invalid_argument("score_from_convex: f takes negative values");
  }
  for (int i = 1; i < n; ++i)
    if (fv[i] > 0.5 * (fv[i - 1] + fv[i + 1]) + conv_tol)
      throw std::invalid_argument("score_from_convex: f fails midpoint convexity");
}

}  // namespace

ProperScore score_from_convex(const ConvexDistanceSpec& spec) {
  if (!spec.f || !spec.f_prime)
    throw std::invalid_argument("score_from_convex: f and f_prime are required");
  if (spec.validation_targets.empty()) {
    for (int ti = 1; ti <= 99; ++ti) validate_distance(spec, ti / 100.0);
  } else {
    for (double t : spec.validation_targets) validate_distance(spec, t);
  }
  ProperScore s;
  s.name = spec.name;
  s.needs_target = true;
  auto f = spec.f;
  auto fp = spec.f_prime;
  s.fn = [f, fp](double p, int y, double t) {
    return -f(p, t) - (double(y) - p) * fp(p, t);
  };
  return s;
}

ProperScore score_from_bregman(const BregmanSpec& spec) {
  if (!spec.psi || !spec.psi_prime)
    throw std::invalid_argument("score_from_bregman: psi and psi_prime are required");
  const int n = 1000;
  for (int i = 1; i < n; ++i) {
    double lo = spec.psi(double(i - 1) / n);
    double mid = spec.psi(double(i) / n);
    double hi = spec.psi(double(i + 1) / n);
    if (mid > 0.5 * (lo + hi) + 1e-9)
      throw std::invalid_argument("score_from_bregman: psi fails midpoint convexity");
  }
  ProperScore s;
  s.name = spec.name;
  auto psi = spec.psi;
  auto dpsi = spec.psi_prime;
  s.fn = [psi, dpsi](double p, int y, double) {
    return -psi(p) - (double(y) - p) * dpsi(p);
  };
  return s;
}

SplitScores split_over_under(const ProperScore& s) {
  SplitScores out;
  out.over = s;
  out.over.name = s.name + "+";
  out.over.needs_target = true;
  out.over.fn = [base = s](double p, int y, double t) {
    return base.eval(std::max(p, t), y, t);
  };
  out.over.clamp = 0.0;  // the wrapped score clamps internally

  out.under = s;
  out.under.name = s.name + "-";
  out.under.needs_target = true;
  out.under.fn = [base = s](double p, int y, double t) {
    return base.eval(std::min(p, t), y, t);
  };
  out.under.clamp = 0.0;
  return out;
}

}  // namespace covaudit
