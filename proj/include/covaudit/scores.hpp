#pragma once
// Proper scoring rules on binary coverage outcomes and the divergences they
// induce.  A score ell(p, y) is proper when predicting the true conditional
// coverage minimizes expected loss; the induced divergence
//   d(p, q) = E_{Y~Bern(q)}[ell(p,Y) - ell(q,Y)]
// is what the ERT metric averages.  Shipped scores: L1 (pinball-style sign
// score), Brier, and log-loss; generators build custom scores from a convex
// distance f (target-anchored) or a convex potential psi (Bregman form)
//   ell(p, y) = -psi(p) - (y - p) psi'(p),
// whose induced divergence is the Bregman divergence D_psi(q || p).

#include <functional>
#include <string>
#include <vector>

namespace covaudit {

struct ProperScore {
  std::string name;
  bool needs_target = false;  // evaluation depends on the target coverage level
  double clamp = 0.0;         // p clamped to [clamp, 1-clamp] before scoring
  std::function<double(double p, int y, double target)> fn;

  double eval(double p, int y, double target) const {
    if (clamp > 0.0) {
      if (p < clamp) p = clamp;
      if (p > 1.0 - clamp) p = 1.0 - clamp;
    }
    return fn(p, y, target);
  }
};

// Direct evaluations of the three shipped scores.
double l1_score(double p, int y, double target);     // sgn(p-t) * (t-y), sgn(0)=0
double brier_score(double p, int y);                 // (y-p)^2
double log_loss_score(double p, int y);              // -log p_y (p unclamped here)

ProperScore make_l1();
ProperScore make_brier();
ProperScore make_log_loss(double clamp = 1e-6);

// Lookup by report-facing name ("l1", "l2", "kl").  Unknown names throw.
ProperScore score_by_name(const std::string& name);

// Registration hook for custom scores; registered names become visible to
// score_by_name and the CLI's <name>-ert metrics.
void register_score(const ProperScore& score);
std::vector<std::string> registered_scores();

// d(p, q) at a target level: expected score gap under Y ~ Bernoulli(q).
double divergence(const ProperScore& s, double p, double q, double target);

// Properness sweep: for every (q, target) on {0.01,...,0.99} and p on a
// 101-point grid, E_q ell(p) >= E_q ell(q) - tol.  Returns false on the first
// violation.
bool properness_check(const ProperScore& s, double tol = 1e-12);

// Convex-distance generator: f(p; t) >= 0 convex in p with f(t; t) = 0 and
// f'(t; t) = 0.  The resulting score has ell-ERT = E[f(p(X))].
struct ConvexDistanceSpec {
  std::string name = "custom-f";
  std::function<double(double p, double target)> f;
  std::function<double(double p, double target)> f_prime;
  // Targets at which the spec is validated on construction.
  std::vector<double> validation_targets;  // empty = full {0.01..0.99} grid
};
ProperScore score_from_convex(const ConvexDistanceSpec& spec);

// Bregman generator from a convex potential psi; target-free.
struct BregmanSpec {
  std::string name = "custom-psi";
  std::function<double(double p)> psi;
  std::function<double(double p)> psi_prime;
};
ProperScore score_from_bregman(const BregmanSpec& spec);

// Over/under split at the target level:
//   ell_plus(p, y)  = ell(max(p, t), y)   penalizes over-coverage only
//   ell_minus(p, y) = ell(min(p, t), y)   penalizes under-coverage only
// and ell = ell_plus + ell_minus - ell(t, .), so the two ERT halves add up to
// the total exactly.
struct SplitScores {
  ProperScore over;
  ProperScore under;
};
SplitScores split_over_under(const ProperScore& s);

}  // namespace covaudit
