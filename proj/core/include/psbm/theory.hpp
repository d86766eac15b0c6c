#pragma once

#include <array>
#include <string>
#include <vector>

#include "psbm/model.hpp"

namespace psbm {

enum class Regime { standard, sparse };

// Mean / variance sequences of the linearized root message, the exact
// epsilon ratio, and the per-depth error bound. Sequences are indexed by
// depth: mu[t-1] holds mu_t.
struct TheoryCurve {
  double alpha = 0.0;
  double mu1 = 0.0;
  double sigma1_sq = 0.0;
  std::vector<double> mu;
  std::vector<double> sigma2;
  std::vector<double> eps;          // exact: (alpha-1) sigma_t^2 / mu_t^2 - 1
  std::vector<double> upper_bound;  // trivial cap when alpha <= 1
  Regime regime = Regime::standard;
  int t0 = 0;  // sparse regime only
  int k = 2;
};

// Closed forms for the two recursions (standard: mu_t = mu1 + alpha mu_{t-1};
// sparse: mu_t = alpha mu_{t-1}), with the alpha = 1 pole removed by its
// analytic limit. Exposed separately so the recursion can be cross-checked
// against them on arbitrary (alpha, mu1, sigma1) triples.
double mu_closed_form(double alpha, double mu1, int t, Regime regime);
double sigma2_closed_form(double alpha, double mu1, double sigma1_sq, int t,
                          Regime regime);

// The recursion itself, unrolled to depth T (index 0 holds t = 1).
void moment_recursion(double alpha, double mu1, double sigma1_sq, int T, Regime regime,
                      std::vector<double>& mu_out, std::vector<double>& sigma2_out);

// Full curve for a parameter bundle. Standard regime requires
// round(delta d) >= 1; sparse requires delta (1-delta) d < 1. Initial values:
// standard mu1 = theta delta d w, sigma1^2 = delta d w^2; sparse
// mu1 = theta^t0 w, sigma1^2 = w^2, with w = vote_weight(theta, k).
TheoryCurve theory_curve(const TreeParams& tp, int T, Regime regime);

// Leading-order epsilon from the recovery guarantee; alpha <= 1 throws.
// Standard: (alpha-1)^2 / (theta^2 delta d) / (alpha^t - 1); sparse:
// theta^(-2 t0) alpha^(-(t-1)). The exact operational value lives in
// TheoryCurve::eps; the leading term is kept for cross-checks only (the two
// agree at the level of the error bound, not term by term).
double epsilon_t(const TreeParams& tp, int t, Regime regime);

// exp(-(alpha-1) / (2 (1+eps))), times (k-1) for k > 2, capped at the trivial
// bound 1/2 (resp. (k-1)/k). eps is the exact curve ratio at depth t.
// alpha <= 1 throws.
double upper_bound_error(const TreeParams& tp, int t, Regime regime);
// Raw form with eps supplied by the caller.
double upper_bound_error_raw(double alpha, double eps, int k);

struct LowerBoundReport {
  // k = 2 route: bound on the squared total variation between the two
  // revealed-label distributions, any depth.
  double tv_bound_sq = 0.0;
  double tv_bound = 0.0;
  // general-k route: bound on log(1 + chi^2), plus the weaker k-scaled form.
  double chi2_log_bound = 0.0;
  double chi2_bound = 0.0;
  double chi2_log_bound_relaxed = 0.0;
  double minimax_error_lb = 0.0;
  bool assumptions_ok = false;
  std::array<bool, 3> assumption{false, false, false};
  // The universal constant in the minimax statement is reported as 1; it is
  // a stand-in, pinned only for regular local trees.
  bool constant_is_stand_in = true;
};

// Bound d_TV^2 <= 2 delta d log(1 + 4 theta^2/(1-theta^2)) / (1-(1-delta)theta^2 d)
// and the implied minimax error >= 1/2 - sqrt(tv_bound_sq / 2). Assumptions
// checked and reported: delta d > 1, (1-delta) theta^2 d < 1, numerator <
// denominator^2. Violations flip assumptions_ok but the numbers are still
// computed formally (infinite when the denominator is not positive).
LowerBoundReport tv_lower_bound_k2(const TreeParams& tp);

// log(1 + chi^2) <= 2 delta d log(1 + theta^2 (1/(theta+(1-theta)/k) +
// k/(1-theta))) / (1 - 4(1-delta) theta^2 d), its k-scaled relaxation, and
// the minimax error >= (1 - A - 1/k)/2 where A is the unscaled relaxation.
// relaxed_assumption swaps the second check for
// (1-delta) theta^2 d (1 + 3(1-theta)(1-2/k)) < 1.
LowerBoundReport chi2_lower_bound_k(const TreeParams& tp, bool relaxed_assumption = false);

// CSV with header t,mu,sigma2,eps,upper_bound; doubles at full precision.
std::string theory_curve_csv(const TheoryCurve& curve);

}  // namespace psbm
