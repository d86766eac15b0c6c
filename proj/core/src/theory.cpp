#include "psbm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "psbm/message_passing.hpp"

namespace psbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double powi(double base, int e) { return std::pow(base, e); }

// (alpha^t - 1) / (alpha - 1) as the geometric sum 1 + alpha + ... +
// alpha^{t-1}, evaluated by Horner. All terms are positive for alpha > 0, so
// there is no cancellation, and alpha = 1 needs no special case.
double geom_sum(double alpha, int t) {
  double s = 0.0;
  for (int j = 0; j < t; ++j) s = 1.0 + alpha * s;
  return s;
}

}  // namespace

double mu_closed_form(double alpha, double mu1, int t, Regime regime) {
  if (t < 1) throw std::invalid_argument("mu_closed_form: t must be >= 1");
  if (regime == Regime::sparse) return powi(alpha, t - 1) * mu1;
  return geom_sum(alpha, t) * mu1;
}

double sigma2_closed_form(double alpha, double mu1, double sigma1_sq, int t,
                          Regime regime) {
  if (t < 1) throw std::invalid_argument("sigma2_closed_form: t must be >= 1");
  if (regime == Regime::sparse) {
    const double at = powi(alpha, t - 1);
    return at * sigma1_sq + at * geom_sum(alpha, t - 1) * mu1 * mu1;
  }
  // sigma_t^2 = S_t sigma_1^2 + [sum_{s=1}^{t-1} alpha^{t-s} S_s^2] mu_1^2
  // with S_s the geometric sum; equal to the usual rational expression in
  // alpha^t / (alpha-1)^2 but free of its cancellation near alpha = 1.
  double coeff = 0.0;
  double s_run = 0.0;  // S_s, ascending
  std::vector<double> s_sq(std::max(t - 1, 0));
  for (int s = 1; s <= t - 1; ++s) {
    s_run = 1.0 + alpha * s_run;
    s_sq[s - 1] = s_run * s_run;
  }
  double p = alpha;  // alpha^{t-s}, descending s
  for (int s = t - 1; s >= 1; --s, p *= alpha) coeff += p * s_sq[s - 1];
  return geom_sum(alpha, t) * sigma1_sq + coeff * mu1 * mu1;
}

void moment_recursion(double alpha, double mu1, double sigma1_sq, int T, Regime regime,
                      std::vector<double>& mu_out, std::vector<double>& sigma2_out) {
  if (T < 1) throw std::invalid_argument("moment_recursion: T must be >= 1");
  mu_out.assign(T, 0.0);
  sigma2_out.assign(T, 0.0);
  mu_out[0] = mu1;
  sigma2_out[0] = sigma1_sq;
  for (int t = 2; t <= T; ++t) {
    const double mp = mu_out[t - 2];
    const double sp = sigma2_out[t - 2];
    if (regime == Regime::standard) {
      mu_out[t - 1] = mu1 + alpha * mp;
      sigma2_out[t - 1] = sigma1_sq + alpha * sp + alpha * mp * mp;
    } else {
      mu_out[t - 1] = alpha * mp;
      sigma2_out[t - 1] = alpha * sp + alpha * mp * mp;
    }
  }
}

TheoryCurve theory_curve(const TreeParams& tp, int T, Regime regime) {
  tp.validate();
  if (T < 1) throw std::invalid_argument("theory_curve: T must be >= 1");
  if (tp.theta >= 1.0) throw std::invalid_argument("theory_curve: requires theta < 1");
  TheoryCurve c;
  c.regime = regime;
  c.k = tp.k;
  c.alpha = (1.0 - tp.delta) * tp.theta * tp.theta * tp.d;
  const double w = vote_weight(tp.theta, tp.k);

  if (regime == Regime::standard) {
    if (std::llround(tp.delta * tp.d) < 1)
      throw std::invalid_argument("theory_curve: standard regime needs round(delta d) >= 1");
    c.mu1 = tp.theta * tp.delta * tp.d * w;
    c.sigma1_sq = tp.delta * tp.d * w * w;
  } else {
    if (!(tp.delta * (1.0 - tp.delta) * tp.d < 1.0))
      throw std::invalid_argument("theory_curve: sparse regime needs delta (1-delta) d < 1");
    c.t0 = sparse_subtree_depth(tp);
    c.mu1 = powi(tp.theta, c.t0) * w;
    c.sigma1_sq = w * w;
  }

  moment_recursion(c.alpha, c.mu1, c.sigma1_sq, T, regime, c.mu, c.sigma2);

  c.eps.resize(T);
  c.upper_bound.resize(T);
  const double cap = tp.k == 2 ? 0.5 : (tp.k - 1.0) / tp.k;
  for (int t = 1; t <= T; ++t) {
    const double mu = c.mu[t - 1];
    c.eps[t - 1] = mu > 0.0 ? (c.alpha - 1.0) * c.sigma2[t - 1] / (mu * mu) - 1.0 : kInf;
    c.upper_bound[t - 1] =
        c.alpha > 1.0 ? upper_bound_error_raw(c.alpha, c.eps[t - 1], tp.k) : cap;
  }
  return c;
}

double epsilon_t(const TreeParams& tp, int t, Regime regime) {
  tp.validate();
  if (t < 1) throw std::invalid_argument("epsilon_t: t must be >= 1");
  const double alpha = (1.0 - tp.delta) * tp.theta * tp.theta * tp.d;
  if (!(alpha > 1.0)) throw std::invalid_argument("epsilon_t: requires alpha > 1");
  if (regime == Regime::sparse) {
    const int t0 = sparse_subtree_depth(tp);
    return powi(tp.theta, -2 * t0) * powi(alpha, -(t - 1));
  }
  const double am1 = alpha - 1.0;
  return am1 * am1 / (tp.theta * tp.theta * tp.delta * tp.d) / (powi(alpha, t) - 1.0);
}

double upper_bound_error_raw(double alpha, double eps, int k) {
  if (k < 2) throw std::invalid_argument("upper_bound_error_raw: k must be >= 2");
  const double cap = k == 2 ? 0.5 : (k - 1.0) / k;
  const double raw = std::exp(-(alpha - 1.0) / (2.0 * (1.0 + eps)));
  const double bound = k == 2 ? raw : (k - 1.0) * raw;
  return std::min(bound, cap);
}

double upper_bound_error(const TreeParams& tp, int t, Regime regime) {
  const TheoryCurve c = theory_curve(tp, t, regime);
  if (!(c.alpha > 1.0)) throw std::invalid_argument("upper_bound_error: requires alpha > 1");
  return c.upper_bound[t - 1];
}

LowerBoundReport tv_lower_bound_k2(const TreeParams& tp) {
  tp.validate();
  if (tp.k != 2) throw std::invalid_argument("tv_lower_bound_k2: k must be 2");
  if (tp.theta >= 1.0) throw std::invalid_argument("tv_lower_bound_k2: requires theta < 1");
  LowerBoundReport r;
  const double th2 = tp.theta * tp.theta;
  const double num = 2.0 * tp.delta * tp.d * std::log1p(4.0 * th2 / (1.0 - th2));
  const double den = 1.0 - (1.0 - tp.delta) * th2 * tp.d;
  r.assumption[0] = tp.delta * tp.d > 1.0;
  r.assumption[1] = (1.0 - tp.delta) * th2 * tp.d < 1.0;
  r.assumption[2] = den > 0.0 && num < den * den;
  r.assumptions_ok = r.assumption[0] && r.assumption[1] && r.assumption[2];
  r.tv_bound_sq = den > 0.0 ? num / den : kInf;
  r.tv_bound = std::sqrt(r.tv_bound_sq);
  r.minimax_error_lb =
      std::isfinite(r.tv_bound_sq)
          ? std::clamp(0.5 - std::sqrt(r.tv_bound_sq / 2.0), 0.0, 0.5)
          : 0.0;
  return r;
}

LowerBoundReport chi2_lower_bound_k(const TreeParams& tp, bool relaxed_assumption) {
  tp.validate();
  if (tp.theta >= 1.0) throw std::invalid_argument("chi2_lower_bound_k: requires theta < 1");
  LowerBoundReport r;
  const int k = tp.k;
  const double th = tp.theta;
  const double th2 = th * th;
  const double base = (1.0 - tp.delta) * th2 * tp.d;
  const double num =
      2.0 * tp.delta * tp.d *
      std::log1p(th2 * (1.0 / (th + (1.0 - th) / k) + k / (1.0 - th)));
  const double den = 1.0 - 4.0 * base;

  r.assumption[0] = tp.delta * tp.d > 1.0;
  r.assumption[1] = relaxed_assumption
                        ? base * (1.0 + 3.0 * (1.0 - th) * (1.0 - 2.0 / k)) < 1.0
                        : base < 0.25;
  r.assumption[2] = den > 0.0 && num < den * den;
  r.assumptions_ok = r.assumption[0] && r.assumption[1] && r.assumption[2];

  r.chi2_log_bound = den > 0.0 ? num / den : kInf;
  r.chi2_bound = std::isfinite(r.chi2_log_bound) ? std::expm1(r.chi2_log_bound) : kInf;
  const double scale = 1.0 / (1.0 - th) + 1.0 / (k * th + 1.0 - th);
  const double unscaled = den > 0.0 ? 2.0 * tp.delta * th2 * tp.d * scale / den : kInf;
  r.chi2_log_bound_relaxed = k * unscaled;
  r.minimax_error_lb = std::isfinite(unscaled)
                           ? std::clamp(0.5 * (1.0 - unscaled - 1.0 / k), 0.0, 0.5)
                           : 0.0;
  return r;
}

std::string theory_curve_csv(const TheoryCurve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "t,mu,sigma2,eps,upper_bound\n";
  for (std::size_t i = 0; i < curve.mu.size(); ++i) {
    out << (i + 1) << ',' << curve.mu[i] << ',' << curve.sigma2[i] << ','
        << curve.eps[i] << ',' << curve.upper_bound[i] << '\n';
  }
  return out.str();
}

}  // namespace psbm
