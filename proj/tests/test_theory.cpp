#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "psbm/message_passing.hpp"
#include "psbm/theory.hpp"

using namespace psbm;

TEST_CASE("moment recursion pinned point") {
  std::vector<double> mu, s2;
  moment_recursion(2.0, 1.0, 1.0, 3, Regime::standard, mu, s2);
  REQUIRE(mu.size() == 3);
  CHECK(mu[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mu[1] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(mu[2] == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(s2[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s2[1] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(s2[2] == doctest::Approx(29.0).epsilon(1e-14));
}

TEST_CASE("recursion matches the closed forms") {
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> alpha_draw(0.0, 4.0);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  std::uniform_int_distribution<int> depth(1, 25);
  for (int rep = 0; rep < 300; ++rep) {
    double alpha = alpha_draw(eng);
    if (std::fabs(alpha - 1.0) < 1e-6 || alpha == 0.0) continue;
    const double mu1 = scale(eng);
    const double s1 = scale(eng);
    const int T = depth(eng);
    for (Regime regime : {Regime::standard, Regime::sparse}) {
      std::vector<double> mu, s2;
      moment_recursion(alpha, mu1, s1, T, regime, mu, s2);
      for (int t = 1; t <= T; ++t) {
        CHECK(mu[t - 1] ==
              doctest::Approx(mu_closed_form(alpha, mu1, t, regime)).epsilon(1e-10));
        CHECK(s2[t - 1] ==
              doctest::Approx(sigma2_closed_form(alpha, mu1, s1, t, regime))
                  .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("alpha one limit") {
  const double mu1 = 0.7, s1 = 1.3;
  std::vector<double> mu, s2;
  moment_recursion(1.0, mu1, s1, 12, Regime::standard, mu, s2);
  for (int t = 1; t <= 12; ++t) {
    CHECK(mu[t - 1] == doctest::Approx(t * mu1).epsilon(1e-12));
    const double extra = (t - 1.0) * t * (2.0 * t - 1.0) / 6.0 * mu1 * mu1;
    CHECK(s2[t - 1] == doctest::Approx(t * s1 + extra).epsilon(1e-12));
    CHECK(mu_closed_form(1.0, mu1, t, Regime::standard) ==
          doctest::Approx(t * mu1).epsilon(1e-12));
    CHECK(sigma2_closed_form(1.0, mu1, s1, t, Regime::standard) ==
          doctest::Approx(t * s1 + extra).epsilon(1e-12));
  }
  // Sparse recursion at alpha = 1 stays put in the mean.
  moment_recursion(1.0, mu1, s1, 5, Regime::sparse, mu, s2);
  for (double m : mu) CHECK(m == doctest::Approx(mu1).epsilon(1e-12));
}

TEST_CASE("standard curve from tree parameters") {
  const TreeParams tp{1.0 / 3.0, 15.0, 0.2, 2};
  const TheoryCurve c = theory_curve(tp, 8, Regime::standard);
  const double w = vote_weight(tp.theta, 2);  // log 2
  CHECK(c.alpha == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(c.mu1 == doctest::Approx(tp.theta * 3.0 * w).epsilon(1e-12));
  CHECK(c.sigma1_sq == doctest::Approx(3.0 * w * w).epsilon(1e-12));
  REQUIRE(c.mu.size() == 8);
  for (int t = 1; t <= 8; ++t) {
    CHECK(c.eps[t - 1] ==
          doctest::Approx((c.alpha - 1.0) * c.sigma2[t - 1] /
                          (c.mu[t - 1] * c.mu[t - 1]) -
                          1.0)
              .epsilon(1e-10));
    const double raw = upper_bound_error_raw(c.alpha, c.eps[t - 1], 2);
    CHECK(c.upper_bound[t - 1] == doctest::Approx(raw).epsilon(1e-12));
    CHECK(c.upper_bound[t - 1] <= 0.5 + 1e-15);
  }
}

TEST_CASE("regime gates") {
  const TreeParams thin{1.0 / 3.0, 15.0, 0.01, 2};  // round(delta d) = 0
  CHECK_THROWS_AS(theory_curve(thin, 5, Regime::standard), std::invalid_argument);
  CHECK_NOTHROW(theory_curve(thin, 5, Regime::sparse));
  const TreeParams dense{1.0 / 3.0, 15.0, 0.2, 2};  // delta (1-delta) d = 2.4
  CHECK_THROWS_AS(theory_curve(dense, 5, Regime::sparse), std::invalid_argument);
  const TheoryCurve sc = theory_curve(thin, 5, Regime::sparse);
  CHECK(sc.regime == Regime::sparse);
  CHECK(sc.t0 == sparse_subtree_depth(thin));
  CHECK(sc.mu1 == doctest::Approx(std::pow(thin.theta, sc.t0) *
                                  vote_weight(thin.theta, 2))
                      .epsilon(1e-12));
}

TEST_CASE("epsilon leading term pinned") {
  // alpha = 1.5 with theta = 1/3 and delta d = 3.
  const TreeParams tp{1.0 / 3.0, 16.5, 2.0 / 11.0, 2};
  CHECK((1.0 - tp.delta) * tp.theta * tp.theta * tp.d ==
        doctest::Approx(1.5).epsilon(1e-12));
  const double lead = epsilon_t(tp, 6, Regime::standard);
  CHECK(lead == doctest::Approx(0.0721805).epsilon(1e-5));
  // Exact ratio from the curve settles to zero as depth grows.
  const TheoryCurve c = theory_curve(tp, 60, Regime::standard);
  CHECK(std::fabs(c.eps[59]) < 1e-6);
  CHECK(c.sigma2[59] / (c.mu[59] * c.mu[59]) ==
        doctest::Approx(1.0 / (c.alpha - 1.0)).epsilon(1e-2));
}

TEST_CASE("epsilon and error bound refuse alpha at or below one") {
  const TreeParams tp{0.2, 15.0, 0.2, 2};  // alpha = 0.48
  CHECK_THROWS_AS(epsilon_t(tp, 4, Regime::standard), std::invalid_argument);
  CHECK_THROWS_AS(upper_bound_error(tp, 4, Regime::standard), std::invalid_argument);
  // The curve itself still exists and fills in the trivial cap.
  const TheoryCurve c = theory_curve(tp, 6, Regime::standard);
  for (double b : c.upper_bound) CHECK(b == 0.5);
}

TEST_CASE("error bound caps and monotonicity") {
  CHECK(upper_bound_error_raw(2.0, 0.0, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // exp(-1/2) > 1/2, so the trivial k=2 cap is the binding term here.
  CHECK(upper_bound_error_raw(2.0, 0.0, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(upper_bound_error_raw(3.0, 0.0, 2) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(upper_bound_error_raw(1.0 + 1e-9, 0.0, 2) == doctest::Approx(0.5).epsilon(1e-12));
  double prev = 1.0;
  for (double alpha : {1.5, 2.0, 3.0, 4.0, 6.0}) {
    const double b = upper_bound_error_raw(alpha, 0.3, 2);
    CHECK(b <= prev + 1e-15);
    prev = b;
  }
  CHECK_THROWS_AS(upper_bound_error_raw(2.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("tv lower bound pinned example") {
  const TreeParams tp{0.2, 10.0, 0.15, 2};
  const LowerBoundReport r = tv_lower_bound_k2(tp);
  const double num = 2.0 * 1.5 * std::log1p(4.0 * 0.04 / 0.96);
  const double den = 1.0 - 0.85 * 0.04 * 10.0;
  CHECK(r.tv_bound_sq == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(r.tv_bound_sq == doctest::Approx(0.7007).epsilon(1e-3));
  CHECK(r.tv_bound == doctest::Approx(std::sqrt(num / den)).epsilon(1e-12));
  CHECK(r.assumption[0]);  // delta d = 1.5 > 1
  CHECK(r.assumption[1]);  // (1-delta) theta^2 d = 0.34 < 1
  CHECK_FALSE(r.assumption[2]);  // 0.4625 > 0.66^2
  CHECK_FALSE(r.assumptions_ok);
  CHECK(r.minimax_error_lb == 0.0);  // 1/2 - sqrt(sq/2) clamps at zero
  CHECK(r.constant_is_stand_in);
}

TEST_CASE("tv lower bound degenerate signal") {
  const TreeParams tp{0.0, 10.0, 0.15, 2};
  const LowerBoundReport r = tv_lower_bound_k2(tp);
  CHECK(r.tv_bound_sq == 0.0);
  CHECK(r.minimax_error_lb == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.assumptions_ok);
  CHECK_THROWS_AS(tv_lower_bound_k2(TreeParams{0.2, 10.0, 0.15, 3}),
                  std::invalid_argument);
}

TEST_CASE("chi-square lower bound pinned example") {
  const TreeParams tp{0.1, 12.0, 0.2, 4};
  const LowerBoundReport r = chi2_lower_bound_k(tp);
  const double inner = 0.01 * (1.0 / (0.1 + 0.9 / 4.0) + 4.0 / 0.9);
  const double num = 2.0 * 0.2 * 12.0 * std::log1p(inner);
  const double den = 1.0 - 4.0 * 0.8 * 0.01 * 12.0;
  CHECK(den == doctest::Approx(0.616).epsilon(1e-12));
  CHECK(r.chi2_log_bound == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(r.chi2_log_bound == doctest::Approx(0.565).epsilon(2e-3));
  CHECK(r.chi2_bound == doctest::Approx(std::expm1(num / den)).epsilon(1e-12));
  CHECK(r.minimax_error_lb >= 0.0);
  CHECK(r.minimax_error_lb <= 0.5);
}

TEST_CASE("chi-square bound vanishing signal recovers the trivial floor") {
  const TreeParams tp{0.0, 12.0, 0.2, 4};
  const LowerBoundReport r = chi2_lower_bound_k(tp);
  CHECK(r.chi2_log_bound == 0.0);
  CHECK(r.minimax_error_lb == doctest::Approx(0.5 * (1.0 - 1.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("relaxed assumption swap changes only the second check") {
  const TreeParams tp{0.3, 8.0, 0.3, 3};
  const LowerBoundReport strict = chi2_lower_bound_k(tp, false);
  const LowerBoundReport relaxed = chi2_lower_bound_k(tp, true);
  CHECK(strict.chi2_log_bound == relaxed.chi2_log_bound);
  CHECK(strict.assumption[0] == relaxed.assumption[0]);
  CHECK(strict.assumption[2] == relaxed.assumption[2]);
}

TEST_CASE("curve csv shape") {
  const TheoryCurve c = theory_curve(TreeParams{1.0 / 3.0, 15.0, 0.2, 2}, 4,
                                     Regime::standard);
  const std::string csv = theory_curve_csv(c);
  CHECK(csv.rfind("t,mu,sigma2,eps,upper_bound\n", 0) == 0);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 5);
}
