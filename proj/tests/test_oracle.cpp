#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "psbm/generators.hpp"
#include "psbm/message_passing.hpp"
#include "psbm/oracle.hpp"

using namespace psbm;

namespace {

BroadcastTree star(int k, const std::vector<int>& child_labels,
                   const std::vector<std::uint8_t>& child_revealed) {
  const int fan = static_cast<int>(child_labels.size());
  BroadcastTree t;
  t.k = k;
  t.parent = {-1};
  t.depth = {0};
  t.label = {0};
  t.revealed = {0};
  t.child_begin = {1};
  t.child_count = {fan};
  for (int c = 0; c < fan; ++c) {
    t.parent.push_back(0);
    t.depth.push_back(1);
    t.label.push_back(child_labels[c]);
    t.revealed.push_back(child_revealed[c]);
    t.child_begin.push_back(fan + 1);
    t.child_count.push_back(0);
  }
  return t;
}

int unrevealed_non_root(const BroadcastTree& t) {
  int m = 0;
  for (int v = 1; v < t.size(); ++v) m += !t.revealed[v];
  return m;
}

}  // namespace

TEST_CASE("single revealed child pins the posterior") {
  const TreeParams tp{1.0 / 3.0, 15.0, 0.2, 2};
  const EnumerationResult r = exact_posterior_enumeration(star(2, {0}, {1}), tp);
  REQUIRE(r.posterior.size() == 2);
  // Child copies with prob theta + (1-theta)/2 = 2/3.
  CHECK(r.posterior[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.posterior[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.configurations_enumerated == 1);
}

TEST_CASE("no revealed labels gives the uniform posterior") {
  const TreeParams tp{0.4, 6.0, 0.2, 3};
  const EnumerationResult r =
      exact_posterior_enumeration(star(3, {0, 1, 2}, {0, 0, 0}), tp);
  for (double p : r.posterior) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.configurations_enumerated == 27);
}

TEST_CASE("posterior does not depend on child order") {
  const TreeParams tp{0.3, 8.0, 0.4, 2};
  const EnumerationResult a =
      exact_posterior_enumeration(star(2, {0, 1, 1, 0}, {1, 1, 0, 1}), tp);
  const EnumerationResult b =
      exact_posterior_enumeration(star(2, {1, 0, 0, 1}, {1, 1, 1, 0}), tp);
  CHECK(a.posterior[0] == doctest::Approx(b.posterior[0]).epsilon(1e-14));
  CHECK(a.posterior[1] == doctest::Approx(b.posterior[1]).epsilon(1e-14));
}

TEST_CASE("enumeration budget is enforced") {
  const TreeParams tp{0.3, 8.0, 0.4, 2};
  const BroadcastTree big =
      star(2, std::vector<int>(15, 0), std::vector<std::uint8_t>(15, 0));
  CHECK_THROWS_AS(exact_posterior_enumeration(big, tp), std::length_error);
}

TEST_CASE("belief propagation agrees with enumeration on random trees") {
  for (int rep = 0; rep < 60; ++rep) {
    const int k = rep % 2 == 0 ? 2 : 3;
    const double theta = 0.1 + 0.8 * (rep % 7) / 7.0;
    const TreeParams tp{theta, 2.0, 0.5, k};
    const BroadcastTree t =
        gen_galton_watson_tree(tp, 2, Seed{900 + static_cast<std::uint64_t>(rep)});
    if (unrevealed_non_root(t) > 14) continue;
    const EnumerationResult oracle = exact_posterior_enumeration(t, tp);
    const PosteriorState post = bp_k(t, tp);
    for (int i = 0; i < k; ++i)
      CHECK(post.probs[i] == doctest::Approx(oracle.posterior[i]).epsilon(1e-10));
    if (k == 2) {
      const double logit = bp_binary(t, tp);
      CHECK(logit == doctest::Approx(std::log(oracle.posterior[0] /
                                              oracle.posterior[1]))
                         .epsilon(1e-9));
    }
  }
}

TEST_CASE("depth-1 chi-square matches the closed form") {
  const TreeParams tp{0.3, 10.0, 0.4, 2};  // 4 revealed children
  const DistanceResult r = exact_distance_enumeration(tp, 1, 0, 1);
  const double per_leaf = 1.0 + 4.0 * 0.09 / (1.0 - 0.09);
  CHECK(r.chi2 == doctest::Approx(std::pow(per_leaf, 4.0) - 1.0).epsilon(1e-10));
  CHECK(r.support_size > 0);
}

TEST_CASE("identical conditionals at theta zero") {
  const TreeParams tp{0.0, 4.0, 0.5, 2};  // 2 + 2*2 = 6 revealed at depth 2
  const DistanceResult r = exact_distance_enumeration(tp, 2, 0, 1);
  CHECK(r.chi2 == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.tv == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("distance symmetry and the tv / chi-square inequality") {
  const TreeParams tp{0.25, 4.0, 0.5, 2};  // 2 + 2*2 = 6 revealed at depth 2
  const DistanceResult a = exact_distance_enumeration(tp, 2, 0, 1);
  const DistanceResult b = exact_distance_enumeration(tp, 2, 1, 0);
  CHECK(a.tv == doctest::Approx(b.tv).epsilon(1e-14));
  CHECK(a.chi2 == doctest::Approx(b.chi2).epsilon(1e-14));
  CHECK(a.tv <= 0.5 * std::sqrt(a.chi2) + 1e-12);
  CHECK(a.tv >= 0.0);
}

TEST_CASE("distance budget is enforced") {
  const TreeParams tp{0.3, 30.0, 0.5, 2};  // 15 revealed children at depth 1
  CHECK_THROWS_AS(exact_distance_enumeration(tp, 1, 0, 1), std::length_error);
}
