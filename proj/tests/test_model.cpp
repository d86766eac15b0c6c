#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "psbm/model.hpp"

using namespace psbm;

TEST_CASE("snr pinned value") {
  const ModelParams params{1000, 2, 0.02, 0.01, 0.1};
  CHECK(snr(params) == doctest::Approx(1.5).epsilon(1e-12));
  // k=2 reduction: (1-delta) n (p-q)^2 / (2(p+q)).
  const double reduced = 0.9 * 1000 * 0.01 * 0.01 / (2.0 * 0.03);
  CHECK(snr(params) == doctest::Approx(reduced).epsilon(1e-12));
}

TEST_CASE("snr degenerate inputs") {
  CHECK(snr({1000, 2, 0.02, 0.01, 1.0}) == 0.0);
  CHECK(snr({1000, 2, 0.01, 0.01, 0.1}) == 0.0);
  CHECK_THROWS_AS(snr({1000, 2, 0.0, 0.0, 0.1}), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((ModelParams{0, 2, 0.02, 0.01, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{10, 1, 0.02, 0.01, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{10, 2, 0.01, 0.02, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{10, 2, 1.50, 0.01, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{10, 2, 0.02, 0.01, 1.1}.validate()), std::invalid_argument);
  CHECK_NOTHROW((ModelParams{10, 2, 0.02, 0.02, 0.1}.validate()));
  CHECK_THROWS_AS((TreeParams{-0.1, 15, 0.2, 2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TreeParams{0.5, -1, 0.2, 2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TreeParams{0.5, 15, 0.2, 1}.validate()), std::invalid_argument);
}

TEST_CASE("tree parameter mapping") {
  const TreeParams tp = tree_params_from_sbm({1000, 2, 0.02, 0.01, 0.1});
  CHECK(tp.theta == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(tp.d == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(tp.delta == 0.1);
  CHECK(tp.k == 2);

  const TreeParams t3 = tree_params_from_sbm({900, 3, 0.03, 0.01, 0.0});
  CHECK(t3.theta == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(t3.d == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(t3.k == 3);

  CHECK(tree_params_from_sbm({1000, 2, 0.01, 0.01, 0.1}).theta == 0.0);
  CHECK_THROWS_AS(tree_params_from_sbm({1000, 2, 0.0, 0.0, 0.1}), std::invalid_argument);
}

TEST_CASE("coupling depth") {
  CHECK(coupling_depth({1000, 2, 0.02, 0.01, 0.1}) == 1);
  CHECK(coupling_depth({1000, 2, 0.02, 0.01, 0.1}, 1.0) == 2);
  // Dense graph: the usable depth collapses to zero.
  CHECK(coupling_depth({100, 2, 1.0, 1.0, 0.1}) == 0);
  // Branching number at or below 1: no depth is defined.
  CHECK_THROWS_AS(coupling_depth({100, 2, 0.01, 0.005, 0.1}), std::invalid_argument);
}

TEST_CASE("snr equals alpha under the tree mapping") {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    ModelParams params;
    params.k = 2 + static_cast<int>(eng() % 4);
    params.n = params.k * (50 + static_cast<int>(eng() % 2000));
    params.q = 0.001 + 0.05 * unit(eng);
    params.p = params.q + 0.001 + 0.3 * unit(eng);
    params.delta = 0.99 * unit(eng);
    const double s = snr(params);
    const TreeParams tp = tree_params_from_sbm(params);
    const double alpha = (1.0 - tp.delta) * tp.theta * tp.theta * tp.d;
    CHECK(alpha == doctest::Approx(s).epsilon(1e-12));
    CHECK(tp.theta > 0.0);
    CHECK(tp.theta < 1.0);

    const SnrReport rep = snr_report(params);
    CHECK(rep.snr == s);
    CHECK(rep.alpha == alpha);
  }
}

TEST_CASE("snr monotonicity") {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    ModelParams params;
    params.k = 2 + static_cast<int>(eng() % 3);
    params.n = params.k * (50 + static_cast<int>(eng() % 500));
    params.q = 0.001 + 0.02 * unit(eng);
    params.p = params.q + 0.005 + 0.2 * unit(eng);
    params.delta = 0.8 * unit(eng);
    const double base = snr(params);

    ModelParams more_hidden = params;
    more_hidden.delta = params.delta + 0.1;
    CHECK(snr(more_hidden) < base);

    ModelParams noisier = params;
    noisier.q = params.q + 0.5 * (params.p - params.q);
    CHECK(snr(noisier) < base);

    ModelParams bigger = params;
    bigger.n = params.n * 2;
    CHECK(snr(bigger) > base);
  }
}

TEST_CASE("labeled graph structural checks") {
  LabeledGraph g;
  g.n = 3;
  g.k = 2;
  g.adj = {{1}, {0, 2}, {1}};
  g.truth = {0, 1, 0};
  g.revealed = {1, 0, 0};
  CHECK_NOTHROW(g.check());
  CHECK(g.edge_count() == 2);

  LabeledGraph bad = g;
  bad.adj[0] = {0};
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  bad = g;
  bad.truth[2] = 5;
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  bad = g;
  bad.revealed.pop_back();
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
}
