#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace securemode;

namespace {
Rational q(long a, long b = 1) { return make_rational(a, b); }

LinearMode<Rational> small_mode(const std::string& id) {
  return {id, Matrix<Rational>{{q(0), q(1)}, {q(-1), q(0)}}, Matrix<Rational>{{q(0)}, {q(1)}},
          Matrix<Rational>{{q(1), q(0)}}};
}
}  // namespace

TEST(Model, AugmentedPairBlocks) {
  auto si = small_mode("a");
  auto sj = small_mode("b");
  sj.A(0, 0) = 2;
  const auto pair = build_augmented(si, sj, {0}, {});
  EXPECT_EQ(pair.A, block_diag(si.A, sj.A));
  EXPECT_EQ(pair.B, vstack(si.B, sj.B));
  EXPECT_EQ(pair.C, (Matrix<Rational>{{q(1), q(0), q(-1), q(0)}}));
  EXPECT_EQ(pair.Bhat_i, (Matrix<Rational>{{q(0)}, {q(1)}, {q(0)}, {q(0)}}));
  EXPECT_EQ(pair.Bhat_j.cols(), 0u);
  EXPECT_EQ(pair.horizon(), 4u);
  EXPECT_THROW(build_augmented(si, sj, {1}, {}), Error);
}

TEST(Model, ValidationRejectsBadSystems) {
  SwitchingSystem<Rational> sys;
  sys.modes = {small_mode("1"), small_mode("1")};
  EXPECT_THROW(sys.validate(), Error);
  sys.modes[1].id = "2";
  sys.validate();
  sys.sigma = 1;  // p = 1
  EXPECT_THROW(sys.validate(), Error);
  sys.sigma = 0;
  sys.modes[1].C = Matrix<Rational>(2, 2);
  EXPECT_THROW(sys.validate(), Error);
}

TEST(Model, ObservabilityMatchesExplicitPowers) {
  const auto mode = small_mode("a");
  const auto O = observability_matrix(mode.A, mode.C, 4);
  EXPECT_EQ(O, (Matrix<Rational>{{q(1), q(0)}, {q(0), q(1)}, {q(-1), q(0)}, {q(0), q(-1)}}));
  EXPECT_EQ(O, oracle::naive_obs(mode.A, mode.C, 4));
}

TEST(Model, MarkovToeplitzLayout) {
  const auto mode = small_mode("a");
  const auto T = markov_toeplitz(mode.A, mode.B, mode.C, 3);
  ASSERT_EQ(T.rows(), 3u);
  ASSERT_EQ(T.cols(), 2u);
  // C B = 0, C A B = 1
  EXPECT_EQ(T, (Matrix<Rational>{{q(0), q(0)}, {q(0), q(0)}, {q(1), q(0)}}));
}

TEST(Model, EulerDiscretizationIsExact) {
  Matrix<Rational> Ac{{q(-1), q(1)}, {q(-1), q(0)}};
  Matrix<Rational> Bc{{q(0)}, {q(1)}};
  const auto d = discretize_euler(Ac, Bc, q(1, 10));
  EXPECT_EQ(d.Ad, (Matrix<Rational>{{q(9, 10), q(1, 10)}, {q(-1, 10), q(1)}}));
  EXPECT_EQ(d.Bd, (Matrix<Rational>{{q(0)}, {q(1, 10)}}));
  EXPECT_THROW(discretize_euler(Ac, Bc, q(0)), Error);
}

TEST(Model, ZohMatchesClosedForm) {
  // x' = -x + u: Ad = e^-h, Bd = 1 - e^-h
  Matrix<double> Ac{{-1.0}};
  Matrix<double> Bc{{1.0}};
  const auto d = discretize_zoh(Ac, Bc, 0.1);
  EXPECT_NEAR(d.Ad(0, 0), std::exp(-0.1), 1e-14);
  EXPECT_NEAR(d.Bd(0, 0), 1.0 - std::exp(-0.1), 1e-14);
  // double integrator with a large step exercises the squaring phase
  Matrix<double> A2{{0.0, 1.0}, {0.0, 0.0}};
  Matrix<double> B2{{0.0}, {1.0}};
  const auto d2 = discretize_zoh(A2, B2, 3.0);
  EXPECT_NEAR(d2.Ad(0, 1), 3.0, 1e-12);
  EXPECT_NEAR(d2.Bd(0, 0), 4.5, 1e-12);
  EXPECT_NEAR(d2.Bd(1, 0), 3.0, 1e-12);
}

// The compact stacked equation must reproduce the difference of two
// simulated, attacked trajectories exactly.
TEST(ModelProperty, StackedMapMatchesSimulation) {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<std::size_t> dn(1, 3), dm(1, 2), dp(1, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = dn(rng), m = dm(rng), p = dp(rng), tau = 2 * n + trial % 3;
    const auto si = oracle::random_mode(rng, "i", n, m, p);
    const auto sj = oracle::random_mode(rng, "j", n, m, p);
    const IndexSet di = trial % 2 ? IndexSet{0} : IndexSet{};
    const IndexSet dj = IndexSet{m - 1};
    const auto pair = build_augmented(si, sj, di, dj);
    const auto map = stacked_output_map(pair, tau);

    const auto xi = oracle::random_int_matrix(rng, n, 1, 3);
    const auto xj = oracle::random_int_matrix(rng, n, 1, 3);
    const auto u = oracle::random_int_matrix(rng, tau, m, 3);
    Matrix<Rational> vi(tau, m), vj(tau, m);
    for (std::size_t t = 0; t + 1 < tau; ++t) {
      for (auto k : di) vi(t, k) = oracle::random_int_matrix(rng, 1, 1, 5)(0, 0);
      for (auto k : dj) vj(t, k) = oracle::random_int_matrix(rng, 1, 1, 5)(0, 0);
    }
    const auto wi = oracle::random_int_matrix(rng, tau, p, 5, 0.5);
    const auto wj = oracle::random_int_matrix(rng, tau, p, 5, 0.5);
    const auto ti = simulate(si, xi, tau, u, wi, vi);
    const auto tj = simulate(sj, xj, tau, u, wj, vj);

    const auto U = stack_samples(u.block(0, 0, tau - 1, m));
    const auto Di = stack_samples(restrict_cols(vi, di, true).block(0, 0, tau - 1, di.size()));
    const auto Dj = stack_samples(restrict_cols(vj, dj, true).block(0, 0, tau - 1, dj.size()));
    const auto predicted = map.O * vstack(xi, xj) + map.M_U * U + map.M_i * Di + map.M_j * Dj + stack_samples(wi) -
                           stack_samples(wj);
    ASSERT_EQ(predicted, stack_samples(ti.y) - stack_samples(tj.y)) << "trial " << trial;
  }
}

// Rank of the observability stack no longer grows after the state dimension.
TEST(ModelProperty, CayleyHamiltonRankSaturation) {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<std::size_t> dn(1, 4), dp(1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = dn(rng), p = dp(rng);
    const auto pair = build_augmented(oracle::random_mode(rng, "i", n, 0, p), oracle::random_mode(rng, "j", n, 0, p));
    const std::size_t r2 = rank(observability_matrix(pair, 2 * n));
    ASSERT_EQ(r2, rank(observability_matrix(pair, 4 * n)));
    ASSERT_EQ(r2, oracle::naive_rank(oracle::naive_obs(pair.A, pair.C, 2 * n + 1)));
  }
}
