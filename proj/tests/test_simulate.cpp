#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace securemode;

namespace {
Rational q(long a, long b = 1) { return make_rational(a, b); }
}  // namespace

TEST(Simulate, ScalarRecursionByHand) {
  LinearMode<Rational> mode{"s", Matrix<Rational>{{q(1, 2)}}, Matrix<Rational>{{q(1)}}, Matrix<Rational>{{q(2)}}};
  const Matrix<Rational> u{{q(1)}, {q(0)}, {q(0)}};
  const Matrix<Rational> w{{q(0)}, {q(5)}, {q(0)}};
  const auto tr = simulate(mode, Matrix<Rational>{{q(4)}}, 3, u, w);
  // x = 4, 3, 3/2, 3/4; y = 2x + w
  EXPECT_EQ(tr.x, (Matrix<Rational>{{q(4)}, {q(3)}, {q(3, 2)}, {q(3, 4)}}));
  EXPECT_EQ(tr.y, (Matrix<Rational>{{q(8)}, {q(11)}, {q(3)}}));
  EXPECT_EQ(tr.samples(), 3u);
}

TEST(Simulate, ActuatorAttackAddsToInput) {
  LinearMode<Rational> mode{"s", Matrix<Rational>{{q(0)}}, Matrix<Rational>{{q(1)}}, Matrix<Rational>{{q(1)}}};
  const Matrix<Rational> v{{q(7)}, {q(0)}};
  const auto tr = simulate(mode, Matrix<Rational>{{q(0)}}, 2, Matrix<Rational>{}, Matrix<Rational>{}, v);
  EXPECT_EQ(tr.y(1, 0), q(7));
}

TEST(Simulate, ShapeErrors) {
  LinearMode<Rational> mode{"s", Matrix<Rational>{{q(0)}}, Matrix<Rational>{{q(1)}}, Matrix<Rational>{{q(1)}}};
  EXPECT_THROW(simulate(mode, Matrix<Rational>(2, 1), 2), DimensionError);
  EXPECT_THROW(simulate(mode, Matrix<Rational>(1, 1), 2, Matrix<Rational>(3, 1)), DimensionError);
  EXPECT_THROW(simulate(mode, Matrix<Rational>(1, 1), 0), Error);
}

TEST(Simulate, AttackSupportsAreCyclicAndBounded) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = gen_attack<Rational>(5, 3, 2, 1, 1e6, seed, 9);
    ASSERT_EQ(a.spec.sensor_support.size(), 2u);
    ASSERT_EQ(a.spec.actuator_support.size(), 1u);
    for (std::size_t t = 0; t < 9; ++t) {
      for (std::size_t k = 0; k < 5; ++k) {
        const bool in = std::count(a.spec.sensor_support.begin(), a.spec.sensor_support.end(), k) > 0;
        if (!in) {
          ASSERT_EQ(a.w(t, k), 0);
        }
        ASSERT_LE(abs(a.w(t, k)), Rational(1000000));
      }
      for (std::size_t k = 0; k < 3; ++k)
        if (k != a.spec.actuator_support[0]) {
          ASSERT_EQ(a.v(t, k), 0);
        }
    }
  }
}

TEST(Simulate, AttackGenerationIsSeedDeterministic) {
  const auto a = gen_attack<Rational>(3, 1, 1, 0, 1e3, 42, 4);
  const auto b = gen_attack<Rational>(3, 1, 1, 0, 1e3, 42, 4);
  const auto c = gen_attack<Rational>(3, 1, 1, 0, 1e3, 43, 4);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.spec.sensor_support, b.spec.sensor_support);
  EXPECT_FALSE(a.w == c.w);
  const auto f = gen_attack<double>(3, 1, 1, 0, 1e3, 42, 4);
  for (std::size_t k = 0; k < f.w.size(); ++k) EXPECT_NEAR(f.w[k], to_double(a.w[k]), 1e-9);
}

TEST(Simulate, AttackBudgetErrors) {
  EXPECT_THROW(gen_attack<Rational>(3, 1, 3, 0, 1.0, 0, 2), Error);
  EXPECT_THROW(gen_attack<Rational>(3, 1, 1, 2, 1.0, 0, 2), Error);
  EXPECT_THROW(gen_attack<Rational>(3, 1, 1, 0, 0.0, 0, 2), Error);
}

TEST(Simulate, ReplayRejectsOffSupportAttack) {
  LinearMode<Rational> a{"a", Matrix<Rational>{{q(1)}}, Matrix<Rational>(1, 0), Matrix<Rational>{{q(1)}, {q(1)}, {q(1)}}};
  const auto pair = build_augmented(a, a);
  Witness<Rational> w;
  w.x0 = Matrix<Rational>::column({q(1), q(1)});
  w.gamma = {0, 1};
  w.gamma_i = {0};
  w.gamma_j = {1};
  w.Wi = Matrix<Rational>(2, 3);
  w.Wj = Matrix<Rational>(2, 3);
  w.Wi(0, 2) = 1;
  EXPECT_THROW(replay_witness(pair, w), Error);
}
