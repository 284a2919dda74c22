#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "securemode/disting.hpp"
#include "securemode/model.hpp"

namespace securemode {

/// Attacker resources: fixed supports over the whole horizon (cyclic
/// sparsity) and the scale of the injected values.
struct AttackSpec {
  IndexSet sensor_support;
  IndexSet actuator_support;
  double magnitude = 1e3;
  std::uint64_t seed = 0;
};

/// A spec together with its realized (samples x channels) sequences.
template <Scalar T>
struct Attack {
  AttackSpec spec;
  Matrix<T> w;  ///< sensor attack, tau x p
  Matrix<T> v;  ///< actuator attack, tau x m
};

/// One simulated run. Rows are time samples: x has tau + 1 rows, every other
/// sequence tau rows.
template <Scalar T>
struct Trace {
  std::string mode;
  Matrix<T> x;
  Matrix<T> u;
  Matrix<T> y;
  Matrix<T> w;
  Matrix<T> v;

  std::size_t samples() const { return y.rows(); }
};

/// Steps x(t+1) = A x(t) + B (u(t) + v(t)), y(t) = C x(t) + w(t) for t < tau.
/// Empty u / w / v (0 rows) stand for zero sequences.
template <Scalar T>
Trace<T> simulate(const LinearMode<T>& mode, const Matrix<T>& x0, std::size_t tau, const Matrix<T>& u = {},
                  const Matrix<T>& w = {}, const Matrix<T>& v = {}) {
  mode.validate();
  if (tau < 1) throw Error("simulate: tau must be at least 1");
  const std::size_t n = mode.n(), m = mode.m(), p = mode.p();
  if (x0.rows() != n || x0.cols() != 1) throw DimensionError("simulate: x0 is " + x0.shape() + ", expected " + std::to_string(n) + "x1");
  auto fill = [tau](const Matrix<T>& s, std::size_t width, const char* what) {
    if (s.rows() == 0) return Matrix<T>(tau, width);
    if (s.rows() != tau || s.cols() != width)
      throw DimensionError(std::string("simulate: ") + what + " is " + s.shape() + ", expected " + std::to_string(tau) +
                           "x" + std::to_string(width));
    return s;
  };

  Trace<T> tr;
  tr.mode = mode.id;
  tr.u = fill(u, m, "u");
  tr.w = fill(w, p, "w");
  tr.v = fill(v, m, "v");
  tr.x = Matrix<T>(tau + 1, n);
  tr.y = Matrix<T>(tau, p);
  Matrix<T> x = x0;
  for (std::size_t t = 0; t < tau; ++t) {
    tr.x.set_block(t, 0, x.transpose());
    tr.y.set_block(t, 0, (mode.C * x).transpose() + tr.w.row(t));
    x = mode.A * x + mode.B * (tr.u.row(t) + tr.v.row(t)).transpose();
  }
  tr.x.set_block(tau, 0, x.transpose());
  return tr;
}

namespace detail {

// Uniform draw on [-magnitude, magnitude] on a grid of 1/1000; rational
// backends get the exact grid value.
template <Scalar T>
T uniform_value(std::mt19937_64& rng, double magnitude) {
  const auto bound = static_cast<std::int64_t>(magnitude * 1000.0);
  std::uniform_int_distribution<std::int64_t> dist(-bound, bound);
  const std::int64_t k = dist(rng);
  if constexpr (is_exact_v<T>) {
    Rational q(Integer(std::to_string(k), 10), Integer(1000));
    q.canonicalize();
    return q;
  } else {
    return static_cast<double>(k) / 1000.0;
  }
}

inline IndexSet random_support(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  IndexSet out;
  std::sample(all.begin(), all.end(), std::back_inserter(out), static_cast<std::ptrdiff_t>(k), rng);
  return normalize_index_set(out);
}

}  // namespace detail

/// Rows x cols matrix of uniform values in [-magnitude, magnitude].
template <Scalar T>
Matrix<T> random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double magnitude) {
  Matrix<T> out(rows, cols);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = detail::uniform_value<T>(rng, magnitude);
  return out;
}

/// Random supports of exactly sigma sensors and rho actuators, fixed over the
/// horizon, with values uniform in [-magnitude, magnitude] on them.
/// Deterministic in `seed`.
template <Scalar T>
Attack<T> gen_attack(std::size_t p, std::size_t m, std::size_t sigma, std::size_t rho, double magnitude,
                     std::uint64_t seed, std::size_t tau) {
  if (sigma > 0 && sigma >= p) throw Error("gen_attack: need sigma < p, got sigma=" + std::to_string(sigma));
  if (rho > m) throw Error("gen_attack: need rho <= m, got rho=" + std::to_string(rho));
  if (!(magnitude > 0)) throw Error("gen_attack: magnitude must be positive");
  std::mt19937_64 rng(seed);
  Attack<T> a;
  a.spec = {detail::random_support(rng, p, sigma), detail::random_support(rng, m, rho), magnitude, seed};
  a.w = Matrix<T>(tau, p);
  a.v = Matrix<T>(tau, m);
  for (std::size_t t = 0; t < tau; ++t) {
    for (auto k : a.spec.sensor_support) a.w(t, k) = detail::uniform_value<T>(rng, magnitude);
    for (auto k : a.spec.actuator_support) a.v(t, k) = detail::uniform_value<T>(rng, magnitude);
  }
  return a;
}

/// Simulates both modes of the pair from the witness initial states with the
/// witness sensor attacks and no input.
template <Scalar T>
std::pair<Trace<T>, Trace<T>> replay_witness(const AugmentedPair<T>& pair, const Witness<T>& witness) {
  const std::size_t n = pair.n(), p = pair.p();
  if (witness.x0.rows() != 2 * n || witness.x0.cols() != 1) throw Error("replay_witness: x0 shape " + witness.x0.shape());
  if (witness.Wi.cols() != p || witness.Wj.cols() != p || witness.Wi.rows() != witness.Wj.rows() || witness.Wi.rows() == 0)
    throw Error("replay_witness: attack sequences have inconsistent shapes");
  const std::size_t tau = witness.Wi.rows();
  for (std::size_t t = 0; t < tau; ++t)
    for (std::size_t k = 0; k < p; ++k) {
      const bool in_i = std::binary_search(witness.gamma_i.begin(), witness.gamma_i.end(), k);
      const bool in_j = std::binary_search(witness.gamma_j.begin(), witness.gamma_j.end(), k);
      if ((!in_i && !ScalarTraits<T>::is_zero(witness.Wi(t, k))) || (!in_j && !ScalarTraits<T>::is_zero(witness.Wj(t, k))))
        throw Error("replay_witness: attack leaves its declared support");
    }
  const Matrix<T> none(tau, pair.m());
  auto ti = simulate(pair.mode_i, witness.x0.block(0, 0, n, 1), tau, none, witness.Wi, none);
  auto tj = simulate(pair.mode_j, witness.x0.block(n, 0, n, 1), tau, none, witness.Wj, none);
  return {std::move(ti), std::move(tj)};
}

}  // namespace securemode
