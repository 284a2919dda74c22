#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "securemode/index_set.hpp"
#include "securemode/linalg.hpp"
#include "securemode/matrix.hpp"

namespace securemode {

/// One discrete mode: x(t+1) = A x(t) + B u(t), y(t) = C x(t).
/// Autonomous modes carry an n x 0 input matrix (or a zero B).
template <Scalar T>
struct LinearMode {
  std::string id;
  Matrix<T> A;
  Matrix<T> B;
  Matrix<T> C;

  std::size_t n() const { return A.rows(); }
  std::size_t m() const { return B.cols(); }
  std::size_t p() const { return C.rows(); }

  void validate() const {
    const std::string where = "mode " + id;
    if (A.rows() != A.cols()) throw DimensionError(where + ": A must be square, got " + A.shape());
    if (B.rows() != n()) throw DimensionError(where + ": B has " + std::to_string(B.rows()) + " rows, expected " + std::to_string(n()));
    if (C.cols() != n()) throw DimensionError(where + ": C has " + std::to_string(C.cols()) + " columns, expected " + std::to_string(n()));
    if (p() < 1) throw DimensionError(where + ": at least one output required");
  }

  template <Scalar U>
  LinearMode<U> cast() const {
    return {id, A.template cast<U>(), B.template cast<U>(), C.template cast<U>()};
  }
};

/// Finite family of modes sharing (n, m, p), with sensor/actuator attack
/// budgets and the minimum dwell time.
template <Scalar T>
struct SwitchingSystem {
  std::vector<LinearMode<T>> modes;
  std::size_t sigma = 0;
  std::size_t rho = 0;
  std::size_t dwell = 1;

  std::size_t n() const { return modes.empty() ? 0 : modes.front().n(); }
  std::size_t m() const { return modes.empty() ? 0 : modes.front().m(); }
  std::size_t p() const { return modes.empty() ? 0 : modes.front().p(); }

  const LinearMode<T>& mode(const std::string& id) const {
    for (const auto& md : modes)
      if (md.id == id) return md;
    throw Error("unknown mode \"" + id + "\"");
  }

  void validate() const {
    if (modes.size() < 2) throw Error("at least two modes required");
    for (std::size_t k = 0; k < modes.size(); ++k) {
      modes[k].validate();
      if (modes[k].n() != n() || modes[k].m() != m() || modes[k].p() != p())
        throw DimensionError("mode " + modes[k].id + ": dimensions differ from mode " + modes.front().id);
      for (std::size_t l = 0; l < k; ++l)
        if (modes[l].id == modes[k].id) throw Error("duplicate mode id \"" + modes[k].id + "\"");
    }
    if (sigma >= p())
      throw Error("sensor budget sigma=" + std::to_string(sigma) + " out of range, need sigma < p=" + std::to_string(p()));
    if (rho > m())
      throw Error("actuator budget rho=" + std::to_string(rho) + " out of range, need rho <= m=" + std::to_string(m()));
    if (dwell < 1) throw Error("dwell time must be at least 1");
  }

  template <Scalar U>
  SwitchingSystem<U> cast() const {
    SwitchingSystem<U> out;
    out.sigma = sigma;
    out.rho = rho;
    out.dwell = dwell;
    for (const auto& md : modes) out.modes.push_back(md.template cast<U>());
    return out;
  }
};

/// Supports of one attack scenario on a mode pair: Γ is the union of the two
/// sensor supports, Δ_i / Δ_j the attacked actuators of each mode.
struct AttackPattern {
  IndexSet gamma;
  IndexSet delta_i;
  IndexSet delta_j;

  void validate(std::size_t p, std::size_t m) const {
    validate_index_set(gamma, p, "sensor set");
    validate_index_set(delta_i, m, "actuator set of mode i");
    validate_index_set(delta_j, m, "actuator set of mode j");
  }

  friend bool operator==(const AttackPattern&, const AttackPattern&) = default;
};

/// Parallel interconnection of two modes whose output is y_i - y_j.
template <Scalar T>
struct AugmentedPair {
  LinearMode<T> mode_i;
  LinearMode<T> mode_j;
  IndexSet delta_i;
  IndexSet delta_j;
  Matrix<T> A;       ///< diag(A_i, A_j), 2n x 2n
  Matrix<T> B;       ///< [B_i; B_j], 2n x m
  Matrix<T> C;       ///< [C_i, -C_j], p x 2n
  Matrix<T> Bhat_i;  ///< [B_i restricted to Δ_i; 0]
  Matrix<T> Bhat_j;  ///< [0; B_j restricted to Δ_j]

  std::size_t n() const { return mode_i.n(); }
  std::size_t m() const { return mode_i.m(); }
  std::size_t p() const { return mode_i.p(); }
  std::size_t state_dim() const { return A.rows(); }
  std::size_t horizon() const { return 2 * n(); }

  /// [B, Bhat_i, Bhat_j]: every channel the ISA treats as free.
  Matrix<T> all_inputs() const { return hstack(hstack(B, Bhat_i), Bhat_j); }
};

template <Scalar T>
AugmentedPair<T> build_augmented(const LinearMode<T>& si, const LinearMode<T>& sj, const IndexSet& delta_i = {},
                                 const IndexSet& delta_j = {}) {
  si.validate();
  sj.validate();
  if (si.n() != sj.n() || si.m() != sj.m() || si.p() != sj.p())
    throw DimensionError("modes " + si.id + " and " + sj.id + " have different dimensions");
  validate_index_set(delta_i, si.m(), "actuator set of mode " + si.id);
  validate_index_set(delta_j, sj.m(), "actuator set of mode " + sj.id);
  const std::size_t n = si.n();

  AugmentedPair<T> pair{si, sj, delta_i, delta_j, {}, {}, {}, {}, {}};
  pair.A = block_diag(si.A, sj.A);
  pair.B = vstack(si.B, sj.B);
  pair.C = hstack(si.C, Matrix<T>(-sj.C));
  pair.Bhat_i = vstack(restrict_cols(si.B, delta_i, true), Matrix<T>(n, delta_i.size()));
  pair.Bhat_j = vstack(Matrix<T>(n, delta_j.size()), restrict_cols(sj.B, delta_j, true));
  return pair;
}

/// [C; C A; ...; C A^(steps-1)].
template <Scalar T>
Matrix<T> observability_matrix(const Matrix<T>& A, const Matrix<T>& C, std::size_t steps) {
  if (steps < 1) throw Error("observability_matrix: steps must be at least 1");
  if (A.rows() != A.cols() || C.cols() != A.rows()) throw DimensionError("observability_matrix: A " + A.shape() + ", C " + C.shape());
  Matrix<T> out(steps * C.rows(), A.cols());
  Matrix<T> block = C;
  for (std::size_t k = 0; k < steps; ++k) {
    out.set_block(k * C.rows(), 0, block);
    if (k + 1 < steps) block = block * A;
  }
  return out;
}

/// Augmented observability stack; steps = 0 means the default horizon 2n.
template <Scalar T>
Matrix<T> observability_matrix(const AugmentedPair<T>& pair, std::size_t steps = 0) {
  return observability_matrix(pair.A, pair.C, steps == 0 ? pair.horizon() : steps);
}

/// Block-lower-triangular Toeplitz map from inputs u(0..steps-2) to outputs
/// y(0..steps-1): block (r, c) = C A^(r-c-1) B for r > c, zero otherwise.
/// Size (steps p) x ((steps-1) cols(B)).
template <Scalar T>
Matrix<T> markov_toeplitz(const Matrix<T>& A, const Matrix<T>& B, const Matrix<T>& C, std::size_t steps) {
  if (steps < 1) throw Error("markov_toeplitz: steps must be at least 1");
  const std::size_t p = C.rows(), m = B.cols();
  Matrix<T> out(steps * p, (steps - 1) * m);
  if (m == 0 || steps == 1) return out;
  std::vector<Matrix<T>> markov;  // C A^k B, k = 0..steps-2
  Matrix<T> AkB = B;
  for (std::size_t k = 0; k + 1 < steps; ++k) {
    markov.push_back(C * AkB);
    AkB = A * AkB;
  }
  for (std::size_t r = 1; r < steps; ++r)
    for (std::size_t c = 0; c < r; ++c) out.set_block(r * p, c * m, markov[r - c - 1]);
  return out;
}

template <Scalar T>
struct MarkovMatrices {
  Matrix<T> M_U;  ///< response to the common input
  Matrix<T> M_i;  ///< response to mode-i actuator attacks (through Bhat_i)
  Matrix<T> M_j;  ///< response to mode-j actuator attacks (through Bhat_j)
};

template <Scalar T>
MarkovMatrices<T> markov_matrices(const AugmentedPair<T>& pair, std::size_t steps = 0) {
  const std::size_t tau = steps == 0 ? pair.horizon() : steps;
  return {markov_toeplitz(pair.A, pair.B, pair.C, tau), markov_toeplitz(pair.A, pair.Bhat_i, pair.C, tau),
          markov_toeplitz(pair.A, pair.Bhat_j, pair.C, tau)};
}

/// Matrices of the stacked difference output over tau samples:
///   Y = O x0 + M_U U + M_i D_i + M_j D_j + W_i - W_j,
/// with Y = y_i - y_j stacked by sample and x0 = (x0_i, x0_j). M_j already
/// carries the minus sign of the second mode through C = [C_i, -C_j].
template <Scalar T>
struct StackedOutputMap {
  Matrix<T> O;
  Matrix<T> M_U;
  Matrix<T> M_i;
  Matrix<T> M_j;
};

template <Scalar T>
StackedOutputMap<T> stacked_output_map(const AugmentedPair<T>& pair, std::size_t tau) {
  if (tau < 1) throw Error("stacked_output_map: tau must be at least 1");
  auto mk = markov_matrices(pair, tau);
  return {observability_matrix(pair.A, pair.C, tau), std::move(mk.M_U), std::move(mk.M_i), std::move(mk.M_j)};
}

enum class Discretization { euler, zoh };

inline std::string to_string(Discretization d) { return d == Discretization::euler ? "euler" : "zoh"; }

inline Discretization parse_discretization(const std::string& s) {
  if (s == "euler") return Discretization::euler;
  if (s == "zoh") return Discretization::zoh;
  throw ParseError("unknown discretization \"" + s + "\" (expected euler or zoh)");
}

template <Scalar T>
struct DiscreteMatrices {
  Matrix<T> Ad;
  Matrix<T> Bd;
};

/// Forward Euler: Ad = I + h Ac, Bd = h Bc. Stays exact on rational input.
template <Scalar T>
DiscreteMatrices<T> discretize_euler(const Matrix<T>& Ac, const Matrix<T>& Bc, const T& h) {
  if (!(h > 0)) throw Error("discretize: step h must be positive");
  if (Ac.rows() != Ac.cols() || Bc.rows() != Ac.rows()) throw DimensionError("discretize: Ac " + Ac.shape() + ", Bc " + Bc.shape());
  return {Matrix<T>::identity(Ac.rows()) + h * Ac, h * Bc};
}

/// Zero-order hold. exp([[Ac, Bc], [0, 0]] h) = [[Ad, Bd], [0, I]], evaluated
/// by scaling and squaring a truncated Taylor series.
inline DiscreteMatrices<double> discretize_zoh(const Matrix<double>& Ac, const Matrix<double>& Bc, double h) {
  if (!(h > 0)) throw Error("discretize: step h must be positive");
  if (Ac.rows() != Ac.cols() || Bc.rows() != Ac.rows()) throw DimensionError("discretize: Ac " + Ac.shape() + ", Bc " + Bc.shape());
  const std::size_t n = Ac.rows(), m = Bc.cols(), d = n + m;
  Matrix<double> E(d, d);
  E.set_block(0, 0, h * Ac);
  E.set_block(0, n, h * Bc);

  double norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) row += std::abs(E(i, j));
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  E *= std::ldexp(1.0, -squarings);

  Matrix<double> result = Matrix<double>::identity(d);
  Matrix<double> term = Matrix<double>::identity(d);
  for (int k = 1; k <= 30; ++k) {
    term = term * E;
    term *= 1.0 / k;
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return {result.block(0, 0, n, n), result.block(0, n, n, m)};
}

template <Scalar T>
DiscreteMatrices<T> discretize(const Matrix<T>& Ac, const Matrix<T>& Bc, const T& h, Discretization method) {
  if (method == Discretization::euler) return discretize_euler(Ac, Bc, h);
  if constexpr (std::is_same_v<T, double>) {
    return discretize_zoh(Ac, Bc, h);
  } else {
    auto d = discretize_zoh(Ac.template cast<double>(), Bc.template cast<double>(), to_double(h));
    return {d.Ad.template cast<T>(), d.Bd.template cast<T>()};
  }
}

}  // namespace securemode
