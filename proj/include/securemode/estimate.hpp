#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "securemode/linalg.hpp"
#include "securemode/model.hpp"

namespace securemode {

/// No mode explains the trace within the attack budgets.
class EstimationError : public Error {
 public:
  using Error::Error;
};

struct EstimateOptions {
  /// Float backend: consistent iff |residual| <= relative_tol * max(|Y|, 1).
  double relative_tol = 1e-8;
};

template <Scalar T>
struct ConsistencyResult {
  std::string mode;
  bool consistent = false;
  std::optional<IndexSet> gamma;  ///< sensors discarded by the best explanation
  std::optional<IndexSet> delta;  ///< actuators given free attack values
  std::optional<Matrix<T>> x0_estimate;
  double residual = 0.0;          ///< 2-norm of the unexplained part, best support
  std::size_t checked_supports = 0;
};

/// Brute-force consistency check of a trace (Y, U) against every mode.
///
/// For each mode and each sensor support Γ (|Γ| <= σ) and actuator support Δ
/// (|Δ| <= ρ), the rows of Γ are dropped at every sample and
///   Y - T_U U = O x0 + T_Δ D
/// is solved in the least-squares sense for (x0, D). The mode is consistent
/// when some support leaves a zero residual (exact backend) or one below the
/// relative tolerance (float backend). Supports are tried by increasing size,
/// so the reported support is the smallest lexicographically-first one.
///
/// Cost: modes x C(p, <=σ) x C(m, <=ρ) least-squares solves of size
/// (τ p) x (n + (τ-1)|Δ|).
template <Scalar T>
std::vector<ConsistencyResult<T>> consistent_modes(const SwitchingSystem<T>& sys, const Matrix<T>& Y, const Matrix<T>& U,
                                                   std::size_t sigma, std::size_t rho, const EstimateOptions& opts = {}) {
  if (sys.modes.empty()) throw Error("estimate: system has no modes");
  const std::size_t n = sys.n(), m = sys.m(), p = sys.p();
  const std::size_t tau = Y.rows();
  if (tau != 2 * n)
    throw DimensionError("estimate: trace has " + std::to_string(tau) + " samples, expected 2n=" + std::to_string(2 * n));
  if (Y.cols() != p) throw DimensionError("estimate: Y has " + std::to_string(Y.cols()) + " channels, expected p=" + std::to_string(p));
  if (sigma >= p) throw Error("estimate: need sigma < p");
  if (rho > m) throw Error("estimate: need rho <= m");

  // Inputs u(0..tau-2) drive y(0..tau-1).
  Matrix<T> Uin((tau - 1) * m, 1);
  if (U.rows() > 0) {
    if (U.cols() != m || U.rows() + 1 < tau)
      throw DimensionError("estimate: U is " + U.shape() + ", expected at least " + std::to_string(tau - 1) + "x" + std::to_string(m));
    Uin = stack_samples(U.block(0, 0, tau - 1, m));
  }
  const Matrix<T> Ystack = stack_samples(Y);
  double y_norm = 0.0;
  for (const auto& e : Ystack.values()) y_norm += to_double(e) * to_double(e);
  y_norm = std::sqrt(y_norm);

  const auto sensor_sets = subsets_up_to(p, sigma);
  const auto actuator_sets = subsets_up_to(m, rho);

  std::vector<ConsistencyResult<T>> results;
  for (const auto& mode : sys.modes) {
    const Matrix<T> O = observability_matrix(mode.A, mode.C, tau);
    const Matrix<T> target = Ystack - markov_toeplitz(mode.A, mode.B, mode.C, tau) * Uin;
    ConsistencyResult<T> best;
    best.mode = mode.id;
    best.residual = std::numeric_limits<double>::infinity();
    for (const auto& delta : actuator_sets) {
      const Matrix<T> K = hstack(O, markov_toeplitz(mode.A, restrict_cols(mode.B, delta, true), mode.C, tau));
      for (const auto& gamma : sensor_sets) {
        ++best.checked_supports;
        const auto ls = least_squares(restrict_stacked_rows(K, p, gamma), restrict_stacked_rows(target, p, gamma));
        const double residual = std::sqrt(std::max(0.0, to_double(ls.residual_sq)));
        bool ok;
        if constexpr (is_exact_v<T>)
          ok = ScalarTraits<T>::is_zero(ls.residual_sq);
        else
          ok = residual <= opts.relative_tol * std::max(y_norm, 1.0);
        const bool better = ok ? (!best.consistent || gamma.size() + delta.size() < best.gamma->size() + best.delta->size())
                               : (!best.consistent && residual < best.residual);
        if (better) {
          best.consistent = ok;
          best.gamma = gamma;
          best.delta = delta;
          best.x0_estimate = ls.solution.block(0, 0, n, 1);
          best.residual = ok && is_exact_v<T> ? 0.0 : residual;
        }
      }
    }
    results.push_back(std::move(best));
  }
  return results;
}

template <Scalar T>
struct ModeEstimate {
  bool unique = false;
  std::optional<std::string> mode;
  std::vector<ConsistencyResult<T>> candidates;
  /// Set when the trace carries a nonzero known input on a controlled model:
  /// a unique answer there relies on the input being generic.
  bool input_genericity_caveat = false;
};

/// Unique iff exactly one mode is consistent. Throws EstimationError when no
/// mode is.
template <Scalar T>
ModeEstimate<T> estimate_mode(const SwitchingSystem<T>& sys, const Matrix<T>& Y, const Matrix<T>& U, std::size_t sigma,
                              std::size_t rho, const EstimateOptions& opts = {}) {
  ModeEstimate<T> out;
  out.candidates = consistent_modes(sys, Y, U, sigma, rho, opts);
  out.input_genericity_caveat = sys.m() > 0 && U.rows() > 0 && !U.is_zero();
  std::size_t count = 0;
  for (const auto& c : out.candidates)
    if (c.consistent) {
      ++count;
      out.mode = c.mode;
    }
  if (count == 0) throw EstimationError("no consistent mode: the trace is not explained by any mode within the attack budgets");
  out.unique = count == 1;
  if (!out.unique) out.mode.reset();
  return out;
}

}  // namespace securemode
