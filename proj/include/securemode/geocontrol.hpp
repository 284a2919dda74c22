#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "securemode/model.hpp"
#include "securemode/subspace.hpp"

namespace securemode {

template <Scalar T>
struct InvariantResult {
  Subspace<T> W;
  std::size_t iterations = 0;
  IndexSet gamma;
  std::vector<std::size_t> dims;  ///< dim V_k along the recursion, V_0 first
};

/// Maximal (A, Bfull)-controlled invariant subspace contained in ker(Cbar):
///   V_0 = ker(Cbar),  V_{k+1} = V_k ∩ A^{-1}(V_k + Im Bfull).
/// The sequence is non-increasing, so it settles in at most d steps.
template <Scalar T>
InvariantResult<T> max_controlled_invariant(const Matrix<T>& A, const Matrix<T>& Bfull, const Matrix<T>& Cbar) {
  const std::size_t d = A.rows();
  if (A.cols() != d) throw DimensionError("max_controlled_invariant: A must be square, got " + A.shape());
  if (Bfull.rows() != d) throw DimensionError("max_controlled_invariant: B is " + Bfull.shape() + ", A is " + A.shape());
  if (Cbar.cols() != d) throw DimensionError("max_controlled_invariant: C is " + Cbar.shape() + ", A is " + A.shape());

  const Subspace<T> inputs = image(Bfull);
  InvariantResult<T> out;
  Subspace<T> V = Cbar.rows() == 0 ? Subspace<T>::full(d) : kernel(Cbar);
  out.dims.push_back(V.dim());
  while (true) {
    Subspace<T> next = intersect(V, preimage(A, sum(V, inputs)));
    ++out.iterations;
    const bool fixed = next.dim() == V.dim();
    V = std::move(next);
    if (fixed) break;
    out.dims.push_back(V.dim());
  }
  out.W = std::move(V);
  return out;
}

/// W_{ij,Γ}: maximal (A_ij, [B_ij Bhat_i Bhat_j])-controlled invariant inside
/// ker of C_ij with the sensor rows in Γ removed.
template <Scalar T>
InvariantResult<T> pair_invariant(const AugmentedPair<T>& pair, const IndexSet& gamma) {
  validate_index_set(gamma, pair.p(), "sensor set");
  auto res = max_controlled_invariant(pair.A, pair.all_inputs(), restrict_rows(pair.C, gamma));
  res.gamma = gamma;
  return res;
}

template <Scalar T>
struct OmegaStar {
  bool exists = false;
  std::optional<Subspace<T>> omega;
  InvariantResult<T> invariant;
};

/// Ω* exists iff Im([B_ij Bhat_i]) ⊆ W_{ij,Γ}, and then Ω* = W_{ij,Γ}.
template <Scalar T>
OmegaStar<T> omega_star(const AugmentedPair<T>& pair, const IndexSet& gamma) {
  OmegaStar<T> out;
  out.invariant = pair_invariant(pair, gamma);
  out.exists = includes(out.invariant.W, image(hstack(pair.B, pair.Bhat_i)));
  if (out.exists) out.omega = out.invariant.W;
  return out;
}

/// Im(B) + Im(Bhat_a) ⊆ W + Im(Bhat_b), given W.
template <Scalar T>
bool attack_absorbs(const Subspace<T>& W, const Matrix<T>& B, const Matrix<T>& driven, const Matrix<T>& matching) {
  return includes(sum(W, image(matching)), image(hstack(B, driven)));
}

/// True iff the compact output equation can be matched by some (x0, D_j) for
/// every U, D_i, W_i, W_j: Im(B_ij) + Im(Bhat_i) ⊆ W_{ij,Γ} + Im(Bhat_j).
template <Scalar T>
bool solvable(const AugmentedPair<T>& pair, const IndexSet& gamma) {
  return attack_absorbs(pair_invariant(pair, gamma).W, pair.B, pair.Bhat_i, pair.Bhat_j);
}

}  // namespace securemode
