#pragma once

#include <cstddef>
#include <string>

#include "securemode/linalg.hpp"

namespace securemode {

/// A linear subspace of T^d held by a basis of independent columns. The zero
/// subspace has a d x 0 basis. Exact bases are kept in the canonical
/// column-reduced form produced by `image_basis`.
template <Scalar T>
class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(std::size_t ambient) { return Subspace(Matrix<T>(ambient, 0)); }
  static Subspace full(std::size_t ambient) { return Subspace(Matrix<T>::identity(ambient)); }

  /// Span of the columns of `generators` (need not be independent).
  static Subspace span(const Matrix<T>& generators) { return Subspace(image_basis(generators)); }

  std::size_t ambient_dim() const { return basis_.rows(); }
  std::size_t dim() const { return basis_.cols(); }
  const Matrix<T>& basis() const { return basis_; }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_dim(); }

  /// True iff the column vector `x` lies in the subspace.
  bool contains(const Matrix<T>& x) const {
    if (x.rows() != ambient_dim() || x.cols() != 1) throw DimensionError("contains: vector shape " + x.shape());
    return rank(hstack(basis_, x)) == dim();
  }

 private:
  explicit Subspace(Matrix<T> basis) : basis_(std::move(basis)) {}

  Matrix<T> basis_;
};

namespace detail {
template <Scalar T>
void require_same_ambient(const Subspace<T>& v, const Subspace<T>& w, const char* op) {
  if (v.ambient_dim() != w.ambient_dim())
    throw DimensionError(std::string(op) + ": ambient dimension " + std::to_string(v.ambient_dim()) + " vs " +
                         std::to_string(w.ambient_dim()));
}
}  // namespace detail

template <Scalar T>
Subspace<T> image(const Matrix<T>& m) {
  return Subspace<T>::span(m);
}

template <Scalar T>
Subspace<T> kernel(const Matrix<T>& m) {
  return Subspace<T>::span(kernel_basis(m));
}

template <Scalar T>
Subspace<T> sum(const Subspace<T>& v, const Subspace<T>& w) {
  detail::require_same_ambient(v, w, "sum");
  return Subspace<T>::span(hstack(v.basis(), w.basis()));
}

/// V ∩ W from the kernel of [basis(V) | -basis(W)]: each kernel vector (a, b)
/// gives the common element basis(V) a.
template <Scalar T>
Subspace<T> intersect(const Subspace<T>& v, const Subspace<T>& w) {
  detail::require_same_ambient(v, w, "intersect");
  if (v.is_zero() || w.is_zero()) return Subspace<T>::zero(v.ambient_dim());
  const Matrix<T> coeffs = kernel_basis(hstack(v.basis(), -w.basis()));
  return Subspace<T>::span(v.basis() * coeffs.block(0, 0, v.dim(), coeffs.cols()));
}

/// {x : A x ∈ V} = ker(P A), where the rows of P span the orthogonal
/// complement of V.
template <Scalar T>
Subspace<T> preimage(const Matrix<T>& a, const Subspace<T>& v) {
  if (a.rows() != a.cols()) throw DimensionError("preimage: A must be square, got " + a.shape());
  if (v.ambient_dim() != a.rows())
    throw DimensionError("preimage: A is " + a.shape() + " but V lives in dimension " + std::to_string(v.ambient_dim()));
  if (v.is_full()) return Subspace<T>::full(a.cols());
  const Matrix<T> annihilator = kernel_basis(v.basis().transpose()).transpose();
  return kernel(annihilator * a);
}

/// True iff W ⊆ V.
template <Scalar T>
bool includes(const Subspace<T>& v, const Subspace<T>& w) {
  detail::require_same_ambient(v, w, "includes");
  if (w.is_zero()) return true;
  return rank(hstack(v.basis(), w.basis())) == v.dim();
}

template <Scalar T>
bool operator==(const Subspace<T>& v, const Subspace<T>& w) {
  return v.ambient_dim() == w.ambient_dim() && v.dim() == w.dim() && includes(v, w) && includes(w, v);
}

}  // namespace securemode
