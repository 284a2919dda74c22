#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "securemode/index_set.hpp"
#include "securemode/matrix.hpp"

namespace securemode {

/// Float-backend numerical-rank options. When `rank_tol` is unset the
/// threshold is max(rows, cols) * sigma_max * machine epsilon.
struct FloatTolerance {
  std::optional<double> rank_tol;
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return e;
}

inline Matrix<double> from_eigen(const Eigen::MatrixXd& e) {
  Matrix<double> m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

struct FloatSvd {
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
  std::size_t rank = 0;
};

inline FloatSvd float_svd(const Matrix<double>& m, const FloatTolerance& tol) {
  FloatSvd out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double threshold = tol.rank_tol.value_or(static_cast<double>(std::max(m.rows(), m.cols())) * smax *
                                                 std::numeric_limits<double>::epsilon());
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > threshold) ++out.rank;
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  return out;
}

// Multiplies each row by the lcm of its denominators, giving an integer matrix
// with the same row space.
inline std::vector<std::vector<Integer>> integer_rows(const Matrix<Rational>& m) {
  std::vector<std::vector<Integer>> out(m.rows(), std::vector<Integer>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j).get_num() * (l / m(i, j).get_den());
  }
  return out;
}

}  // namespace detail

/// Exact rank by fraction-free (Bareiss) elimination over integers.
inline std::size_t rank(const Matrix<Rational>& m) {
  if (m.empty()) return 0;
  auto a = detail::integer_rows(m);
  const std::size_t rows = m.rows(), cols = m.cols();
  Integer prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        a[i][j] = a[i][j] * a[r][c] - a[i][c] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

/// Numerical rank by singular-value thresholding.
inline std::size_t rank(const Matrix<double>& m, const FloatTolerance& tol = {}) {
  if (m.empty()) return 0;
  return detail::float_svd(m, tol).rank;
}

/// Reduced row echelon form with pivot column list. Exact backend only.
struct RowEchelon {
  Matrix<Rational> reduced;
  std::vector<std::size_t> pivots;
};

inline RowEchelon rref(Matrix<Rational> a) {
  RowEchelon out;
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && sgn(a(piv, c)) == 0) ++piv;
    if (piv == rows) continue;
    a.swap_rows(piv, r);
    const Rational inv = 1 / a(r, c);
    for (std::size_t j = c; j < cols; ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sgn(a(i, c)) == 0) continue;
      const Rational f = a(i, c);
      for (std::size_t j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = std::move(a);
  return out;
}

/// Canonical column basis of the column space: the transposed nonzero rows of
/// rref(m^T). Unique for a given subspace.
inline Matrix<Rational> image_basis(const Matrix<Rational>& m) {
  if (m.cols() == 0 || m.rows() == 0) return Matrix<Rational>(m.rows(), 0);
  RowEchelon e = rref(m.transpose());
  const std::size_t r = e.pivots.size();
  Matrix<Rational> basis(m.rows(), r);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t i = 0; i < m.rows(); ++i) basis(i, k) = e.reduced(k, i);
  return basis;
}

inline Matrix<double> image_basis(const Matrix<double>& m, const FloatTolerance& tol = {}) {
  if (m.cols() == 0 || m.rows() == 0) return Matrix<double>(m.rows(), 0);
  auto svd = detail::float_svd(m, tol);
  return detail::from_eigen(svd.U.leftCols(static_cast<Eigen::Index>(svd.rank)));
}

/// Basis of {x : m x = 0}, one vector per free column of rref(m).
inline Matrix<Rational> kernel_basis(const Matrix<Rational>& m) {
  const std::size_t cols = m.cols();
  if (m.rows() == 0) return Matrix<Rational>::identity(cols);
  RowEchelon e = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  Matrix<Rational> basis(cols, cols - e.pivots.size());
  std::size_t k = 0;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    basis(free, k) = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) basis(e.pivots[r], k) = -e.reduced(r, free);
    ++k;
  }
  return basis;
}

inline Matrix<double> kernel_basis(const Matrix<double>& m, const FloatTolerance& tol = {}) {
  const std::size_t cols = m.cols();
  if (m.rows() == 0) return Matrix<double>::identity(cols);
  if (cols == 0) return Matrix<double>(0, 0);
  auto svd = detail::float_svd(m, tol);
  const auto r = static_cast<Eigen::Index>(svd.rank);
  return detail::from_eigen(svd.V.rightCols(static_cast<Eigen::Index>(cols) - r));
}

/// Result of a least-squares solve of K z ~ r.
template <Scalar T>
struct LeastSquares {
  Matrix<T> solution;     ///< one minimizer (exact: particular solution of the normal equations)
  T residual_sq = T(0);   ///< squared 2-norm of r - K z
};

/// Minimizes |K z - r|. Exact backend solves the normal equations by RREF, so
/// the residual is exact and zero iff r lies in Im(K).
inline LeastSquares<Rational> least_squares(const Matrix<Rational>& K, const Matrix<Rational>& r) {
  if (K.rows() != r.rows() || r.cols() != 1) throw DimensionError("least_squares shape " + K.shape() + " vs " + r.shape());
  LeastSquares<Rational> out;
  out.solution = Matrix<Rational>(K.cols(), 1);
  if (K.cols() > 0) {
    const Matrix<Rational> Kt = K.transpose();
    RowEchelon e = rref(hstack(Kt * K, Kt * r));
    for (std::size_t k = 0; k < e.pivots.size(); ++k) out.solution(e.pivots[k], 0) = e.reduced(k, K.cols());
  }
  const Matrix<Rational> res = r - K * out.solution;
  for (std::size_t i = 0; i < res.rows(); ++i) out.residual_sq += res(i, 0) * res(i, 0);
  return out;
}

inline LeastSquares<double> least_squares(const Matrix<double>& K, const Matrix<double>& r) {
  if (K.rows() != r.rows() || r.cols() != 1) throw DimensionError("least_squares shape " + K.shape() + " vs " + r.shape());
  LeastSquares<double> out;
  out.solution = Matrix<double>(K.cols(), 1);
  if (K.cols() > 0 && K.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(detail::to_eigen(K));
    out.solution = detail::from_eigen(cod.solve(detail::to_eigen(r)));
  }
  const Matrix<double> res = r - K * out.solution;
  for (std::size_t i = 0; i < res.rows(); ++i) out.residual_sq += res(i, 0) * res(i, 0);
  return out;
}

/// Exact backend: every entry is zero. Float backend: max |entry| is within
/// `rel_tol * scale`.
template <Scalar T>
bool is_negligible(const Matrix<T>& m, double scale = 1.0, double rel_tol = 1e-9) {
  if constexpr (is_exact_v<T>) {
    return m.is_zero();
  } else {
    double worst = 0.0;
    for (double x : m.values()) worst = std::max(worst, std::abs(x));
    return worst <= rel_tol * std::max(scale, 1.0);
  }
}

template <Scalar T>
double max_abs(const Matrix<T>& m) {
  double worst = 0.0;
  for (const auto& x : m.values()) worst = std::max(worst, std::abs(to_double(x)));
  return worst;
}

/// M with the rows listed in `gamma` deleted, order preserved.
template <Scalar T>
Matrix<T> restrict_rows(const Matrix<T>& m, const IndexSet& gamma) {
  validate_index_set(gamma, m.rows(), "restrict_rows");
  const IndexSet keep = complement(gamma, m.rows());
  Matrix<T> out(keep.size(), m.cols());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(keep[i], j);
  return out;
}

/// keep = true: only the columns in `pi`; keep = false: those columns deleted.
template <Scalar T>
Matrix<T> restrict_cols(const Matrix<T>& m, const IndexSet& pi, bool keep) {
  validate_index_set(pi, m.cols(), "restrict_cols");
  const IndexSet chosen = keep ? pi : complement(pi, m.cols());
  Matrix<T> out(m.rows(), chosen.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < chosen.size(); ++j) out(i, j) = m(i, chosen[j]);
  return out;
}

/// Deletes, from a stacked (samples * channels) matrix, every sample's rows
/// for the channels in `gamma`.
template <Scalar T>
Matrix<T> restrict_stacked_rows(const Matrix<T>& stacked, std::size_t channels, const IndexSet& gamma) {
  if (channels == 0 || stacked.rows() % channels != 0) throw DimensionError("stacked rows not a multiple of channels");
  validate_index_set(gamma, channels, "restrict_stacked_rows");
  IndexSet drop;
  for (std::size_t t = 0; t < stacked.rows() / channels; ++t)
    for (auto k : gamma) drop.push_back(t * channels + k);
  return restrict_rows(stacked, drop);
}

}  // namespace securemode
