#pragma once

#include <ddmlab/la/dense.hpp>

#include <cmath>
#include <string>
#include <variant>
#include <vector>

namespace ddm {

/// Pivots below this fraction of ||A||_F are treated as zero.
inline constexpr double singular_pivot_tolerance = 1e-14;

/// PA = LU with partial pivoting.
template <Scalar T>
class DenseLU {
public:
  explicit DenseLU(DenseMatrix<T> A) : lu_(std::move(A))
  {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n)
      throw DimensionMismatch("dense_lu_factor: matrix not square");
    lu_.check_finite("dense_lu_factor");
    const double tol = singular_pivot_tolerance * lu_.frobenius_norm();
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          p = i;
        }
      if (best <= tol || best == 0.0)
        throw SingularMatrix("dense_lu_factor: pivot " + std::to_string(best) + " at column " + std::to_string(k));
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j)
          std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
      }
      const T pivot = lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i)
        lu_(i, k) /= pivot;
      for (std::size_t j = k + 1; j < n; ++j) {
        const T u = lu_(k, j);
        if (u == T{})
          continue;
        auto cj = lu_.col(j);
        auto ck = lu_.col(k);
        for (std::size_t i = k + 1; i < n; ++i)
          cj[i] -= ck[i] * u;
      }
    }
  }

  std::size_t size() const { return lu_.rows(); }

  Vector<T> solve(const Vector<T>& b) const
  {
    const std::size_t n = size();
    require_same_size(b.size(), n, "factor_solve");
    Vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = b[perm_[i]];
    for (std::size_t j = 0; j < n; ++j) {
      const T xj = x[j];
      auto c = lu_.col(j);
      for (std::size_t i = j + 1; i < n; ++i)
        x[i] -= c[i] * xj;
    }
    for (std::size_t j = n; j-- > 0;) {
      x[j] /= lu_(j, j);
      const T xj = x[j];
      auto c = lu_.col(j);
      for (std::size_t i = 0; i < j; ++i)
        x[i] -= c[i] * xj;
    }
    return x;
  }

private:
  DenseMatrix<T> lu_;
  std::vector<std::size_t> perm_;
};

/// A = L L^* for Hermitian positive definite A. Only the lower triangle of A is read.
template <Scalar T>
class DenseCholesky {
public:
  explicit DenseCholesky(DenseMatrix<T> A) : l_(std::move(A))
  {
    const std::size_t n = l_.rows();
    if (l_.cols() != n)
      throw DimensionMismatch("dense_cholesky_factor: matrix not square");
    l_.check_finite("dense_cholesky_factor");
    const double tol = singular_pivot_tolerance * l_.frobenius_norm();
    for (std::size_t j = 0; j < n; ++j) {
      double d = real_part(l_(j, j));
      for (std::size_t k = 0; k < j; ++k)
        d -= abs2(l_(j, k));
      if (!(d > 0.0))
        throw NotPositiveDefinite("dense_cholesky_factor: non-positive pivot at column " + std::to_string(j));
      if (std::sqrt(d) <= tol)
        throw SingularMatrix("dense_cholesky_factor: pivot below tolerance at column " + std::to_string(j));
      const double ljj = std::sqrt(d);
      l_(j, j) = T(ljj);
      for (std::size_t i = j + 1; i < n; ++i) {
        T s = l_(i, j);
        for (std::size_t k = 0; k < j; ++k)
          s -= l_(i, k) * conj(l_(j, k));
        l_(i, j) = s / ljj;
      }
      for (std::size_t i = 0; i < j; ++i)
        l_(i, j) = T{};
    }
  }

  std::size_t size() const { return l_.rows(); }
  const DenseMatrix<T>& lower() const { return l_; }

  Vector<T> solve(const Vector<T>& b) const
  {
    return solve_upper(solve_lower(b));
  }

  /// Solves L y = b.
  Vector<T> solve_lower(const Vector<T>& b) const
  {
    const std::size_t n = size();
    require_same_size(b.size(), n, "factor_solve");
    Vector<T> y(b);
    for (std::size_t j = 0; j < n; ++j) {
      y[j] /= l_(j, j);
      const T yj = y[j];
      auto c = l_.col(j);
      for (std::size_t i = j + 1; i < n; ++i)
        y[i] -= c[i] * yj;
    }
    return y;
  }

  /// Solves L^* x = y.
  Vector<T> solve_upper(Vector<T> x) const
  {
    const std::size_t n = size();
    require_same_size(x.size(), n, "factor_solve");
    for (std::size_t i = n; i-- > 0;) {
      auto c = l_.col(i);
      T s = x[i];
      for (std::size_t k = i + 1; k < n; ++k)
        s -= conj(c[k]) * x[k];
      x[i] = s / l_(i, i);
    }
    return x;
  }

private:
  DenseMatrix<T> l_;
};

enum class FactorKind { lu, cholesky };

/// Shareable read-only handle over either factorization.
template <Scalar T>
class Factorization {
public:
  explicit Factorization(DenseLU<T> f) : f_(std::move(f)) {}
  explicit Factorization(DenseCholesky<T> f) : f_(std::move(f)) {}

  FactorKind kind() const { return std::holds_alternative<DenseLU<T>>(f_) ? FactorKind::lu : FactorKind::cholesky; }
  std::size_t size() const
  {
    return std::visit([](const auto& f) { return f.size(); }, f_);
  }
  Vector<T> solve(const Vector<T>& b) const
  {
    return std::visit([&](const auto& f) { return f.solve(b); }, f_);
  }

private:
  std::variant<DenseLU<T>, DenseCholesky<T>> f_;
};

template <Scalar T>
Factorization<T> dense_lu_factor(DenseMatrix<T> A)
{
  return Factorization<T>(DenseLU<T>(std::move(A)));
}

template <Scalar T>
Factorization<T> dense_cholesky_factor(DenseMatrix<T> A)
{
  return Factorization<T>(DenseCholesky<T>(std::move(A)));
}

/// Cholesky when A is Hermitian and the factorization succeeds, LU otherwise.
template <Scalar T>
Factorization<T> auto_factor(DenseMatrix<T> A)
{
  if (A.rows() == A.cols() && A.hermitian_defect() <= 1e-14 * A.frobenius_norm()) {
    try {
      return dense_cholesky_factor(A);
    } catch (const NotPositiveDefinite&) {
    } catch (const SingularMatrix&) {
    }
  }
  return dense_lu_factor(std::move(A));
}

template <Scalar T>
Vector<T> factor_solve(const Factorization<T>& F, const Vector<T>& b)
{
  return F.solve(b);
}

/// Columnwise solve F X = B.
template <Scalar T>
DenseMatrix<T> factor_solve(const Factorization<T>& F, const DenseMatrix<T>& B)
{
  DenseMatrix<T> X(B.rows(), B.cols());
  for (std::size_t j = 0; j < B.cols(); ++j)
    X.set_column(j, F.solve(B.column(j)));
  return X;
}

} // namespace ddm
