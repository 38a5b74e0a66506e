#pragma once

#include <ddmlab/la/dense.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace ddm {

/// Ascending real eigenvalues; column k of `vectors` pairs with values[k].
template <Scalar T>
struct EigenPairs {
  std::vector<double> values;
  DenseMatrix<T> vectors;
};

/// Finite part of a semidefinite pencil plus an orthonormal basis of ker(B).
template <Scalar T>
struct PencilEigenPairs {
  std::vector<double> values;
  DenseMatrix<T> vectors; ///< B-orthonormal
  DenseMatrix<T> kernel;  ///< Euclidean-orthonormal columns spanning the numerical kernel of B
};

inline constexpr double hermitian_tolerance = 1e-12;
inline constexpr double default_null_tolerance = 1e-10;

namespace detail {

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

/// Householder reduction of Hermitian A to real symmetric tridiagonal form: A = Q T Q^*.
/// On return d holds the diagonal, e[k] couples k and k+1 (e[n-1] = 0).
template <Scalar T>
void tridiagonalize(DenseMatrix<T> A, std::vector<double>& d, std::vector<double>& e, DenseMatrix<T>& Q)
{
  const std::size_t n = A.rows();
  Q = DenseMatrix<T>::identity(n);
  std::vector<T> v(n), p(n), w(n), qv(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1; // length of x = A(k+1:n, k)
    double xnorm = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      xnorm += abs2(A(k + 1 + i, k));
    xnorm = std::sqrt(xnorm);
    const T x0 = A(k + 1, k);
    double tail = 0.0;
    for (std::size_t i = 1; i < m; ++i)
      tail += abs2(A(k + 1 + i, k));
    if (tail == 0.0)
      continue;
    T phase = T(1.0);
    if (std::abs(x0) > 0.0)
      phase = x0 / std::abs(x0);
    const T alpha = -phase * xnorm;
    for (std::size_t i = 0; i < m; ++i)
      v[i] = A(k + 1 + i, k);
    v[0] -= alpha;
    const double vnorm = norm2(std::span<const T>(v.data(), m));
    for (std::size_t i = 0; i < m; ++i)
      v[i] /= vnorm;

    // trailing block B = A(k+1:, k+1:) <- H B H with H = I - 2 v v^*
    for (std::size_t i = 0; i < m; ++i) {
      T s{};
      for (std::size_t j = 0; j < m; ++j)
        s += A(k + 1 + i, k + 1 + j) * v[j];
      p[i] = s;
    }
    T beta{};
    for (std::size_t i = 0; i < m; ++i)
      beta += conj(v[i]) * p[i];
    for (std::size_t i = 0; i < m; ++i)
      w[i] = p[i] - beta * v[i];
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i)
        A(k + 1 + i, k + 1 + j) -= 2.0 * (v[i] * conj(w[j]) + w[i] * conj(v[j]));
    A(k + 1, k) = alpha;
    A(k, k + 1) = conj(alpha);
    for (std::size_t i = 1; i < m; ++i) {
      A(k + 1 + i, k) = T{};
      A(k, k + 1 + i) = T{};
    }
    // Q(:, k+1:) <- Q(:, k+1:) H
    for (std::size_t r = 0; r < n; ++r) {
      T s{};
      for (std::size_t j = 0; j < m; ++j)
        s += Q(r, k + 1 + j) * v[j];
      qv[r] = s;
    }
    for (std::size_t j = 0; j < m; ++j) {
      const T cv = conj(v[j]) * 2.0;
      for (std::size_t r = 0; r < n; ++r)
        Q(r, k + 1 + j) -= qv[r] * cv;
    }
  }

  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = real_part(A(i, i));
  // Unitary diagonal scaling makes the off-diagonal real and nonnegative.
  T phase = T(1.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const T s = A(i + 1, i);
    const double a = std::abs(s);
    e[i] = a;
    T next = phase;
    if (a > 0.0)
      next = phase * (s / a);
    if constexpr (is_complex_v<T>) {
      if (next != T(1.0))
        for (std::size_t r = 0; r < n; ++r)
          Q(r, i + 1) *= next;
    } else {
      if (next != 1.0)
        for (std::size_t r = 0; r < n; ++r)
          Q(r, i + 1) *= next;
    }
    phase = next;
  }
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix, rotating the columns of Z.
template <Scalar T>
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, DenseMatrix<T>& Z)
{
  const int n = static_cast<int>(d.size());
  const double eps = std::numeric_limits<double>::epsilon();
  const std::size_t nz = Z.rows();
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd)
          break;
      }
      if (m != l) {
        if (iter++ == 200)
          throw ConvergenceFailure("sym_eig: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          auto zi = Z.col(static_cast<std::size_t>(i));
          auto zi1 = Z.col(static_cast<std::size_t>(i + 1));
          for (std::size_t k = 0; k < nz; ++k) {
            const T fz = zi1[k];
            zi1[k] = s * zi[k] + c * fz;
            zi[k] = c * zi[k] - s * fz;
          }
        }
        if (r == 0.0 && i >= l)
          continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

template <Scalar T>
EigenPairs<T> sort_pairs(std::vector<double> d, const DenseMatrix<T>& Z)
{
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  EigenPairs<T> out;
  out.values.resize(d.size());
  out.vectors = DenseMatrix<T>(Z.rows(), d.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values[k] = d[order[k]];
    out.vectors.set_column(k, Z.col(order[k]));
  }
  return out;
}

} // namespace detail

/// Eigen-decomposition of a Hermitian matrix: Householder tridiagonalization followed by implicit QL.
template <Scalar T>
EigenPairs<T> sym_eig(const DenseMatrix<T>& A)
{
  const std::size_t n = A.rows();
  if (A.cols() != n)
    throw DimensionMismatch("sym_eig: matrix not square");
  A.check_finite("sym_eig");
  const double scale = std::max(1.0, A.frobenius_norm());
  if (A.hermitian_defect() > hermitian_tolerance * scale)
    throw NotHermitian("sym_eig: asymmetry " + std::to_string(A.hermitian_defect()));
  if (n == 0)
    return {};
  DenseMatrix<T> H = A;
  hermitian_part_inplace(H);
  std::vector<double> d, e;
  DenseMatrix<T> Q;
  detail::tridiagonalize(std::move(H), d, e, Q);
  detail::tridiagonal_ql(d, e, Q);
  return detail::sort_pairs(std::move(d), Q);
}

/// Pencil A x = lambda B x with B Hermitian positive semidefinite, solved on range(B).
///
/// B is eigendecomposed; eigenvalues below null_tol * lambda_max(B) span the reported kernel and are
/// removed, the rest whiten A into a standard Hermitian problem. Eigenvalues of the pencil that would
/// be +infinity (ker B) are not part of `values`.
template <Scalar T>
PencilEigenPairs<T> sym_gen_eig(const DenseMatrix<T>& A, const DenseMatrix<T>& B, double null_tol = default_null_tolerance)
{
  const std::size_t n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n)
    throw DimensionMismatch("sym_gen_eig: shape mismatch");
  A.check_finite("sym_gen_eig");
  if (A.hermitian_defect() > hermitian_tolerance * std::max(1.0, A.frobenius_norm()))
    throw NotHermitian("sym_gen_eig: A is not Hermitian");
  const auto b_eig = sym_eig(B);
  PencilEigenPairs<T> out;
  if (n == 0)
    return out;
  const double bmax = std::max(std::abs(b_eig.values.front()), std::abs(b_eig.values.back()));
  if (bmax == 0.0) {
    out.kernel = DenseMatrix<T>::identity(n);
    out.vectors = DenseMatrix<T>(n, 0);
    return out;
  }
  const double cut = null_tol * bmax;
  if (b_eig.values.front() < -cut)
    throw IndefinitePencil("sym_gen_eig: B has eigenvalue " + std::to_string(b_eig.values.front()));

  std::vector<std::size_t> range, null;
  for (std::size_t k = 0; k < n; ++k)
    (b_eig.values[k] >= cut ? range : null).push_back(k);

  DenseMatrix<T> W(n, range.size());
  for (std::size_t c = 0; c < range.size(); ++c) {
    const double s = 1.0 / std::sqrt(b_eig.values[range[c]]);
    auto src = b_eig.vectors.col(range[c]);
    auto dst = W.col(c);
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = src[i] * s;
  }
  out.kernel = DenseMatrix<T>(n, null.size());
  for (std::size_t c = 0; c < null.size(); ++c)
    out.kernel.set_column(c, b_eig.vectors.col(null[c]));

  DenseMatrix<T> C = adjoint_matmul(W, matmul(A, W));
  hermitian_part_inplace(C);
  auto std_eig = sym_eig(C);
  out.values = std::move(std_eig.values);
  out.vectors = matmul(W, std_eig.vectors);
  return out;
}

namespace detail {

inline void givens(complex_t a, complex_t b, double& c, complex_t& s)
{
  const double aa = std::abs(a);
  const double bb = std::abs(b);
  if (bb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (aa == 0.0) {
    c = 0.0;
    s = std::conj(b) / bb;
    return;
  }
  const double rho = std::hypot(aa, bb);
  c = aa / rho;
  s = (a / aa) * std::conj(b) / rho;
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with deflation.
inline std::vector<complex_t> hessenberg_qr_eigenvalues(DenseMatrix<complex_t> H)
{
  const int n = static_cast<int>(H.rows());
  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(H.frobenius_norm(), std::numeric_limits<double>::min());
  std::vector<complex_t> eig;
  eig.reserve(n);
  int hi = n - 1;
  int iter = 0;
  int total = 0;
  while (hi >= 0) {
    if (hi == 0) {
      eig.push_back(H(0, 0));
      break;
    }
    int l = hi;
    while (l > 0) {
      double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0)
        s = hnorm;
      if (std::abs(H(l, l - 1)) <= eps * s) {
        H(l, l - 1) = 0.0;
        break;
      }
      --l;
    }
    if (l == hi) {
      eig.push_back(H(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    ++iter;
    if (++total > 100 * n)
      throw ConvergenceFailure("eigenvalues: Hessenberg QR did not converge");
    complex_t mu;
    if (iter % 11 == 10) {
      mu = H(hi, hi) + std::abs(H(hi, hi - 1).real()) + (hi >= 2 ? std::abs(H(hi - 1, hi - 2)) : 0.0);
    } else {
      const complex_t a = H(hi - 1, hi - 1), b = H(hi - 1, hi), c = H(hi, hi - 1), d = H(hi, hi);
      const complex_t half = (a - d) * 0.5;
      const complex_t disc = std::sqrt(half * half + b * c);
      const complex_t m1 = (a + d) * 0.5 + disc;
      const complex_t m2 = (a + d) * 0.5 - disc;
      mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
    }
    complex_t x = H(l, l) - mu;
    complex_t y = H(l + 1, l);
    for (int k = l; k < hi; ++k) {
      if (k > l) {
        x = H(k, k - 1);
        y = H(k + 1, k - 1);
      }
      double c;
      complex_t s;
      givens(x, y, c, s);
      for (int j = std::max(l, k - 1); j <= hi; ++j) {
        const complex_t t1 = H(k, j), t2 = H(k + 1, j);
        H(k, j) = c * t1 + s * t2;
        H(k + 1, j) = -std::conj(s) * t1 + c * t2;
      }
      for (int i = l; i <= std::min(k + 2, hi); ++i) {
        const complex_t t1 = H(i, k), t2 = H(i, k + 1);
        H(i, k) = c * t1 + std::conj(s) * t2;
        H(i, k + 1) = -s * t1 + c * t2;
      }
      if (k > l)
        H(k + 1, k - 1) = 0.0;
    }
  }
  return eig;
}

} // namespace detail

/// Eigenvalues of a general square matrix, sorted by real part then imaginary part.
template <Scalar T>
std::vector<complex_t> eigenvalues(const DenseMatrix<T>& A)
{
  const std::size_t n = A.rows();
  if (A.cols() != n)
    throw DimensionMismatch("eigenvalues: matrix not square");
  A.check_finite("eigenvalues");
  DenseMatrix<complex_t> H(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      H(i, j) = A(i, j);
  std::vector<complex_t> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    double tail = 0.0;
    for (std::size_t i = 1; i < m; ++i)
      tail += std::norm(H(k + 1 + i, k));
    if (tail == 0.0)
      continue;
    const complex_t x0 = H(k + 1, k);
    const double xnorm = std::sqrt(tail + std::norm(x0));
    const complex_t phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : complex_t(1.0);
    const complex_t alpha = -phase * xnorm;
    for (std::size_t i = 0; i < m; ++i)
      v[i] = H(k + 1 + i, k);
    v[0] -= alpha;
    double vn = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      vn += std::norm(v[i]);
    vn = std::sqrt(vn);
    for (std::size_t i = 0; i < m; ++i)
      v[i] /= vn;
    // rows: H(k+1:, :) -= 2 v (v^* H(k+1:, :))
    for (std::size_t j = k; j < n; ++j) {
      complex_t s = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        s += std::conj(v[i]) * H(k + 1 + i, j);
      s *= 2.0;
      for (std::size_t i = 0; i < m; ++i)
        H(k + 1 + i, j) -= v[i] * s;
    }
    // columns: H(:, k+1:) -= 2 (H(:, k+1:) v) v^*
    for (std::size_t r = 0; r < n; ++r) {
      complex_t s = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        s += H(r, k + 1 + j) * v[j];
      s *= 2.0;
      for (std::size_t j = 0; j < m; ++j)
        H(r, k + 1 + j) -= s * std::conj(v[j]);
    }
    for (std::size_t i = 1; i < m; ++i)
      H(k + 1 + i, k) = 0.0;
  }
  auto eig = detail::hessenberg_qr_eigenvalues(std::move(H));
  std::sort(eig.begin(), eig.end(), [](complex_t a, complex_t b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return eig;
}

} // namespace ddm
