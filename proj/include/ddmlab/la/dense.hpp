#pragma once

#include <ddmlab/la/vector.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <vector>

namespace ddm {

/// Column-major dense matrix.
template <Scalar T>
class DenseMatrix {
public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T init = T{}) : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  static DenseMatrix identity(std::size_t n)
  {
    DenseMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i)
      I(i, i) = T(1.0);
    return I;
  }

  /// Row-wise literal, e.g. `{{2, 1}, {1, 2}}`.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<T>> rows)
  {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    DenseMatrix M(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c)
        throw DimensionMismatch("DenseMatrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (const auto& v : row)
        M(i, j++) = v;
      ++i;
    }
    return M;
  }

  static DenseMatrix diagonal(const Vector<T>& d)
  {
    DenseMatrix D(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      D(i, i) = d[i];
    return D;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<T> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const T> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  Vector<T> column(std::size_t j) const
  {
    auto c = col(j);
    return Vector<T>(c.begin(), c.end());
  }

  void set_column(std::size_t j, std::span<const T> v)
  {
    require_same_size(v.size(), rows_, "DenseMatrix::set_column");
    std::copy(v.begin(), v.end(), col(j).begin());
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  double frobenius_norm() const
  {
    double s = 0.0;
    for (const auto& v : data_)
      s += abs2(v);
    return std::sqrt(s);
  }

  double max_abs() const
  {
    double m = 0.0;
    for (const auto& v : data_)
      m = std::max(m, std::abs(v));
    return m;
  }

  DenseMatrix adjoint() const
  {
    DenseMatrix B(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i)
        B(j, i) = conj((*this)(i, j));
    return B;
  }

  /// Largest entrywise deviation from Hermitian symmetry.
  double hermitian_defect() const
  {
    if (rows_ != cols_)
      throw DimensionMismatch("hermitian_defect: matrix not square");
    double m = 0.0;
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i <= j; ++i)
        m = std::max(m, std::abs((*this)(i, j) - conj((*this)(j, i))));
    return m;
  }

  void check_finite(const char* what = "matrix") const { ddm::check_finite(std::span<const T>(data_), what); }

  DenseMatrix& operator+=(const DenseMatrix& o)
  {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k)
      data_[k] += o.data_[k];
    return *this;
  }

  DenseMatrix& operator-=(const DenseMatrix& o)
  {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k)
      data_[k] -= o.data_[k];
    return *this;
  }

  DenseMatrix& operator*=(T a)
  {
    for (auto& v : data_)
      v *= a;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(T s, DenseMatrix a) { return a *= s; }

private:
  void check_same_shape(const DenseMatrix& o) const
  {
    if (o.rows_ != rows_ || o.cols_ != cols_)
      throw DimensionMismatch("DenseMatrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <Scalar T>
Vector<T> matvec(const DenseMatrix<T>& A, const Vector<T>& x)
{
  require_same_size(A.cols(), x.size(), "matvec");
  Vector<T> y(A.rows(), T{});
  for (std::size_t j = 0; j < A.cols(); ++j) {
    const T xj = x[j];
    auto c = A.col(j);
    for (std::size_t i = 0; i < A.rows(); ++i)
      y[i] += c[i] * xj;
  }
  return y;
}

/// y = A^* x
template <Scalar T>
Vector<T> adjoint_matvec(const DenseMatrix<T>& A, const Vector<T>& x)
{
  require_same_size(A.rows(), x.size(), "adjoint_matvec");
  Vector<T> y(A.cols(), T{});
  for (std::size_t j = 0; j < A.cols(); ++j)
    y[j] = dot(A.col(j), std::span<const T>(x));
  return y;
}

template <Scalar T>
DenseMatrix<T> matmul(const DenseMatrix<T>& A, const DenseMatrix<T>& B)
{
  require_same_size(A.cols(), B.rows(), "matmul");
  DenseMatrix<T> C(A.rows(), B.cols());
  for (std::size_t j = 0; j < B.cols(); ++j) {
    auto cj = C.col(j);
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const T b = B(k, j);
      if (b == T{})
        continue;
      auto ak = A.col(k);
      for (std::size_t i = 0; i < A.rows(); ++i)
        cj[i] += ak[i] * b;
    }
  }
  return C;
}

/// C = A^* B
template <Scalar T>
DenseMatrix<T> adjoint_matmul(const DenseMatrix<T>& A, const DenseMatrix<T>& B)
{
  require_same_size(A.rows(), B.rows(), "adjoint_matmul");
  DenseMatrix<T> C(A.cols(), B.cols());
  for (std::size_t j = 0; j < B.cols(); ++j)
    for (std::size_t i = 0; i < A.cols(); ++i)
      C(i, j) = dot(A.col(i), B.col(j));
  return C;
}

/// Replaces A by (A + A^*)/2.
template <Scalar T>
void hermitian_part_inplace(DenseMatrix<T>& A)
{
  for (std::size_t j = 0; j < A.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const T v = (A(i, j) + conj(A(j, i))) * 0.5;
      A(i, j) = v;
      A(j, i) = conj(v);
    }
  for (std::size_t i = 0; i < A.rows(); ++i)
    A(i, i) = T(real_part(A(i, i)));
}

/// Dense matrix of a linear map, assembled column by column.
template <Scalar T>
DenseMatrix<T> assemble_dense(const LinearMap<T>& op, std::size_t n)
{
  DenseMatrix<T> M(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto y = op(unit_vector<T>(n, j));
    M.set_column(j, y);
  }
  return M;
}

inline DenseMatrix<complex_t> to_complex(const DenseMatrix<double>& A)
{
  DenseMatrix<complex_t> C(A.rows(), A.cols());
  for (std::size_t j = 0; j < A.cols(); ++j)
    for (std::size_t i = 0; i < A.rows(); ++i)
      C(i, j) = A(i, j);
  return C;
}

} // namespace ddm
