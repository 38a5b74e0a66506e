#pragma once

#include <ddmlab/la/dense.hpp>

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace ddm {

template <Scalar T>
struct Triplet {
  std::size_t row;
  std::size_t col;
  T value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing within each row.
template <Scalar T>
class CsrMatrix {
public:
  using value_type = T;

  CsrMatrix() : row_ptr_(1, 0) {}

  CsrMatrix(std::size_t nrows, std::size_t ncols, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
            std::vector<T> values)
    : nrows_(nrows), ncols_(ncols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values))
  {
    validate();
  }

  /// Duplicate (i, j) entries are summed. Entries that sum to zero are kept; see compress().
  static CsrMatrix from_triplets(std::size_t nrows, std::size_t ncols, std::span<const Triplet<T>> triplets)
  {
    for (const auto& t : triplets) {
      if (t.row >= nrows || t.col >= ncols)
        throw IndexOutOfRange("csr_from_triplets: entry (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                              ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
      if (!is_finite(t.value))
        throw NonFiniteValue("csr_from_triplets: non-finite value");
    }
    std::vector<std::size_t> order(triplets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ta = triplets[a];
      const auto& tb = triplets[b];
      return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
    });

    CsrMatrix M;
    M.nrows_ = nrows;
    M.ncols_ = ncols;
    M.row_ptr_.assign(nrows + 1, 0);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& t = triplets[order[k]];
      if (!M.col_idx_.empty() && k > 0) {
        const auto& prev = triplets[order[k - 1]];
        if (prev.row == t.row && prev.col == t.col) {
          M.values_.back() += t.value;
          continue;
        }
      }
      M.col_idx_.push_back(t.col);
      M.values_.push_back(t.value);
      ++M.row_ptr_[t.row + 1];
    }
    for (std::size_t i = 0; i < nrows; ++i)
      M.row_ptr_[i + 1] += M.row_ptr_[i];
    return M;
  }

  static CsrMatrix from_triplets(std::size_t nrows, std::size_t ncols, const std::vector<Triplet<T>>& triplets)
  {
    return from_triplets(nrows, ncols, std::span<const Triplet<T>>(triplets));
  }

  static CsrMatrix identity(std::size_t n)
  {
    std::vector<Triplet<T>> t;
    for (std::size_t i = 0; i < n; ++i)
      t.push_back({i, i, T(1.0)});
    return from_triplets(n, n, t);
  }

  static CsrMatrix from_dense(const DenseMatrix<T>& D)
  {
    std::vector<Triplet<T>> t;
    for (std::size_t i = 0; i < D.rows(); ++i)
      for (std::size_t j = 0; j < D.cols(); ++j)
        if (D(i, j) != T{})
          t.push_back({i, j, D(i, j)});
    return from_triplets(D.rows(), D.cols(), t);
  }

  std::size_t nrows() const { return nrows_; }
  std::size_t ncols() const { return ncols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<T>& values() const { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const
  {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const T> row_values(std::size_t i) const { return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]}; }

  /// Entry (i, j), zero when not stored.
  T at(std::size_t i, std::size_t j) const
  {
    auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j)
      return T{};
    return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
  }

  /// Removes stored entries with |a_ij| <= tol.
  CsrMatrix compress(double tol = 0.0) const
  {
    CsrMatrix M;
    M.nrows_ = nrows_;
    M.ncols_ = ncols_;
    M.row_ptr_.assign(nrows_ + 1, 0);
    for (std::size_t i = 0; i < nrows_; ++i) {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        if (std::abs(values_[k]) > tol) {
          M.col_idx_.push_back(col_idx_[k]);
          M.values_.push_back(values_[k]);
        }
      M.row_ptr_[i + 1] = M.col_idx_.size();
    }
    return M;
  }

  Vector<T> multiply(const Vector<T>& x) const
  {
    require_same_size(x.size(), ncols_, "spmv");
    Vector<T> y(nrows_, T{});
    for (std::size_t i = 0; i < nrows_; ++i) {
      T s{};
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        s += values_[k] * x[col_idx_[k]];
      y[i] = s;
    }
    return y;
  }

  Vector<T> diagonal() const
  {
    Vector<T> d(std::min(nrows_, ncols_), T{});
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] = at(i, i);
    return d;
  }

  CsrMatrix adjoint() const
  {
    std::vector<Triplet<T>> t;
    t.reserve(nnz());
    for (std::size_t i = 0; i < nrows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        t.push_back({col_idx_[k], i, conj(values_[k])});
    return from_triplets(ncols_, nrows_, t);
  }

  DenseMatrix<T> to_dense() const
  {
    DenseMatrix<T> D(nrows_, ncols_);
    for (std::size_t i = 0; i < nrows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        D(i, col_idx_[k]) = values_[k];
    return D;
  }

  /// Dense A(rows, cols) for sorted index lists. This is R_i A R_j^T in Boolean-restriction form.
  DenseMatrix<T> submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const
  {
    std::vector<std::ptrdiff_t> local(ncols_, -1);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] >= ncols_)
        throw IndexOutOfRange("submatrix: column index out of range");
      local[cols[j]] = static_cast<std::ptrdiff_t>(j);
    }
    DenseMatrix<T> D(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] >= nrows_)
        throw IndexOutOfRange("submatrix: row index out of range");
      for (std::size_t k = row_ptr_[rows[i]]; k < row_ptr_[rows[i] + 1]; ++k) {
        const auto lj = local[col_idx_[k]];
        if (lj >= 0)
          D(i, static_cast<std::size_t>(lj)) = values_[k];
      }
    }
    return D;
  }

  DenseMatrix<T> principal_submatrix(std::span<const std::size_t> idx) const { return submatrix(idx, idx); }

  double frobenius_norm() const
  {
    double s = 0.0;
    for (const auto& v : values_)
      s += abs2(v);
    return std::sqrt(s);
  }

  bool structurally_symmetric() const
  {
    if (nrows_ != ncols_)
      return false;
    for (std::size_t i = 0; i < nrows_; ++i)
      for (auto j : row_cols(i)) {
        auto cj = row_cols(j);
        if (!std::binary_search(cj.begin(), cj.end(), i))
          return false;
      }
    return true;
  }

  /// Largest |a_ij - conj(a_ji)|, including structurally unmatched entries.
  double hermitian_defect() const
  {
    double m = 0.0;
    for (std::size_t i = 0; i < nrows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        m = std::max(m, std::abs(values_[k] - conj(at(col_idx_[k], i))));
    return m;
  }

  /// Union of the sparsity patterns of A and A^T, values of A (zero where only A^T has an entry).
  CsrMatrix symmetrized_pattern() const
  {
    std::vector<Triplet<T>> t;
    for (std::size_t i = 0; i < nrows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        t.push_back({i, col_idx_[k], values_[k]});
        t.push_back({col_idx_[k], i, T{}});
      }
    return from_triplets(nrows_, ncols_, t);
  }

private:
  void validate() const
  {
    if (row_ptr_.size() != nrows_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != col_idx_.size() ||
        col_idx_.size() != values_.size())
      throw DimensionMismatch("CsrMatrix: inconsistent arrays");
    for (std::size_t i = 0; i < nrows_; ++i) {
      if (row_ptr_[i + 1] < row_ptr_[i])
        throw InvalidArgument("CsrMatrix: row_ptr not nondecreasing");
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        if (col_idx_[k] >= ncols_)
          throw IndexOutOfRange("CsrMatrix: column index out of range");
        if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
          throw InvalidArgument("CsrMatrix: column indices not strictly increasing");
      }
    }
  }

  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<T> values_;
};

template <Scalar T>
Vector<T> spmv(const CsrMatrix<T>& A, const Vector<T>& x)
{
  return A.multiply(x);
}

template <Scalar T>
LinearMap<T> as_map(const CsrMatrix<T>& A)
{
  return [&A](const Vector<T>& x) { return A.multiply(x); };
}

inline CsrMatrix<complex_t> to_complex(const CsrMatrix<double>& A)
{
  std::vector<complex_t> v(A.values().begin(), A.values().end());
  return CsrMatrix<complex_t>(A.nrows(), A.ncols(), A.row_ptr(), A.col_idx(), std::move(v));
}

} // namespace ddm
