#pragma once

#include <ddmlab/la/csr.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ddm {

/// Reads a MatrixMarket `coordinate` file (real/integer/complex, general/symmetric/hermitian).
/// A real file can be read into a complex matrix; a complex file cannot be read into a real one.
template <Scalar T>
CsrMatrix<T> read_matrix_market(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line))
    throw InvalidArgument("matrix market: empty input");
  std::string lower = line;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  std::istringstream header(lower);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix" || format != "coordinate")
    throw InvalidArgument("matrix market: only 'matrix coordinate' files are supported");
  const bool complex_field = field == "complex";
  if (!complex_field && field != "real" && field != "integer")
    throw InvalidArgument("matrix market: unsupported field '" + field + "'");
  if (complex_field && !is_complex_v<T>)
    throw InvalidArgument("matrix market: complex file read into a real matrix");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian")
    throw InvalidArgument("matrix market: unsupported symmetry '" + symmetry + "'");

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%')
      break;
  std::istringstream sizes(line);
  std::size_t nrows = 0, ncols = 0, nnz = 0;
  if (!(sizes >> nrows >> ncols >> nnz))
    throw InvalidArgument("matrix market: malformed size line");

  std::vector<Triplet<T>> t;
  t.reserve(symmetry == "general" ? nnz : 2 * nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(in >> i >> j >> re))
      throw InvalidArgument("matrix market: truncated entry list");
    if (complex_field && !(in >> im))
      throw InvalidArgument("matrix market: missing imaginary part");
    if (i == 0 || j == 0)
      throw IndexOutOfRange("matrix market: indices are 1-based");
    T v;
    if constexpr (is_complex_v<T>)
      v = T(re, im);
    else
      v = re;
    t.push_back({i - 1, j - 1, v});
    if (symmetry != "general" && i != j)
      t.push_back({j - 1, i - 1, symmetry == "hermitian" ? conj(v) : v});
  }
  return CsrMatrix<T>::from_triplets(nrows, ncols, t);
}

template <Scalar T>
CsrMatrix<T> read_matrix_market(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidArgument("matrix market: cannot open " + path);
  return read_matrix_market<T>(in);
}

/// Writes all stored entries in `general` symmetry with 17 significant digits.
template <Scalar T>
void write_matrix_market(std::ostream& out, const CsrMatrix<T>& A)
{
  out << "%%MatrixMarket matrix coordinate " << (is_complex_v<T> ? "complex" : "real") << " general\n";
  out << A.nrows() << ' ' << A.ncols() << ' ' << A.nnz() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < A.nrows(); ++i) {
    auto cols = A.row_cols(i);
    auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << i + 1 << ' ' << cols[k] + 1 << ' ' << real_part(vals[k]);
      if constexpr (is_complex_v<T>)
        out << ' ' << imag_part(vals[k]);
      out << '\n';
    }
  }
}

template <Scalar T>
void write_matrix_market(const std::string& path, const CsrMatrix<T>& A)
{
  std::ofstream out(path);
  if (!out)
    throw InvalidArgument("matrix market: cannot write " + path);
  write_matrix_market(out, A);
}

} // namespace ddm
