#pragma once

// Shared fixtures for the unit tests: random matrices and small dense oracles.

#include <ddmlab/ddmlab.hpp>

#include <random>

namespace ddm::testing {

template <Scalar T>
T random_scalar(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if constexpr (is_complex_v<T>)
    return {u(rng), u(rng)};
  else
    return u(rng);
}

template <Scalar T>
Vector<T> random_vector(std::size_t n, std::mt19937_64& rng)
{
  Vector<T> v(n);
  for (auto& x : v)
    x = random_scalar<T>(rng);
  return v;
}

template <Scalar T>
DenseMatrix<T> random_dense(std::size_t r, std::size_t c, std::mt19937_64& rng)
{
  DenseMatrix<T> M(r, c);
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t i = 0; i < r; ++i)
      M(i, j) = random_scalar<T>(rng);
  return M;
}

/// G^* G + shift I, Hermitian positive definite.
template <Scalar T>
DenseMatrix<T> random_hpd(std::size_t n, std::mt19937_64& rng, double shift = 1.0)
{
  const auto G = random_dense<T>(n, n, rng);
  auto A = adjoint_matmul(G, G);
  for (std::size_t i = 0; i < n; ++i)
    A(i, i) += T(shift);
  hermitian_part_inplace(A);
  return A;
}

template <Scalar T>
double max_abs_diff(const DenseMatrix<T>& A, const DenseMatrix<T>& B)
{
  double m = 0.0;
  for (std::size_t j = 0; j < A.cols(); ++j)
    for (std::size_t i = 0; i < A.rows(); ++i)
      m = std::max(m, std::abs(A(i, j) - B(i, j)));
  return m;
}

template <Scalar T>
double rel_diff(const Vector<T>& a, const Vector<T>& b)
{
  return norm2(a - b) / std::max(norm2(b), 1e-300);
}

inline std::shared_ptr<const Decomposition> make_decomposition(const AssembledSystem<double>& sys, const Partition& p,
                                                               std::size_t delta, PuKind pu = PuKind::multiplicity)
{
  const auto geo = geometry_of(sys);
  auto dec = expand_overlap(sys.A, p, delta, &geo);
  apply_pu(dec, pu);
  return std::make_shared<const Decomposition>(std::move(dec));
}

inline LinearMap<double> identity_map()
{
  return [](const Vector<double>& v) { return v; };
}

} // namespace ddm::testing
