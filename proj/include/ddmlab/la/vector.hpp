#pragma once

#include <ddmlab/la/errors.hpp>
#include <ddmlab/la/scalar.hpp>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ddm {

template <Scalar T>
using Vector = std::vector<T>;

/// Action of a linear operator (matrix, preconditioner, coarse correction).
template <Scalar T>
using LinearMap = std::function<Vector<T>(const Vector<T>&)>;

inline void require_same_size(std::size_t a, std::size_t b, const char* what)
{
  if (a != b)
    throw DimensionMismatch(std::string(what) + ": size " + std::to_string(a) + " vs " + std::to_string(b));
}

template <Scalar T>
void check_finite(std::span<const T> x, const char* what = "vector")
{
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!is_finite(x[i]))
      throw NonFiniteValue(std::string(what) + ": non-finite entry at index " + std::to_string(i));
}

/// Inner product conjugating the first argument, summed in ascending index order.
template <Scalar T>
T dot(std::span<const T> x, std::span<const T> y)
{
  require_same_size(x.size(), y.size(), "dot");
  T s{};
  for (std::size_t i = 0; i < x.size(); ++i)
    s += conj(x[i]) * y[i];
  return s;
}

template <Scalar T>
T dot(const Vector<T>& x, const Vector<T>& y)
{
  return dot(std::span<const T>(x), std::span<const T>(y));
}

template <Scalar T>
double norm2(std::span<const T> x)
{
  double s = 0.0;
  for (const auto& v : x)
    s += abs2(v);
  return std::sqrt(s);
}

template <Scalar T>
double norm2(const Vector<T>& x)
{
  return norm2(std::span<const T>(x));
}

template <Scalar T>
double norm_inf(const Vector<T>& x)
{
  double m = 0.0;
  for (const auto& v : x)
    m = std::max(m, std::abs(v));
  return m;
}

/// y += a x
template <Scalar T>
void axpy(T a, const Vector<T>& x, Vector<T>& y)
{
  require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += a * x[i];
}

template <Scalar T>
Vector<T> operator+(const Vector<T>& x, const Vector<T>& y)
{
  require_same_size(x.size(), y.size(), "vector add");
  Vector<T> z(x);
  for (std::size_t i = 0; i < x.size(); ++i)
    z[i] += y[i];
  return z;
}

template <Scalar T>
Vector<T> operator-(const Vector<T>& x, const Vector<T>& y)
{
  require_same_size(x.size(), y.size(), "vector subtract");
  Vector<T> z(x);
  for (std::size_t i = 0; i < x.size(); ++i)
    z[i] -= y[i];
  return z;
}

template <Scalar T>
Vector<T> scaled(T a, Vector<T> x)
{
  for (auto& v : x)
    v *= a;
  return x;
}

template <Scalar T>
Vector<T> unit_vector(std::size_t n, std::size_t k)
{
  Vector<T> e(n, T{});
  e.at(k) = T(1.0);
  return e;
}

/// Promotes a real vector into the complex field.
inline Vector<complex_t> to_complex(const Vector<double>& x)
{
  return Vector<complex_t>(x.begin(), x.end());
}

} // namespace ddm
