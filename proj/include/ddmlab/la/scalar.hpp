#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace ddm {

using complex_t = std::complex<double>;

template <class T>
struct is_complex : std::false_type {};
template <>
struct is_complex<std::complex<double>> : std::true_type {};

template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// Field of a linear system: real or complex double precision.
template <class T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, complex_t>;

template <Scalar T>
constexpr T conj(T v)
{
  if constexpr (is_complex_v<T>)
    return std::conj(v);
  else
    return v;
}

template <Scalar T>
constexpr double real_part(T v)
{
  if constexpr (is_complex_v<T>)
    return v.real();
  else
    return v;
}

template <Scalar T>
constexpr double imag_part(T v)
{
  if constexpr (is_complex_v<T>)
    return v.imag();
  else
    return 0.0;
}

template <Scalar T>
inline double abs2(T v)
{
  if constexpr (is_complex_v<T>)
    return v.real() * v.real() + v.imag() * v.imag();
  else
    return v * v;
}

template <Scalar T>
inline bool is_finite(T v)
{
  if constexpr (is_complex_v<T>)
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  else
    return std::isfinite(v);
}

/// Converts a real value into the scalar field T.
template <Scalar T>
constexpr T from_real(double v)
{
  return T(v);
}

} // namespace ddm
