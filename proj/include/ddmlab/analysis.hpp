#pragma once

// Dense spectral diagnostics of preconditioned operators and the bounds they are checked against.

#include <ddmlab/decompose.hpp>
#include <ddmlab/la/csr.hpp>
#include <ddmlab/la/eig.hpp>
#include <ddmlab/la/factor.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ddm {

inline constexpr std::size_t dense_analysis_limit = 2000;

struct BoundRecord {
  std::string name;
  double bound = 0.0;
  double measured = 0.0;
  bool satisfied = false;
};

struct SpectrumReport {
  std::vector<complex_t> eigenvalues; ///< sorted by real part
  bool hermitian_path = false;        ///< true when computed by A-symmetrization (real spectrum, kappa valid)
  double lambda_min = 0.0;            ///< smallest real part
  double lambda_max = 0.0;            ///< largest real part
  double kappa = std::numeric_limits<double>::quiet_NaN();
  std::vector<BoundRecord> bounds;

  std::size_t count_near(complex_t z, double tol) const
  {
    return static_cast<std::size_t>(
      std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](complex_t l) { return std::abs(l - z) <= tol; }));
  }
};

namespace detail {

inline void finish_report(SpectrumReport& rep)
{
  if (rep.eigenvalues.empty())
    return;
  rep.lambda_min = rep.eigenvalues.front().real();
  rep.lambda_max = rep.eigenvalues.back().real();
  for (auto l : rep.eigenvalues) {
    rep.lambda_min = std::min(rep.lambda_min, l.real());
    rep.lambda_max = std::max(rep.lambda_max, l.real());
  }
  if (rep.hermitian_path && rep.lambda_min > 0.0)
    rep.kappa = rep.lambda_max / rep.lambda_min;
}

} // namespace detail

/// Spectrum of M^{-1}A from dense column-wise assembly of M^{-1}. For Hermitian positive definite A and
/// Hermitian M^{-1} the spectrum is computed from L^* M^{-1} L with A = L L^*; otherwise from general QR.
template <Scalar T>
SpectrumReport preconditioned_spectrum(const CsrMatrix<T>& A, const LinearMap<T>& Minv)
{
  const std::size_t n = A.nrows();
  if (n > dense_analysis_limit)
    throw SizeLimitExceeded("preconditioned_spectrum: n = " + std::to_string(n) + " exceeds the dense limit");
  const auto Ad = A.to_dense();
  const auto Md = assemble_dense(Minv, n);
  SpectrumReport rep;
  const double m_scale = std::max(Md.frobenius_norm(), 1e-300);
  const bool m_hermitian = Md.hermitian_defect() <= 1e-10 * m_scale;
  const bool a_hermitian = Ad.hermitian_defect() <= 1e-13 * std::max(Ad.frobenius_norm(), 1e-300);
  if (m_hermitian && a_hermitian) {
    try {
      const DenseCholesky<T> chol(Ad);
      const auto& L = chol.lower();
      auto Ms = Md;
      hermitian_part_inplace(Ms);
      auto S = adjoint_matmul(L, matmul(Ms, L));
      hermitian_part_inplace(S);
      const auto eig = sym_eig(S);
      for (double v : eig.values)
        rep.eigenvalues.emplace_back(v, 0.0);
      rep.hermitian_path = true;
      detail::finish_report(rep);
      return rep;
    } catch (const NotPositiveDefinite&) {
    } catch (const SingularMatrix&) {
    }
  }
  rep.eigenvalues = eigenvalues(matmul(Md, Ad));
  detail::finish_report(rep);
  return rep;
}

/// rho(I - theta M^{-1} A)
inline double richardson_spectral_radius(const SpectrumReport& s, double theta = 1.0)
{
  double rho = 0.0;
  for (auto l : s.eigenvalues)
    rho = std::max(rho, std::abs(complex_t(1.0) - theta * l));
  return rho;
}

/// lambda_max(M_ASM^{-1} A) <= N_c
inline BoundRecord coloring_bound_check(const SpectrumReport& s, const Decomposition& dec)
{
  const double nc = static_cast<double>(dec.n_colors);
  return {"coloring", nc, s.lambda_max, s.lambda_max <= nc + 1e-8};
}

struct FslConstants {
  double tau1 = std::numeric_limits<double>::quiet_NaN();   ///< min_i lambda_min(A_i^Neu, D_i A_i D_i)
  double gamma1 = std::numeric_limits<double>::quiet_NaN(); ///< max_i lambda_max(D_i A_i D_i, B_i)
  std::size_t Mc = 0;
  std::size_t Nc = 0;
};

namespace detail {

template <Scalar T>
DenseMatrix<T> weighted_local(const CsrMatrix<T>& A, const Decomposition& dec, std::size_t i)
{
  auto B = A.principal_submatrix(dec.sets[i]);
  const auto& w = dec.weights[i];
  for (std::size_t c = 0; c < w.size(); ++c)
    for (std::size_t r = 0; r < w.size(); ++r)
      B(r, c) *= T(w[r] * w[c]);
  return B;
}

} // namespace detail

/// tau1 needs Neumann matrices and gamma1 needs local solver matrices; either list may be empty.
template <Scalar T>
FslConstants fsl_constants(const CsrMatrix<T>& A, const Decomposition& dec, const std::vector<DenseMatrix<T>>& neumann,
                           const std::vector<DenseMatrix<T>>& local_solvers)
{
  FslConstants c;
  c.Mc = dec.max_multiplicity;
  c.Nc = dec.n_colors;
  if (!neumann.empty()) {
    if (neumann.size() != dec.size())
      throw DimensionMismatch("fsl_constants: one Neumann matrix per subdomain required");
    c.tau1 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dec.size(); ++i) {
      const auto p = sym_gen_eig(neumann[i], detail::weighted_local(A, dec, i));
      if (!p.values.empty())
        c.tau1 = std::min(c.tau1, p.values.front());
    }
  }
  if (!local_solvers.empty()) {
    if (local_solvers.size() != dec.size())
      throw DimensionMismatch("fsl_constants: one local solver matrix per subdomain required");
    c.gamma1 = 0.0;
    for (std::size_t i = 0; i < dec.size(); ++i) {
      const auto p = sym_gen_eig(detail::weighted_local(A, dec, i), local_solvers[i]);
      if (p.kernel.cols() != 0)
        throw IndefinitePencil("fsl_constants: local solver matrix is singular");
      if (!p.values.empty())
        c.gamma1 = std::max(c.gamma1, p.values.back());
    }
  }
  return c;
}

/// tau1 / M_c <= lambda_min(M_ASM^{-1} A)
inline BoundRecord fsl_lower_check(const SpectrumReport& s, const FslConstants& c)
{
  const double b = c.tau1 / static_cast<double>(c.Mc);
  return {"fsl_lower", b, s.lambda_min, s.lambda_min >= b - 1e-8};
}

/// lambda_max(M_SORAS^{-1} A) <= N_c gamma1
inline BoundRecord fsl_upper_check(const SpectrumReport& s, const FslConstants& c)
{
  const double b = static_cast<double>(c.Nc) * c.gamma1;
  return {"fsl_upper", b, s.lambda_max, s.lambda_max <= b + 1e-8};
}

/// (1 + k0) [2 + k0 (2 k0 + 1)(1 + 1/tau)]
inline double geneo_bound(std::size_t k0, double tau)
{
  const double k = static_cast<double>(k0);
  return (1.0 + k) * (2.0 + k * (2.0 * k + 1.0) * (1.0 + 1.0 / tau));
}

inline BoundRecord geneo_bound_check(const SpectrumReport& s, std::size_t k0, double tau)
{
  const double b = geneo_bound(k0, tau);
  return {"geneo", b, s.kappa, s.hermitian_path && s.kappa <= b};
}

/// ||x_k - x||_A for each recorded iterate.
template <Scalar T>
std::vector<double> energy_errors(const CsrMatrix<T>& A, const Vector<T>& exact, const std::vector<Vector<T>>& iterates)
{
  std::vector<double> out;
  out.reserve(iterates.size());
  for (const auto& x : iterates) {
    const auto e = x - exact;
    out.push_back(std::sqrt(std::max(0.0, real_part(dot(e, A.multiply(e))))));
  }
  return out;
}

/// 2 ((sqrt(kappa) - 1) / (sqrt(kappa) + 1))^k
inline double pcg_bound_factor(double kappa, std::size_t k)
{
  if (k == 0)
    return 1.0;
  const double s = std::sqrt(kappa);
  return 2.0 * std::pow((s - 1.0) / (s + 1.0), static_cast<double>(k));
}

/// Worst-case margin (bound - measured) over all iterations; satisfied iff every iterate is inside.
inline BoundRecord pcg_bound_envelope(const std::vector<double>& errors, double kappa, double slack = 1e-10)
{
  BoundRecord r{"pcg_envelope", 0.0, 0.0, true};
  if (errors.empty())
    return r;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double b = pcg_bound_factor(kappa, k) * errors[0];
    if (b - errors[k] < worst) {
      worst = b - errors[k];
      r.bound = b;
      r.measured = errors[k];
    }
    if (errors[k] > b + slack)
      r.satisfied = false;
  }
  return r;
}

inline void write_spectrum_csv(std::ostream& out, const std::vector<complex_t>& values)
{
  out << "re,im\n";
  out.precision(17);
  for (auto v : values)
    out << v.real() << ',' << v.imag() << '\n';
}

} // namespace ddm
