#pragma once

// One-level overlapping Schwarz preconditioners (ASM, RAS, ORAS, SORAS), the stationary
// Richardson driver and the classical two-subdomain alternating method in 1D.

#include <ddmlab/decompose.hpp>
#include <ddmlab/la/factor.hpp>
#include <ddmlab/report.hpp>

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ddm {

enum class SchwarzMethod { ASM, RAS, ORAS, SORAS, none };

inline std::string to_string(SchwarzMethod m)
{
  switch (m) {
  case SchwarzMethod::ASM: return "asm";
  case SchwarzMethod::RAS: return "ras";
  case SchwarzMethod::ORAS: return "oras";
  case SchwarzMethod::SORAS: return "soras";
  case SchwarzMethod::none: return "none";
  }
  return "?";
}

inline SchwarzMethod parse_schwarz_method(const std::string& s)
{
  for (auto m : {SchwarzMethod::ASM, SchwarzMethod::RAS, SchwarzMethod::ORAS, SchwarzMethod::SORAS, SchwarzMethod::none})
    if (to_string(m) == s)
      return m;
  throw InvalidArgument("unknown Schwarz method '" + s + "' (expected asm|ras|oras|soras|none)");
}

/// Optimized methods use Robin local operators; ASM and RAS use Dirichlet ones.
inline bool uses_robin(SchwarzMethod m) { return m == SchwarzMethod::ORAS || m == SchwarzMethod::SORAS; }

/// Local operator B_i: Dirichlet (B_i = R_i A R_i^T) or Robin (B_i = A_i + p s I on the artificial interface,
/// s the lumped interface mass). The Robin coefficient p is either one constant or one value per global unknown.
template <Scalar T>
struct LocalOperatorKind {
  bool robin = false;
  std::vector<T> coefficient;
  double interface_mass_scale = 1.0;

  static LocalOperatorKind dirichlet() { return {}; }
  static LocalOperatorKind robin_constant(T p, double mass_scale) { return {true, {p}, mass_scale}; }
  static LocalOperatorKind robin_per_dof(std::vector<T> p, double mass_scale) { return {true, std::move(p), mass_scale}; }

  T at(std::size_t dof) const { return coefficient.size() == 1 ? coefficient[0] : coefficient.at(dof); }
};

template <Scalar T>
struct LocalOperator {
  DenseMatrix<T> matrix; ///< B_i
  Factorization<T> factor;
  std::vector<std::size_t> interface; ///< local indices of artificial-interface unknowns
};

/// Local indices of unknowns in `set` coupled to an unknown outside it, excluding physical-boundary unknowns.
template <Scalar T>
std::vector<std::size_t> artificial_interface(const CsrMatrix<T>& A, std::span<const std::size_t> set,
                                              const std::vector<bool>& on_boundary = {})
{
  std::vector<bool> in(A.nrows(), false);
  for (auto d : set)
    in[d] = true;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto d = set[k];
    if (!on_boundary.empty() && on_boundary[d])
      continue;
    for (auto j : A.row_cols(d))
      if (!in[j]) {
        out.push_back(k);
        break;
      }
  }
  return out;
}

template <Scalar T>
std::vector<LocalOperator<T>> build_local_operators(const CsrMatrix<T>& A, const Decomposition& dec,
                                                    const LocalOperatorKind<T>& kind,
                                                    const std::vector<bool>& on_boundary = {})
{
  if (dec.n_dofs != A.nrows())
    throw DimensionMismatch("build_local_operators: decomposition does not match matrix");
  std::vector<LocalOperator<T>> ops;
  ops.reserve(dec.size());
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const auto& set = dec.sets[i];
    DenseMatrix<T> B = A.principal_submatrix(set);
    std::vector<std::size_t> iface;
    if (kind.robin) {
      iface = artificial_interface(A, std::span<const std::size_t>(set), on_boundary);
      for (auto k : iface)
        B(k, k) += kind.at(set[k]) * kind.interface_mass_scale;
    }
    auto F = auto_factor(B);
    ops.push_back({std::move(B), std::move(F), std::move(iface)});
  }
  return ops;
}

/// M^{-1} r = sum_i R_i^T [D_i] B_i^{-1} [D_i] R_i r with the weights placed per method.
template <Scalar T>
class OneLevelPreconditioner {
public:
  OneLevelPreconditioner(SchwarzMethod method, std::shared_ptr<const Decomposition> dec, std::vector<LocalOperator<T>> local)
    : method_(method), dec_(std::move(dec)), local_(std::move(local))
  {
    if (method_ != SchwarzMethod::none && local_.size() != dec_->size())
      throw DimensionMismatch("OneLevelPreconditioner: one local operator per subdomain required");
  }

  /// Builds local operators of the kind the method calls for. `robin` is used by ORAS/SORAS only.
  static OneLevelPreconditioner build(const CsrMatrix<T>& A, std::shared_ptr<const Decomposition> dec, SchwarzMethod method,
                                      const LocalOperatorKind<T>& robin = {}, const std::vector<bool>& on_boundary = {})
  {
    std::vector<LocalOperator<T>> local;
    if (method != SchwarzMethod::none) {
      const auto kind = uses_robin(method) ? robin : LocalOperatorKind<T>::dirichlet();
      if (uses_robin(method) && !kind.robin)
        throw InvalidArgument("OneLevelPreconditioner: " + to_string(method) + " needs a Robin local operator");
      local = build_local_operators(A, *dec, kind, on_boundary);
    }
    return OneLevelPreconditioner(method, std::move(dec), std::move(local));
  }

  SchwarzMethod method() const { return method_; }
  const Decomposition& decomposition() const { return *dec_; }
  const std::vector<LocalOperator<T>>& local_operators() const { return local_; }

  Vector<T> apply(const Vector<T>& r) const
  {
    require_same_size(r.size(), dec_->n_dofs, "Schwarz apply");
    if (method_ == SchwarzMethod::none)
      return r;
    const bool weight_before = method_ == SchwarzMethod::SORAS;
    const bool weight_after = method_ != SchwarzMethod::ASM;
    Vector<T> z(r.size(), T{});
    for (std::size_t i = 0; i < local_.size(); ++i) {
      auto ri = dec_->restrict_to(i, r);
      const auto& w = dec_->weights[i];
      if (weight_before)
        for (std::size_t k = 0; k < ri.size(); ++k)
          ri[k] *= w[k];
      auto zi = local_[i].factor.solve(ri);
      if (weight_after)
        for (std::size_t k = 0; k < zi.size(); ++k)
          zi[k] *= w[k];
      dec_->prolong_add(i, zi, z);
    }
    return z;
  }

  LinearMap<T> as_map() const
  {
    return [this](const Vector<T>& r) { return apply(r); };
  }

private:
  SchwarzMethod method_;
  std::shared_ptr<const Decomposition> dec_;
  std::vector<LocalOperator<T>> local_;
};

/// Stationary iteration x <- x + damping * M^{-1}(b - A x). Stops when ||r||/||b|| <= tol, after maxit
/// iterations, or flags divergence once the residual exceeds 1e6 times the initial one.
template <Scalar T>
SolveResult<T> richardson(const LinearMap<T>& A, const Vector<T>& b, const LinearMap<T>& M, Vector<T> x0, double tol,
                          std::size_t maxit, double damping = 1.0)
{
  require_same_size(x0.size(), b.size(), "richardson");
  SolveResult<T> out;
  out.report.rtol = tol;
  const double bnorm = norm2(b);
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  Vector<T> x = std::move(x0);
  Vector<T> r = b - A(x);
  double rn = norm2(r);
  const double r0 = rn;
  out.report.residual_history.push_back(rn);
  std::size_t k = 0;
  while (rn > tol * scale && k < maxit) {
    axpy(T(damping), M(r), x);
    r = b - A(x);
    rn = norm2(r);
    ++k;
    out.report.residual_history.push_back(rn);
    if (!std::isfinite(rn) || rn > 1e6 * r0) {
      out.report.diverged = true;
      break;
    }
  }
  out.report.iterations = k;
  out.report.converged = rn <= tol * scale;
  out.report.final_relative_residual = rn / scale;
  out.x = std::move(x);
  return out;
}

enum class SweepOrder { gauss_seidel, jacobi };

namespace detail {

/// Solves (1/h^2) tridiag(-1,2,-1) u = f + boundary terms on consecutive nodes.
inline std::vector<double> solve_1d_dirichlet(const std::vector<double>& f, double h, double left, double right)
{
  const std::size_t n = f.size();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> rhs = f;
  rhs.front() += left * inv_h2;
  rhs.back() += right * inv_h2;
  // Thomas algorithm on 2, -1 diagonals (scaled)
  std::vector<double> c(n, 0.0), d(n, 0.0);
  double denom = 2.0 * inv_h2;
  c[0] = -inv_h2 / denom;
  d[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = 2.0 * inv_h2 + inv_h2 * c[i - 1];
    c[i] = -inv_h2 / denom;
    d[i] = (rhs[i] + inv_h2 * d[i - 1]) / denom;
  }
  std::vector<double> u(n);
  u[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    u[i] = d[i] - c[i] * u[i + 1];
  return u;
}

} // namespace detail

/// Classical alternating Schwarz for -u'' = 1 on (0,1) with Omega_1 = (0, (m_s+1)h), Omega_2 = (m_s h, 1).
/// Returns the max-norm error against the direct finite-difference solution after each sweep.
inline std::vector<double> alternating_schwarz_1d(std::size_t m, std::size_t m_s, std::size_t sweeps,
                                                  SweepOrder order = SweepOrder::gauss_seidel)
{
  if (m_s < 1 || m_s >= m)
    throw InvalidArgument("alternating_schwarz_1d: need 1 <= m_s < m");
  const double h = 1.0 / static_cast<double>(m + 1);
  // global nodes x_j = j h, j = 1..m stored at index j-1
  const std::vector<double> f(m, 1.0);
  const auto exact = detail::solve_1d_dirichlet(f, h, 0.0, 0.0);
  const std::vector<double> f1(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(m_s));
  const std::vector<double> f2(f.begin() + static_cast<std::ptrdiff_t>(m_s), f.end());
  std::vector<double> u1(m_s, 0.0);     // nodes 1..m_s
  std::vector<double> u2(m - m_s, 0.0); // nodes m_s+1..m
  std::vector<double> errors;
  for (std::size_t s = 0; s < sweeps; ++s) {
    const double from2 = u2.front(); // u_{m_s+1} from Omega_2
    const double from1 = u1.back();  // u_{m_s} from Omega_1
    u1 = detail::solve_1d_dirichlet(f1, h, 0.0, from2);
    const double iface = order == SweepOrder::gauss_seidel ? u1.back() : from1;
    u2 = detail::solve_1d_dirichlet(f2, h, iface, 0.0);
    double err = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double u = j < m_s ? u1[j] : u2[j - m_s];
      err = std::max(err, std::abs(u - exact[j]));
    }
    errors.push_back(err);
  }
  return errors;
}

} // namespace ddm
