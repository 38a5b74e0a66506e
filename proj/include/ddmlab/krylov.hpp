#pragma once

// CG, preconditioned CG and full GMRES with left/right preconditioning.

#include <ddmlab/la/dense.hpp>
#include <ddmlab/la/errors.hpp>
#include <ddmlab/report.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace ddm {

enum class KspKind { cg, pcg, gmres };
enum class PcSide { left, right, none };

inline std::string to_string(KspKind k)
{
  switch (k) {
  case KspKind::cg: return "cg";
  case KspKind::pcg: return "pcg";
  case KspKind::gmres: return "gmres";
  }
  return "?";
}

inline std::string to_string(PcSide s)
{
  switch (s) {
  case PcSide::left: return "left";
  case PcSide::right: return "right";
  case PcSide::none: return "none";
  }
  return "?";
}

inline KspKind parse_ksp(const std::string& s)
{
  for (auto k : {KspKind::cg, KspKind::pcg, KspKind::gmres})
    if (to_string(k) == s)
      return k;
  throw InvalidArgument("unknown Krylov method '" + s + "' (expected cg|pcg|gmres)");
}

inline PcSide parse_pc_side(const std::string& s)
{
  for (auto k : {PcSide::left, PcSide::right, PcSide::none})
    if (to_string(k) == s)
      return k;
  throw InvalidArgument("unknown preconditioning side '" + s + "' (expected left|right|none)");
}

struct KrylovOptions {
  double rtol = 1e-6;
  std::size_t maxit = 200;
  PcSide side = PcSide::right;
};

namespace detail {

inline double rhs_scale(double bnorm) { return bnorm > 0.0 ? bnorm : 1.0; }

template <Scalar T>
SolveResult<T> pcg_impl(const LinearMap<T>& A, const Vector<T>& b, const LinearMap<T>* M, Vector<T> x, double tol,
                        std::size_t maxit, const IterateObserver<T>& observe)
{
  require_same_size(x.size(), b.size(), "cg");
  SolveResult<T> out;
  auto& rep = out.report;
  rep.rtol = tol;
  const double scale = rhs_scale(norm2(b));
  Vector<T> r = b - A(x);
  double rn = norm2(r);
  rep.residual_history.push_back(rn);
  if (observe)
    observe(0, x);
  Vector<T> z = M ? (*M)(r) : r;
  Vector<T> p = z;
  T rz = dot(r, z);
  std::size_t k = 0;
  while (rn > tol * scale && k < maxit) {
    if (M && !(real_part(rz) > 0.0)) {
      rep.breakdown = true;
      rep.message = "preconditioner is not positive definite: (r, z) <= 0";
      break;
    }
    const auto Ap = A(p);
    const T pAp = dot(p, Ap);
    if (!(real_part(pAp) > 0.0)) {
      rep.breakdown = true;
      rep.message = "operator is not positive definite: (A p, p) <= 0";
      break;
    }
    const T alpha = rz / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    rn = norm2(r);
    ++k;
    rep.residual_history.push_back(rn);
    if (observe)
      observe(k, x);
    if (rn <= tol * scale)
      break;
    z = M ? (*M)(r) : r;
    const T rz_new = dot(r, z);
    const T beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = z[i] + beta * p[i];
  }
  rep.iterations = k;
  rep.converged = rn <= tol * scale;
  rep.final_relative_residual = rn / scale;
  if (!rep.converged && rep.message.empty())
    rep.message = "maximum number of iterations reached";
  out.x = std::move(x);
  return out;
}

/// Rotation [c s; -conj(s) c] with real c mapping (a, b) to (r, 0).
template <Scalar T>
void givens(T a, T b, double& c, T& s)
{
  const double aa = std::abs(a), ab = std::abs(b);
  const double nrm = std::hypot(aa, ab);
  if (nrm == 0.0) {
    c = 1.0;
    s = T{};
    return;
  }
  const T phase = aa == 0.0 ? T(1.0) : a / T(aa);
  c = aa / nrm;
  s = phase * conj(b) / T(nrm);
}

} // namespace detail

/// Conjugate gradients; the residual history holds the recursively updated residual norms.
template <Scalar T>
SolveResult<T> cg(const LinearMap<T>& A, const Vector<T>& b, Vector<T> x0, double tol = 1e-6, std::size_t maxit = 200,
                  const IterateObserver<T>& observe = {})
{
  return detail::pcg_impl<T>(A, b, nullptr, std::move(x0), tol, maxit, observe);
}

/// Preconditioned conjugate gradients with z = M^{-1} r.
template <Scalar T>
SolveResult<T> pcg(const LinearMap<T>& A, const Vector<T>& b, const LinearMap<T>& M, Vector<T> x0, double tol = 1e-6,
                   std::size_t maxit = 200, const IterateObserver<T>& observe = {})
{
  return detail::pcg_impl<T>(A, b, &M, std::move(x0), tol, maxit, observe);
}

/// Full GMRES (modified Gram-Schmidt Arnoldi, Givens least squares).
/// right/none: history holds the least-squares residual, equal to ||b - A x_k|| in exact arithmetic.
/// left: Arnoldi runs on M^{-1}A, but the true residual is formed each step, recorded and used for stopping.
template <Scalar T>
SolveResult<T> gmres(const LinearMap<T>& A, const Vector<T>& b, const LinearMap<T>& M, PcSide side, Vector<T> x0,
                     double tol = 1e-6, std::size_t maxit = 200, const IterateObserver<T>& observe = {})
{
  require_same_size(x0.size(), b.size(), "gmres");
  const std::size_t n = b.size();
  SolveResult<T> out;
  auto& rep = out.report;
  rep.rtol = tol;
  const double scale = detail::rhs_scale(norm2(b));
  auto precond = [&](const Vector<T>& v) { return side == PcSide::none ? v : M(v); };

  Vector<T> r_true = b - A(x0);
  const double r0_true = norm2(r_true);
  rep.residual_history.push_back(r0_true);
  if (observe)
    observe(0, x0);
  if (r0_true <= tol * scale || maxit == 0) {
    rep.converged = r0_true <= tol * scale;
    rep.final_relative_residual = r0_true / scale;
    out.x = std::move(x0);
    return out;
  }
  const Vector<T> r0 = side == PcSide::left ? M(r_true) : r_true;
  const double beta = norm2(r0);
  if (beta == 0.0) {
    rep.breakdown = true;
    rep.message = "preconditioned initial residual vanishes";
    rep.final_relative_residual = r0_true / scale;
    out.x = std::move(x0);
    return out;
  }

  std::vector<Vector<T>> V;
  V.push_back(scaled(T(1.0 / beta), r0));
  std::vector<std::vector<T>> H; // H[j] = column j, length j + 2
  std::vector<double> cs;
  std::vector<T> sn;
  std::vector<T> g{T(beta)};

  auto solution = [&](std::size_t k) {
    // back substitution on the k x k triangle
    std::vector<T> y(k);
    for (std::size_t i = k; i-- > 0;) {
      T s = g[i];
      for (std::size_t j = i + 1; j < k; ++j)
        s -= H[j][i] * y[j];
      y[i] = s / H[i][i];
    }
    Vector<T> u(n, T{});
    for (std::size_t j = 0; j < k; ++j)
      axpy(y[j], V[j], u);
    Vector<T> x = x0;
    axpy(T(1.0), side == PcSide::right ? M(u) : u, x);
    return x;
  };

  std::size_t k = 0;
  double res = beta;
  bool lucky = false;
  Vector<T> x_current = x0;
  while (k < maxit) {
    const auto& vk = V[k];
    Vector<T> w = side == PcSide::left ? M(A(vk)) : A(precond(vk));
    const double wnorm = norm2(w);
    std::vector<T> h(k + 2, T{});
    for (std::size_t i = 0; i <= k; ++i) {
      h[i] = dot(V[i], w);
      axpy(-h[i], V[i], w);
    }
    const double hnext = norm2(w);
    h[k + 1] = T(hnext);
    for (std::size_t i = 0; i < k; ++i) {
      const T t = T(cs[i]) * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -conj(sn[i]) * h[i] + T(cs[i]) * h[i + 1];
      h[i] = t;
    }
    double c;
    T s;
    detail::givens(h[k], h[k + 1], c, s);
    h[k] = T(c) * h[k] + s * h[k + 1];
    h[k + 1] = T{};
    cs.push_back(c);
    sn.push_back(s);
    g.push_back(-conj(s) * g[k]);
    g[k] = T(c) * g[k];
    H.push_back(std::move(h));
    ++k;
    res = std::abs(g[k]);
    lucky = hnext <= 1e-14 * std::max(wnorm, 1e-300);

    bool done;
    if (side == PcSide::left) {
      x_current = solution(k);
      const double tr = norm2(b - A(x_current));
      rep.residual_history.push_back(tr);
      done = tr <= tol * scale;
    } else {
      rep.residual_history.push_back(res);
      done = res <= tol * scale;
      if (observe)
        x_current = solution(k);
    }
    if (observe)
      observe(k, x_current);
    if (done || lucky)
      break;
    V.push_back(scaled(T(1.0 / hnext), w));
  }

  out.x = side == PcSide::left || observe ? x_current : solution(k);
  const double final_true = norm2(b - A(out.x));
  rep.iterations = k;
  rep.final_relative_residual = final_true / scale;
  rep.converged = rep.residual_history.back() <= tol * scale;
  if (lucky && !rep.converged)
    rep.converged = final_true <= tol * scale;
  if (!rep.converged)
    rep.message = "maximum number of iterations reached";
  return out;
}

template <Scalar T>
SolveResult<T> gmres(const LinearMap<T>& A, const Vector<T>& b, const LinearMap<T>& M, Vector<T> x0,
                     const KrylovOptions& opt, const IterateObserver<T>& observe = {})
{
  return gmres(A, b, M, opt.side, std::move(x0), opt.rtol, opt.maxit, observe);
}

} // namespace ddm
