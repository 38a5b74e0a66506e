#pragma once

// Coarse spaces (Nicolaides, GenEO, nested grid), the Galerkin coarse solve and the
// two-level combinators.

#include <ddmlab/decompose.hpp>
#include <ddmlab/discretize.hpp>
#include <ddmlab/la/eig.hpp>
#include <ddmlab/la/factor.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ddm {

enum class CoarseKind { none, nicolaides, geneo, grid, custom };

inline std::string to_string(CoarseKind k)
{
  switch (k) {
  case CoarseKind::none: return "none";
  case CoarseKind::nicolaides: return "nicolaides";
  case CoarseKind::geneo: return "geneo";
  case CoarseKind::grid: return "grid";
  case CoarseKind::custom: return "custom";
  }
  return "?";
}

inline CoarseKind parse_coarse_kind(const std::string& s)
{
  for (auto k : {CoarseKind::none, CoarseKind::nicolaides, CoarseKind::geneo, CoarseKind::grid})
    if (to_string(k) == s)
      return k;
  throw InvalidArgument("unknown coarse space '" + s + "' (expected none|nicolaides|geneo|grid)");
}

inline constexpr double coarse_rank_tolerance = 1e-12;
inline constexpr double coarse_drop_tolerance = 1e-10;

/// Basis Z, Galerkin operator A0 = Z* A Z and its factorization.
template <Scalar T>
struct CoarseSpace {
  CoarseKind kind = CoarseKind::custom;
  DenseMatrix<T> Z;
  DenseMatrix<T> A0;
  std::shared_ptr<const Factorization<T>> factor;
  double tau = 0.0;                               ///< GenEO threshold (0 otherwise)
  std::size_t grid_ratio = 0;                     ///< H_coarse / h for grid spaces
  std::vector<std::size_t> modes_per_subdomain;   ///< GenEO: selected modes before rank filtering

  std::size_t size() const { return Z.cols(); }
  std::size_t n() const { return Z.rows(); }

  /// Q r = Z A0^{-1} Z* r
  Vector<T> solve(const Vector<T>& r) const
  {
    require_same_size(r.size(), Z.rows(), "coarse solve");
    return matvec(Z, factor->solve(adjoint_matvec(Z, r)));
  }
};

/// Indices of a maximal well-conditioned column subset (pivoted modified Gram-Schmidt), ascending.
template <Scalar T>
std::vector<std::size_t> rank_filter(const DenseMatrix<T>& Z, double drop_tol = coarse_drop_tolerance)
{
  const std::size_t m = Z.cols();
  std::vector<Vector<T>> w(m);
  double ref = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    w[j] = Z.column(j);
    ref = std::max(ref, norm2(w[j]));
  }
  std::vector<bool> used(m, false);
  std::vector<std::size_t> kept;
  if (ref == 0.0)
    return kept;
  for (;;) {
    std::size_t best = m;
    double best_norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j])
        continue;
      const double nj = norm2(w[j]);
      if (nj > best_norm) {
        best_norm = nj;
        best = j;
      }
    }
    if (best == m || best_norm <= drop_tol * ref)
      break;
    used[best] = true;
    kept.push_back(best);
    auto q = scaled(T(1.0 / best_norm), w[best]);
    for (std::size_t j = 0; j < m; ++j)
      if (!used[j])
        axpy(-dot(q, w[j]), q, w[j]);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

template <Scalar T>
DenseMatrix<T> select_columns(const DenseMatrix<T>& Z, const std::vector<std::size_t>& cols)
{
  DenseMatrix<T> out(Z.rows(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k)
    out.set_column(k, Z.column(cols[k]));
  return out;
}

/// Builds A0 = Z* A Z after checking that Z has full column rank.
template <Scalar T>
CoarseSpace<T> make_coarse_space(const LinearMap<T>& A, DenseMatrix<T> Z, CoarseKind kind)
{
  if (Z.cols() == 0)
    throw EmptyCoarseSpace("coarse space has no columns");
  Z.check_finite();
  const auto gram = sym_eig(adjoint_matmul(Z, Z));
  if (gram.values.front() <= coarse_rank_tolerance * gram.values.back())
    throw RankDeficient("coarse basis columns are linearly dependent");
  DenseMatrix<T> AZ(Z.rows(), Z.cols());
  for (std::size_t j = 0; j < Z.cols(); ++j)
    AZ.set_column(j, A(Z.column(j)));
  auto A0 = adjoint_matmul(Z, AZ);
  if (A0.hermitian_defect() <= 1e-13 * A0.frobenius_norm())
    hermitian_part_inplace(A0);
  CoarseSpace<T> cs;
  cs.kind = kind;
  cs.factor = std::make_shared<const Factorization<T>>(auto_factor(A0));
  cs.A0 = std::move(A0);
  cs.Z = std::move(Z);
  return cs;
}

template <Scalar T>
CoarseSpace<T> make_coarse_space(const CsrMatrix<T>& A, DenseMatrix<T> Z, CoarseKind kind)
{
  return make_coarse_space(LinearMap<T>([&A](const Vector<T>& x) { return A.multiply(x); }), std::move(Z), kind);
}

/// Column i = R_i^T D_i R_i 1.
template <Scalar T>
CoarseSpace<T> nicolaides_space(const CsrMatrix<T>& A, const Decomposition& dec)
{
  if (dec.n_dofs != A.nrows())
    throw DimensionMismatch("nicolaides_space: decomposition does not match matrix");
  DenseMatrix<T> Z(dec.n_dofs, dec.size());
  for (std::size_t i = 0; i < dec.size(); ++i) {
    bool nonzero = false;
    for (std::size_t k = 0; k < dec.sets[i].size(); ++k) {
      Z(dec.sets[i][k], i) = T(dec.weights[i][k]);
      nonzero = nonzero || dec.weights[i][k] != 0.0;
    }
    if (!nonzero)
      throw RankDeficient("nicolaides_space: subdomain " + std::to_string(i) + " has an all-zero partition of unity");
  }
  return make_coarse_space(A, std::move(Z), CoarseKind::nicolaides);
}

/// tau = min_j delta_j / H_j
inline double geneo_tau_auto(const Decomposition& dec)
{
  double tau = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < dec.size(); ++j) {
    if (dec.diameter[j] <= 0.0 || dec.overlap_width[j] <= 0.0)
      throw InvalidArgument("geneo_tau_auto: needs geometry and a positive overlap");
    tau = std::min(tau, dec.overlap_width[j] / dec.diameter[j]);
  }
  return tau;
}

/// A_j^Neu on the overlapped set of every subdomain, indexed like dec.sets[j].
template <Scalar T>
std::vector<DenseMatrix<T>> neumann_matrices(const AssembledSystem<T>& sys, const Decomposition& dec)
{
  std::vector<DenseMatrix<T>> out;
  out.reserve(dec.size());
  for (std::size_t j = 0; j < dec.size(); ++j) {
    const std::span<const std::size_t> set(dec.sets[j]);
    const auto elements = subdomain_elements(sys, set);
    out.push_back(neumann_matrix(sys, std::span<const std::size_t>(elements), set));
  }
  return out;
}

/// Per subdomain, eigenvectors of (A_j^Neu, D_j A_j D_j) with eigenvalue <= tau, prolonged as R_j^T D_j phi.
template <Scalar T>
CoarseSpace<T> geneo_space(const CsrMatrix<T>& A, const Decomposition& dec, const std::vector<DenseMatrix<T>>& neumann,
                           double tau)
{
  if (!(tau > 0.0))
    throw InvalidArgument("geneo_space: threshold must be positive");
  if (neumann.size() != dec.size())
    throw DimensionMismatch("geneo_space: one Neumann matrix per subdomain required");
  std::vector<Vector<T>> columns;
  std::vector<std::size_t> per_sub(dec.size(), 0);
  for (std::size_t j = 0; j < dec.size(); ++j) {
    const auto& set = dec.sets[j];
    const auto& w = dec.weights[j];
    const auto& N = neumann[j];
    if (N.rows() != set.size() || N.cols() != set.size())
      throw DimensionMismatch("geneo_space: Neumann matrix size differs from subdomain size");
    auto B = A.principal_submatrix(set);
    for (std::size_t c = 0; c < set.size(); ++c)
      for (std::size_t r = 0; r < set.size(); ++r)
        B(r, c) *= T(w[r] * w[c]);
    const auto pairs = sym_gen_eig(N, B);
    auto prolong = [&](const Vector<T>& phi) {
      Vector<T> col(dec.n_dofs, T{});
      for (std::size_t k = 0; k < set.size(); ++k)
        col[set[k]] = T(w[k]) * phi[k];
      columns.push_back(std::move(col));
      ++per_sub[j];
    };
    for (std::size_t k = 0; k < pairs.values.size() && pairs.values[k] <= tau; ++k)
      prolong(pairs.vectors.column(k));
    double trace = 0.0;
    for (std::size_t k = 0; k < N.rows(); ++k)
      trace += real_part(N(k, k));
    for (std::size_t k = 0; k < pairs.kernel.cols(); ++k) {
      const auto phi = pairs.kernel.column(k);
      if (real_part(dot(phi, matvec(N, phi))) <= tau * trace * 1e-12)
        prolong(phi);
    }
  }
  if (columns.empty())
    throw EmptyCoarseSpace("geneo_space: no eigenvalue below the threshold in any subdomain");
  DenseMatrix<T> Z(dec.n_dofs, columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k)
    Z.set_column(k, columns[k]);
  const auto kept = rank_filter(Z);
  if (kept.empty())
    throw EmptyCoarseSpace("geneo_space: all selected modes vanish after partition-of-unity weighting");
  auto cs = make_coarse_space(A, select_columns(Z, kept), CoarseKind::geneo);
  cs.tau = tau;
  cs.modes_per_subdomain = std::move(per_sub);
  return cs;
}

template <Scalar T>
CoarseSpace<T> geneo_space(const AssembledSystem<T>& sys, const Decomposition& dec, double tau)
{
  return geneo_space(sys.A, dec, neumann_matrices(sys, dec), tau);
}

/// Linear (1D) or bilinear (2D) interpolation from the interior nodes of a grid coarsened by `ratio`.
inline DenseMatrix<double> grid_interpolation(const StructuredGrid& grid, std::size_t ratio)
{
  if (ratio == 0)
    throw InvalidArgument("grid_space: coarsening ratio must be positive");
  auto axis = [&](std::size_t n) {
    if ((n + 1) % ratio != 0)
      throw InvalidArgument("grid_space: H_coarse must divide the unit interval in multiples of h");
    const std::size_t nc = (n + 1) / ratio - 1;
    if (nc == 0)
      throw EmptyCoarseSpace("grid_space: coarse grid has no interior node");
    DenseMatrix<double> P(n, nc);
    for (std::size_t J = 0; J < nc; ++J) {
      const double center = static_cast<double>(ratio * (J + 1)); // fine node number, 1-based
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(static_cast<double>(i + 1) - center) / static_cast<double>(ratio);
        if (d < 1.0)
          P(i, J) = 1.0 - d;
      }
    }
    return P;
  };
  const auto Px = axis(grid.nx);
  if (grid.dim == 1)
    return Px;
  const auto Py = axis(grid.ny);
  DenseMatrix<double> Z(grid.size(), Px.cols() * Py.cols());
  for (std::size_t J = 0; J < Py.cols(); ++J)
    for (std::size_t I = 0; I < Px.cols(); ++I)
      for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t i = 0; i < grid.nx; ++i)
          Z(grid.index(i, j), J * Px.cols() + I) = Px(i, I) * Py(j, J);
  return Z;
}

template <Scalar T>
CoarseSpace<T> grid_space(const CsrMatrix<T>& A, const StructuredGrid& grid, std::size_t ratio)
{
  if (grid.size() != A.nrows())
    throw DimensionMismatch("grid_space: grid does not match matrix");
  auto P = grid_interpolation(grid, ratio);
  DenseMatrix<T> Z;
  if constexpr (is_complex_v<T>)
    Z = to_complex(P);
  else
    Z = std::move(P);
  auto cs = make_coarse_space(A, std::move(Z), CoarseKind::grid);
  cs.grid_ratio = ratio;
  return cs;
}

enum class Combinator { AD, BNN, ADEF1, ADEF2, RBNN1, RBNN2, none };

inline std::string to_string(Combinator c)
{
  switch (c) {
  case Combinator::AD: return "AD";
  case Combinator::BNN: return "BNN";
  case Combinator::ADEF1: return "ADEF1";
  case Combinator::ADEF2: return "ADEF2";
  case Combinator::RBNN1: return "RBNN1";
  case Combinator::RBNN2: return "RBNN2";
  case Combinator::none: return "none";
  }
  return "?";
}

inline Combinator parse_combinator(const std::string& s)
{
  for (auto c : {Combinator::AD, Combinator::BNN, Combinator::ADEF1, Combinator::ADEF2, Combinator::RBNN1,
                 Combinator::RBNN2, Combinator::none})
    if (to_string(c) == s)
      return c;
  throw InvalidArgument("unknown coarse correction '" + s + "' (expected AD|BNN|ADEF1|ADEF2|RBNN1|RBNN2|none)");
}

inline constexpr Combinator default_combinator = Combinator::ADEF1;

/// Composes a one-level map M1 with the coarse correction Q according to the combinator.
template <Scalar T>
class TwoLevelPreconditioner {
public:
  TwoLevelPreconditioner(LinearMap<T> A, LinearMap<T> M1, std::shared_ptr<const CoarseSpace<T>> coarse, Combinator c)
    : A_(std::move(A)), M1_(std::move(M1)), coarse_(std::move(coarse)), combinator_(c)
  {
    if (!coarse_ && combinator_ != Combinator::none)
      throw InvalidArgument("TwoLevelPreconditioner: combinator " + to_string(c) + " needs a coarse space");
  }

  /// Optional hook replacing Q (used to time or count coarse solves).
  void set_coarse_map(LinearMap<T> Q) { Q_ = std::move(Q); }

  Combinator combinator() const { return combinator_; }
  const CoarseSpace<T>* coarse() const { return coarse_.get(); }

  Vector<T> apply(const Vector<T>& r) const
  {
    switch (combinator_) {
    case Combinator::none: return M1_(r);
    case Combinator::AD: return M1_(r) + Q(r);
    case Combinator::BNN: {
      const auto q = Q(r);
      auto z = M1_(r - A_(q));
      return deflate_left(z) + q;
    }
    case Combinator::ADEF1: {
      const auto q = Q(r);
      return M1_(r - A_(q)) + q;
    }
    case Combinator::ADEF2: {
      auto z = M1_(r);
      return deflate_left(z) + Q(r);
    }
    case Combinator::RBNN1: {
      auto z = M1_(r - A_(Q(r)));
      return deflate_left(z);
    }
    case Combinator::RBNN2: {
      auto z = M1_(r);
      return deflate_left(z);
    }
    }
    throw InvalidArgument("TwoLevelPreconditioner: unknown combinator");
  }

  LinearMap<T> as_map() const
  {
    return [this](const Vector<T>& r) { return apply(r); };
  }

private:
  Vector<T> Q(const Vector<T>& r) const { return Q_ ? Q_(r) : coarse_->solve(r); }

  /// (I - Q A) z
  Vector<T> deflate_left(const Vector<T>& z) const { return z - Q(A_(z)); }

  LinearMap<T> A_;
  LinearMap<T> M1_;
  std::shared_ptr<const CoarseSpace<T>> coarse_;
  Combinator combinator_;
  LinearMap<T> Q_;
};

} // namespace ddm
