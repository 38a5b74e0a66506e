#pragma once

// Model problems: finite-difference Poisson (1D/2D), P1 finite-element heterogeneous diffusion on a
// triangulated unit square, and finite-difference Helmholtz with absorption/impedance.

#include <ddmlab/la/csr.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ddm {

using Point2 = std::array<double, 2>;
using ScalarField = std::function<double(double x, double y)>;

inline constexpr std::size_t no_dof = std::numeric_limits<std::size_t>::max();

/// Interior points of a uniform grid on the unit interval/square, numbered lexicographically (x fastest).
struct StructuredGrid {
  int dim = 1;
  std::size_t nx = 1;
  std::size_t ny = 1;

  static StructuredGrid line(std::size_t m) { return {1, m, 1}; }
  static StructuredGrid square(std::size_t nx, std::size_t ny) { return {2, nx, ny}; }

  std::size_t size() const { return nx * ny; }
  double hx() const { return 1.0 / static_cast<double>(nx + 1); }
  double hy() const { return dim == 1 ? 1.0 : 1.0 / static_cast<double>(ny + 1); }
  double h() const { return std::max(hx(), hy()); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  std::size_t ix(std::size_t k) const { return k % nx; }
  std::size_t iy(std::size_t k) const { return k / nx; }
  Point2 coords(std::size_t k) const
  {
    return {static_cast<double>(ix(k) + 1) * hx(), dim == 1 ? 0.0 : static_cast<double>(iy(k) + 1) * hy()};
  }
};

/// Unit square split into cells_x x cells_y cells, each cut along its bottom-left/top-right diagonal.
struct TriMesh {
  std::size_t cells_x = 0;
  std::size_t cells_y = 0;
  std::vector<Point2> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<bool> boundary;

  static TriMesh unit_square(std::size_t cells_x, std::size_t cells_y)
  {
    if (cells_x == 0 || cells_y == 0)
      throw InvalidArgument("TriMesh::unit_square: need at least one cell per axis");
    TriMesh m;
    m.cells_x = cells_x;
    m.cells_y = cells_y;
    const auto vid = [&](std::size_t i, std::size_t j) { return j * (cells_x + 1) + i; };
    for (std::size_t j = 0; j <= cells_y; ++j)
      for (std::size_t i = 0; i <= cells_x; ++i) {
        m.vertices.push_back({static_cast<double>(i) / static_cast<double>(cells_x),
                              static_cast<double>(j) / static_cast<double>(cells_y)});
        m.boundary.push_back(i == 0 || j == 0 || i == cells_x || j == cells_y);
      }
    for (std::size_t j = 0; j < cells_y; ++j)
      for (std::size_t i = 0; i < cells_x; ++i) {
        m.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
        m.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      }
    return m;
  }

  /// Signed area; positive for counter-clockwise triangles.
  double area(std::size_t t) const
  {
    const auto& [a, b, c] = triangles[t];
    const auto& p = vertices[a];
    const auto& q = vertices[b];
    const auto& r = vertices[c];
    return 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]));
  }

  Point2 centroid(std::size_t t) const
  {
    const auto& tri = triangles[t];
    Point2 c{0.0, 0.0};
    for (auto v : tri) {
      c[0] += vertices[v][0] / 3.0;
      c[1] += vertices[v][1] / 3.0;
    }
    return c;
  }
};

enum class ProblemKind { poisson_fd_1d, poisson_fd_2d, diffusion_fem_2d, helmholtz_2d };
enum class BoundaryKind { dirichlet, impedance };

inline std::string to_string(ProblemKind k)
{
  switch (k) {
  case ProblemKind::poisson_fd_1d: return "poisson_fd_1d";
  case ProblemKind::poisson_fd_2d: return "poisson_fd_2d";
  case ProblemKind::diffusion_fem_2d: return "diffusion_fem_2d";
  case ProblemKind::helmholtz_2d: return "helmholtz_2d";
  }
  return "?";
}

inline std::string to_string(BoundaryKind b) { return b == BoundaryKind::dirichlet ? "dirichlet" : "impedance"; }

using ElementMatrix = std::array<double, 9>; ///< row-major 3x3

/// Global system A U = F plus what domain decomposition needs to know about it.
template <Scalar T>
struct AssembledSystem {
  ProblemKind kind = ProblemKind::poisson_fd_1d;
  CsrMatrix<T> A;
  Vector<T> F;
  StructuredGrid grid;            ///< layout of the unknowns (interior vertices for FEM)
  std::vector<Point2> dof_coords; ///< physical position of each unknown
  double h = 1.0;
  /// Lumped boundary mass of one interface DoF, used by Robin-type local operators.
  double interface_mass_scale = 1.0;
  std::vector<bool> on_boundary;  ///< unknowns lying on the physical boundary (impedance problems)
  std::vector<double> wavenumber; ///< k(x) per unknown, Helmholtz only

  // FEM bookkeeping
  std::optional<TriMesh> mesh;
  std::vector<ElementMatrix> element_matrices; ///< per triangle, before Dirichlet elimination
  std::vector<std::size_t> vertex_to_dof;      ///< no_dof for Dirichlet vertices
  std::vector<std::size_t> dof_to_vertex;

  std::size_t size() const { return A.nrows(); }
  bool is_fem() const { return mesh.has_value(); }
};

/// Builder input mirroring the bench configuration.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::poisson_fd_2d;
  std::size_t nx = 1; ///< interior points (FD) or cells (FEM) along x
  std::size_t ny = 1;
  ScalarField coefficient = [](double, double) { return 1.0; };
  ScalarField refractive_index = [](double, double) { return 1.0; };
  double omega = 0.0;
  double absorption = 0.0;
  BoundaryKind boundary = BoundaryKind::dirichlet;
  ScalarField rhs = [](double, double) { return 1.0; };

  void validate() const
  {
    if (nx == 0 || (kind != ProblemKind::poisson_fd_1d && ny == 0))
      throw InvalidArgument("ProblemSpec: grid sizes must be positive");
    if (kind == ProblemKind::helmholtz_2d && omega < 0.0)
      throw InvalidArgument("ProblemSpec: omega must be nonnegative");
    if (absorption < 0.0)
      throw InvalidArgument("ProblemSpec: absorption must be nonnegative");
    if (kind != ProblemKind::helmholtz_2d && (absorption != 0.0 || boundary != BoundaryKind::dirichlet))
      throw InvalidArgument("ProblemSpec: absorption/impedance only apply to helmholtz_2d");
  }
};

/// A = (1/h^2) tridiag(-1, 2, -1) with h = 1/(m+1); F_j = f(x_j).
inline AssembledSystem<double> poisson_1d(std::size_t m, const ScalarField& f = [](double, double) { return 1.0; })
{
  if (m == 0)
    throw InvalidArgument("poisson_1d: m must be positive");
  AssembledSystem<double> s;
  s.kind = ProblemKind::poisson_fd_1d;
  s.grid = StructuredGrid::line(m);
  s.h = s.grid.hx();
  const double inv_h2 = 1.0 / (s.h * s.h);
  std::vector<Triplet<double>> t;
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0)
      t.push_back({i, i - 1, -inv_h2});
    t.push_back({i, i, 2.0 * inv_h2});
    if (i + 1 < m)
      t.push_back({i, i + 1, -inv_h2});
  }
  s.A = CsrMatrix<double>::from_triplets(m, m, t);
  for (std::size_t k = 0; k < m; ++k) {
    s.dof_coords.push_back(s.grid.coords(k));
    s.F.push_back(f(s.dof_coords.back()[0], 0.0));
  }
  s.interface_mass_scale = 1.0 / s.h;
  s.on_boundary.assign(m, false);
  return s;
}

/// Five-point Laplacian on the interior nodes of the unit square, homogeneous Dirichlet data eliminated.
inline AssembledSystem<double> poisson_2d_fd(std::size_t nx, std::size_t ny,
                                             const ScalarField& f = [](double, double) { return 1.0; })
{
  if (nx == 0 || ny == 0)
    throw InvalidArgument("poisson_2d_fd: grid sizes must be positive");
  AssembledSystem<double> s;
  s.kind = ProblemKind::poisson_fd_2d;
  s.grid = StructuredGrid::square(nx, ny);
  const double cx = 1.0 / (s.grid.hx() * s.grid.hx());
  const double cy = 1.0 / (s.grid.hy() * s.grid.hy());
  s.h = s.grid.h();
  std::vector<Triplet<double>> t;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const auto k = s.grid.index(i, j);
      if (j > 0)
        t.push_back({k, s.grid.index(i, j - 1), -cy});
      if (i > 0)
        t.push_back({k, s.grid.index(i - 1, j), -cx});
      t.push_back({k, k, 2.0 * cx + 2.0 * cy});
      if (i + 1 < nx)
        t.push_back({k, s.grid.index(i + 1, j), -cx});
      if (j + 1 < ny)
        t.push_back({k, s.grid.index(i, j + 1), -cy});
    }
  s.A = CsrMatrix<double>::from_triplets(s.grid.size(), s.grid.size(), t);
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    s.dof_coords.push_back(s.grid.coords(k));
    s.F.push_back(f(s.dof_coords.back()[0], s.dof_coords.back()[1]));
  }
  s.interface_mass_scale = 1.0 / s.h;
  s.on_boundary.assign(s.grid.size(), false);
  return s;
}

/// P1 stiffness alpha * |T| * G^T G of one triangle (G: gradients of the barycentric coordinates).
inline ElementMatrix p1_stiffness(const Point2& p0, const Point2& p1, const Point2& p2, double alpha)
{
  const double area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  if (std::abs(area) < 1e-14)
    throw InvalidArgument("p1_stiffness: degenerate triangle");
  const std::array<Point2, 3> p{p0, p1, p2};
  std::array<Point2, 3> grad;
  for (int i = 0; i < 3; ++i) {
    const auto& pj = p[(i + 1) % 3];
    const auto& pk = p[(i + 2) % 3];
    grad[i] = {(pj[1] - pk[1]) / (2.0 * area), (pk[0] - pj[0]) / (2.0 * area)};
  }
  ElementMatrix K{};
  const double a = std::abs(area);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      K[3 * i + j] = alpha * a * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
  return K;
}

/// Per-element coefficient sampled at triangle centroids.
inline std::vector<double> element_coefficients(const TriMesh& mesh, const ScalarField& alpha)
{
  std::vector<double> a(mesh.triangles.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    const auto c = mesh.centroid(t);
    a[t] = alpha(c[0], c[1]);
  }
  return a;
}

/// P1 finite elements for -div(alpha grad u) = f with homogeneous Dirichlet data on the whole boundary.
inline AssembledSystem<double> diffusion_fem_2d(const TriMesh& mesh, const std::vector<double>& alpha,
                                                const ScalarField& f = [](double, double) { return 1.0; })
{
  if (alpha.size() != mesh.triangles.size())
    throw DimensionMismatch("diffusion_fem_2d: one coefficient per triangle required");
  AssembledSystem<double> s;
  s.kind = ProblemKind::diffusion_fem_2d;
  s.mesh = mesh;
  s.vertex_to_dof.assign(mesh.vertices.size(), no_dof);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (!mesh.boundary[v]) {
      s.vertex_to_dof[v] = s.dof_to_vertex.size();
      s.dof_to_vertex.push_back(v);
    }
  const std::size_t n = s.dof_to_vertex.size();
  if (n == 0)
    throw InvalidArgument("diffusion_fem_2d: mesh has no interior vertex");
  s.grid = StructuredGrid::square(mesh.cells_x - 1, mesh.cells_y - 1);
  s.h = std::max(1.0 / static_cast<double>(mesh.cells_x), 1.0 / static_cast<double>(mesh.cells_y));
  s.F.assign(n, 0.0);
  std::vector<Triplet<double>> t;
  s.element_matrices.reserve(mesh.triangles.size());
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
    if (!(alpha[e] > 0.0))
      throw InvalidArgument("diffusion_fem_2d: coefficient must be positive");
    const auto& tri = mesh.triangles[e];
    const auto K = p1_stiffness(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]], alpha[e]);
    s.element_matrices.push_back(K);
    const auto c = mesh.centroid(e);
    const double load = f(c[0], c[1]) * std::abs(mesh.area(e)) / 3.0;
    for (int a = 0; a < 3; ++a) {
      const auto da = s.vertex_to_dof[tri[a]];
      if (da == no_dof)
        continue;
      s.F[da] += load;
      for (int b = 0; b < 3; ++b) {
        const auto db = s.vertex_to_dof[tri[b]];
        if (db != no_dof)
          t.push_back({da, db, K[3 * a + b]});
      }
    }
  }
  s.A = CsrMatrix<double>::from_triplets(n, n, t);
  for (auto v : s.dof_to_vertex)
    s.dof_coords.push_back(mesh.vertices[v]);
  s.interface_mass_scale = s.h;
  s.on_boundary.assign(n, false);
  return s;
}

/// Elements whose unknowns all lie in `dofs` (sorted); elements touching only Dirichlet vertices are skipped.
template <Scalar T>
std::vector<std::size_t> subdomain_elements(const AssembledSystem<T>& sys, std::span<const std::size_t> dofs)
{
  if (!sys.is_fem())
    throw Unsupported("subdomain_elements: requires a finite-element system");
  std::vector<bool> in(sys.size(), false);
  for (auto d : dofs)
    in.at(d) = true;
  std::vector<std::size_t> elems;
  for (std::size_t e = 0; e < sys.mesh->triangles.size(); ++e) {
    bool any = false, all = true;
    for (auto v : sys.mesh->triangles[e]) {
      const auto d = sys.vertex_to_dof[v];
      if (d == no_dof)
        continue;
      any = true;
      all = all && in[d];
    }
    if (any && all)
      elems.push_back(e);
  }
  return elems;
}

/// Sum of the retained element matrices over `elements`, on the unknowns listed in `dofs`.
/// Original Dirichlet vertices are dropped; artificial interfaces stay natural (Neumann).
template <Scalar T>
DenseMatrix<T> neumann_matrix(const AssembledSystem<T>& sys, std::span<const std::size_t> elements,
                              std::span<const std::size_t> dofs)
{
  if (!sys.is_fem())
    throw Unsupported("neumann_matrix: finite-difference systems have no element matrices");
  std::vector<std::ptrdiff_t> local(sys.size(), -1);
  for (std::size_t i = 0; i < dofs.size(); ++i)
    local.at(dofs[i]) = static_cast<std::ptrdiff_t>(i);
  DenseMatrix<T> N(dofs.size(), dofs.size());
  for (auto e : elements) {
    const auto& tri = sys.mesh->triangles.at(e);
    const auto& K = sys.element_matrices[e];
    for (int a = 0; a < 3; ++a) {
      const auto da = sys.vertex_to_dof[tri[a]];
      if (da == no_dof)
        continue;
      if (local[da] < 0)
        throw InvalidArgument("neumann_matrix: element touches an unknown outside the DoF list");
      for (int b = 0; b < 3; ++b) {
        const auto db = sys.vertex_to_dof[tri[b]];
        if (db == no_dof)
          continue;
        if (local[db] < 0)
          throw InvalidArgument("neumann_matrix: element touches an unknown outside the DoF list");
        N(static_cast<std::size_t>(local[da]), static_cast<std::size_t>(local[db])) += T(K[3 * a + b]);
      }
    }
  }
  return N;
}

/// Neumann matrix on exactly the unknowns touched by `elements`; returns them in `dofs_out` (sorted).
template <Scalar T>
DenseMatrix<T> neumann_matrix(const AssembledSystem<T>& sys, std::span<const std::size_t> elements,
                              std::vector<std::size_t>* dofs_out = nullptr)
{
  if (!sys.is_fem())
    throw Unsupported("neumann_matrix: finite-difference systems have no element matrices");
  std::vector<bool> touched(sys.size(), false);
  for (auto e : elements)
    for (auto v : sys.mesh->triangles.at(e))
      if (sys.vertex_to_dof[v] != no_dof)
        touched[sys.vertex_to_dof[v]] = true;
  std::vector<std::size_t> dofs;
  for (std::size_t d = 0; d < touched.size(); ++d)
    if (touched[d])
      dofs.push_back(d);
  auto N = neumann_matrix(sys, elements, std::span<const std::size_t>(dofs));
  if (dofs_out)
    *dofs_out = std::move(dofs);
  return N;
}

/// Finite-difference Helmholtz operator -Lap_h u - (k(x)^2 + i xi) u = f on the interior nodes of `grid`.
///
/// Time dependence exp(-i omega t); k(x) = n(x) omega. With an impedance boundary, the outgoing
/// condition du/dn - i k u = 0 is imposed through a first-order ghost value, which adds -1/h^2 - i k/h
/// to the diagonal of each boundary row per boundary side.
inline AssembledSystem<complex_t> helmholtz_2d(const StructuredGrid& grid, double omega, const ScalarField& n_of_x,
                                               double xi, BoundaryKind boundary,
                                               const ScalarField& f = [](double, double) { return 1.0; })
{
  if (grid.dim != 2)
    throw InvalidArgument("helmholtz_2d: two-dimensional grid required");
  if (omega < 0.0 || xi < 0.0)
    throw InvalidArgument("helmholtz_2d: omega and xi must be nonnegative");
  AssembledSystem<complex_t> s;
  s.kind = ProblemKind::helmholtz_2d;
  s.grid = grid;
  s.h = grid.h();
  const std::size_t nx = grid.nx, ny = grid.ny;
  const double cx = 1.0 / (grid.hx() * grid.hx());
  const double cy = 1.0 / (grid.hy() * grid.hy());
  const complex_t I(0.0, 1.0);
  std::vector<Triplet<complex_t>> t;
  s.on_boundary.assign(grid.size(), false);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const auto k = grid.index(i, j);
      const auto p = grid.coords(k);
      const double kk = n_of_x(p[0], p[1]) * omega;
      s.wavenumber.push_back(kk);
      complex_t diag = 2.0 * cx + 2.0 * cy - (kk * kk + I * xi);
      if (j > 0)
        t.push_back({k, grid.index(i, j - 1), -cy});
      if (i > 0)
        t.push_back({k, grid.index(i - 1, j), -cx});
      if (i + 1 < nx)
        t.push_back({k, grid.index(i + 1, j), -cx});
      if (j + 1 < ny)
        t.push_back({k, grid.index(i, j + 1), -cy});
      if (boundary == BoundaryKind::impedance) {
        const int sides_x = (i == 0) + (i + 1 == nx);
        const int sides_y = (j == 0) + (j + 1 == ny);
        if (sides_x + sides_y > 0)
          s.on_boundary[k] = true;
        diag -= static_cast<double>(sides_x) * (cx + I * kk / grid.hx());
        diag -= static_cast<double>(sides_y) * (cy + I * kk / grid.hy());
      }
      t.push_back({k, k, diag});
      s.dof_coords.push_back(p);
      s.F.push_back(f(p[0], p[1]));
    }
  s.A = CsrMatrix<complex_t>::from_triplets(grid.size(), grid.size(), t);
  s.interface_mass_scale = 1.0 / s.h;
  return s;
}

} // namespace ddm
