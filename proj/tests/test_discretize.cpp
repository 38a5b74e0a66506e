#include "support.hpp"

#include <gtest/gtest.h>

using namespace ddm;
using namespace ddm::testing;

TEST(Poisson1d, StencilEntries)
{
  const auto s = poisson_1d(3);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_EQ(s.A.at(i, i), 32.0);
  EXPECT_EQ(s.A.at(0, 1), -16.0);
  EXPECT_EQ(s.A.at(2, 1), -16.0);
  EXPECT_EQ(s.A.at(0, 2), 0.0);
}

TEST(Poisson1d, SingleUnknown)
{
  const auto s = poisson_1d(1);
  EXPECT_EQ(s.A.nrows(), 1u);
  EXPECT_EQ(s.A.at(0, 0), 8.0);
}

TEST(Poisson1d, ExactForQuadraticSolution)
{
  const auto s = poisson_1d(5);
  const auto u = auto_factor(s.A.to_dense()).solve(s.F);
  for (std::size_t j = 0; j < 5; ++j) {
    const double x = s.dof_coords[j][0];
    EXPECT_NEAR(u[j], 0.5 * x * (1.0 - x), 1e-12);
  }
}

TEST(Poisson2dFd, SingleUnknown)
{
  const auto s = poisson_2d_fd(1, 1);
  EXPECT_EQ(s.A.at(0, 0), 16.0);
}

TEST(Poisson2dFd, TwoByTwoHandStencil)
{
  const auto s = poisson_2d_fd(2, 2);
  const double c = 9.0; // 1/h^2, h = 1/3
  const auto expected = DenseMatrix<double>::from_rows(
    {{4 * c, -c, -c, 0}, {-c, 4 * c, 0, -c}, {-c, 0, 4 * c, -c}, {0, -c, -c, 4 * c}});
  EXPECT_LE(max_abs_diff(s.A.to_dense(), expected), 1e-12);
}

TEST(Poisson2dFd, TwentyByTwentyIsSpd)
{
  const auto s = poisson_2d_fd(20, 20);
  EXPECT_EQ(s.size(), 400u);
  EXPECT_EQ(s.A.hermitian_defect(), 0.0);
  EXPECT_NO_THROW(dense_cholesky_factor(s.A.to_dense()));
}

TEST(Poisson, AllSmallMeshesAreSpd)
{
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_NO_THROW(dense_cholesky_factor(poisson_1d(n).A.to_dense()));
    EXPECT_NO_THROW(dense_cholesky_factor(poisson_2d_fd(n, n + 1).A.to_dense()));
    const auto mesh = TriMesh::unit_square(n + 1, n + 2);
    const auto sys = diffusion_fem_2d(mesh, std::vector<double>(mesh.triangles.size(), 1.0));
    EXPECT_NO_THROW(dense_cholesky_factor(sys.A.to_dense()));
  }
}

TEST(TriMesh, PositivelyOrientedAndBoundaryFlags)
{
  const auto m = TriMesh::unit_square(3, 2);
  EXPECT_EQ(m.triangles.size(), 12u);
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    EXPECT_GT(m.area(t), 0.0);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const auto& p = m.vertices[v];
    const bool on = p[0] == 0.0 || p[1] == 0.0 || p[0] == 1.0 || p[1] == 1.0;
    EXPECT_EQ(m.boundary[v], on);
  }
}

TEST(FemDiffusion, SingleInteriorNode)
{
  const auto m = TriMesh::unit_square(2, 2);
  const auto s = diffusion_fem_2d(m, std::vector<double>(m.triangles.size(), 1.0));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.A.at(0, 0), 4.0, 1e-14);
}

TEST(FemDiffusion, ElementStiffnessRowsSumToZero)
{
  const auto K = p1_stiffness({0.0, 0.0}, {1.0, 0.0}, {0.3, 0.7}, 2.5);
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(K[3 * i] + K[3 * i + 1] + K[3 * i + 2], 0.0, 1e-14);
}

TEST(FemDiffusion, DegenerateTriangleRejected)
{
  EXPECT_THROW(p1_stiffness({0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, 1.0), InvalidArgument);
}

TEST(FemDiffusion, NonPositiveCoefficientRejected)
{
  const auto m = TriMesh::unit_square(2, 2);
  std::vector<double> a(m.triangles.size(), 1.0);
  a[3] = 0.0;
  EXPECT_THROW(diffusion_fem_2d(m, a), InvalidArgument);
}

TEST(FemDiffusion, MatchesFivePointStencilOnCrissCrossMesh)
{
  // On this triangulation P1 stiffness with alpha = 1 equals h^2 times the five-point Laplacian.
  const auto m = TriMesh::unit_square(5, 5);
  const auto s = diffusion_fem_2d(m, std::vector<double>(m.triangles.size(), 1.0));
  const auto fd = poisson_2d_fd(4, 4);
  const double h2 = 1.0 / 25.0;
  auto scaled_fd = fd.A.to_dense();
  for (std::size_t j = 0; j < 16; ++j)
    for (std::size_t i = 0; i < 16; ++i)
      scaled_fd(i, j) *= h2;
  EXPECT_LE(max_abs_diff(s.A.to_dense(), scaled_fd), 1e-13);
}

TEST(FemDiffusion, ElementMatricesSumToGlobalMatrix)
{
  const auto m = TriMesh::unit_square(4, 3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  std::vector<double> a(m.triangles.size());
  for (auto& v : a)
    v = u(rng);
  const auto s = diffusion_fem_2d(m, a);
  const std::size_t nv = m.vertices.size();
  DenseMatrix<double> full(nv, nv);
  for (std::size_t e = 0; e < m.triangles.size(); ++e)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        full(m.triangles[e][i], m.triangles[e][j]) += s.element_matrices[e][3 * i + j];
  const auto A = s.A.to_dense();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      EXPECT_NEAR(A(i, j), full(s.dof_to_vertex[i], s.dof_to_vertex[j]), 1e-13);
  EXPECT_LE(s.A.hermitian_defect(), 1e-14 * s.A.frobenius_norm());
}

TEST(FemDiffusion, ConditionGrowsWithContrast)
{
  const auto m = TriMesh::unit_square(6, 6);
  auto cond = [&](double contrast) {
    const auto a = element_coefficients(m, [&](double x, double) { return x < 0.5 ? 1.0 : contrast; });
    const auto e = sym_eig(diffusion_fem_2d(m, a).A.to_dense());
    return e.values.back() / e.values.front();
  };
  const double c1 = cond(1.0), c2 = cond(1e2), c4 = cond(1e4), c6 = cond(1e6);
  EXPECT_GT(c2, 10.0 * c1);
  // proportional to the contrast once it dominates: ratio of successive decades close to 100
  EXPECT_NEAR(c6 / c4, 100.0, 5.0);
  EXPECT_GT(c4 / c2, 50.0);
}

TEST(Helmholtz, ZeroWavenumberIsPoisson)
{
  const auto g = StructuredGrid::square(5, 4);
  const auto s = helmholtz_2d(g, 0.0, [](double, double) { return 1.0; }, 0.0, BoundaryKind::dirichlet);
  const auto p = poisson_2d_fd(5, 4);
  const auto H = s.A.to_dense();
  const auto P = p.A.to_dense();
  for (std::size_t j = 0; j < p.size(); ++j)
    for (std::size_t i = 0; i < p.size(); ++i)
      EXPECT_EQ(H(i, j), complex_t(P(i, j), 0.0));
}

TEST(Helmholtz, AbsorptionShiftsDiagonal)
{
  const double k = 7.0;
  const auto g = StructuredGrid::square(6, 6);
  const auto s = helmholtz_2d(g, k, [](double, double) { return 1.0; }, k * k, BoundaryKind::dirichlet);
  const auto p = poisson_2d_fd(6, 6);
  const auto row = g.index(2, 3);
  const complex_t expected = p.A.at(row, row) - k * k * complex_t(1.0, 1.0);
  EXPECT_NEAR(std::abs(s.A.at(row, row) - expected), 0.0, 1e-10);
  EXPECT_EQ(s.A.at(row, g.index(1, 3)), complex_t(p.A.at(row, g.index(1, 3)), 0.0));
}

TEST(Helmholtz, ImpedanceBoundaryRows)
{
  const double k = 5.0;
  const auto g = StructuredGrid::square(4, 4);
  const auto s = helmholtz_2d(g, k, [](double, double) { return 1.0; }, 0.0, BoundaryKind::impedance);
  const double c = 25.0, h = 0.2;
  // corner: two ghost sides, each adds -1/h^2 - i k / h
  const complex_t corner = 4.0 * c - k * k - 2.0 * (c + complex_t(0.0, k / h));
  EXPECT_NEAR(std::abs(s.A.at(0, 0) - corner), 0.0, 1e-10);
  EXPECT_TRUE(s.on_boundary[0]);
  EXPECT_FALSE(s.on_boundary[g.index(1, 1)]);
  EXPECT_NEAR(std::abs(s.A.at(g.index(1, 1), g.index(1, 1)) - complex_t(4.0 * c - k * k, 0.0)), 0.0, 1e-10);
}

TEST(Helmholtz, PlaneWaveTruncationIsSecondOrder)
{
  const double k = 6.0;
  const double dir[2] = {0.6, 0.8};
  auto residual_at_center = [&](std::size_t n) {
    const auto g = StructuredGrid::square(n, n);
    const auto s = helmholtz_2d(g, k, [](double, double) { return 1.0; }, 0.0, BoundaryKind::dirichlet);
    Vector<complex_t> u(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) {
      const auto p = g.coords(q);
      u[q] = std::exp(complex_t(0.0, k * (dir[0] * p[0] + dir[1] * p[1])));
    }
    const auto Au = s.A.multiply(u);
    return std::abs(Au[g.index(n / 2, n / 2)]);
  };
  const double r1 = residual_at_center(31), r2 = residual_at_center(63);
  const double h1 = 1.0 / 32.0;
  const double taylor = h1 * h1 * std::pow(k, 4) * (std::pow(dir[0], 4) + std::pow(dir[1], 4)) / 12.0;
  EXPECT_NEAR(r1, taylor, 0.05 * taylor);
  EXPECT_NEAR(r1 / r2, 4.0, 0.1);
}

TEST(Helmholtz, AbsorptionKeepsFieldOfValuesOffRealAxis)
{
  const double k = 10.0;
  const auto g = StructuredGrid::square(8, 8);
  const auto s = helmholtz_2d(g, k, [](double, double) { return 1.0; }, k * k, BoundaryKind::impedance);
  std::mt19937_64 rng(12);
  double min_im = 1e300, max_im = -1e300;
  for (int trial = 0; trial < 200; ++trial) {
    auto x = random_vector<complex_t>(g.size(), rng);
    x = scaled(complex_t(1.0 / norm2(x)), x);
    const double im = dot(x, s.A.multiply(x)).imag();
    min_im = std::min(min_im, im);
    max_im = std::max(max_im, im);
  }
  // -i xi and -i k/h both push the field of values into the lower half-plane
  EXPECT_LT(max_im, 0.0);
  EXPECT_GT(std::abs(max_im), 0.0);
}

TEST(NeumannMatrix, AllElementsGiveGlobalMatrix)
{
  const auto m = TriMesh::unit_square(4, 4);
  const auto s = diffusion_fem_2d(m, std::vector<double>(m.triangles.size(), 1.0));
  std::vector<std::size_t> all(m.triangles.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> dofs;
  const auto N = neumann_matrix(s, std::span<const std::size_t>(all), &dofs);
  EXPECT_EQ(dofs.size(), s.size());
  EXPECT_LE(max_abs_diff(N, s.A.to_dense()), 1e-14);
}

TEST(NeumannMatrix, SingleInteriorElement)
{
  const auto m = TriMesh::unit_square(4, 4);
  const auto s = diffusion_fem_2d(m, std::vector<double>(m.triangles.size(), 1.0));
  // cell (1,1) lower triangle has vertices (1,1), (2,1), (2,2): all interior
  const std::size_t e = 2 * (1 * 4 + 1);
  for (auto v : m.triangles[e])
    ASSERT_FALSE(m.boundary[v]);
  const std::vector<std::size_t> one{e};
  std::vector<std::size_t> dofs;
  const auto N = neumann_matrix(s, std::span<const std::size_t>(one), &dofs);
  ASSERT_EQ(N.rows(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(N(i, 0) + N(i, 1) + N(i, 2), 0.0, 1e-14);
  const auto& K = s.element_matrices[e];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const auto da = s.vertex_to_dof[m.triangles[e][a]];
      const auto db = s.vertex_to_dof[m.triangles[e][b]];
      const auto la = std::find(dofs.begin(), dofs.end(), da) - dofs.begin();
      const auto lb = std::find(dofs.begin(), dofs.end(), db) - dofs.begin();
      EXPECT_EQ(N(la, lb), K[3 * a + b]);
    }
}

TEST(NeumannMatrix, TwoElementsSharingAnEdge)
{
  const auto m = TriMesh::unit_square(4, 4);
  const auto s = diffusion_fem_2d(m, std::vector<double>(m.triangles.size(), 1.0));
  // both halves of cell (1,1): vertices (1,1), (2,1), (2,2), (1,2)
  const std::vector<std::size_t> two{10, 11};
  std::vector<std::size_t> dofs;
  const auto N = neumann_matrix(s, std::span<const std::size_t>(two), &dofs);
  ASSERT_EQ(N.rows(), 4u);
  // hand assembly of the unit-square cell: diagonal corners 1, off-diagonal corners 0, edges -1/2
  auto vid = [](std::size_t i, std::size_t j) { return j * 5 + i; };
  auto loc = [&](std::size_t v) { return std::find(dofs.begin(), dofs.end(), s.vertex_to_dof[v]) - dofs.begin(); };
  const auto a = loc(vid(1, 1)), b = loc(vid(2, 1)), c = loc(vid(2, 2)), d = loc(vid(1, 2));
  EXPECT_NEAR(N(a, a), 1.0, 1e-14);
  EXPECT_NEAR(N(c, c), 1.0, 1e-14);
  EXPECT_NEAR(N(b, b), 1.0, 1e-14);
  EXPECT_NEAR(N(d, d), 1.0, 1e-14);
  EXPECT_NEAR(N(a, b), -0.5, 1e-14);
  EXPECT_NEAR(N(a, d), -0.5, 1e-14);
  EXPECT_NEAR(N(b, c), -0.5, 1e-14);
  EXPECT_NEAR(N(c, d), -0.5, 1e-14);
  EXPECT_NEAR(N(a, c), 0.0, 1e-14);
  EXPECT_NEAR(N(b, d), 0.0, 1e-14);
}

TEST(NeumannMatrix, FiniteDifferenceUnsupported)
{
  const auto s = poisson_2d_fd(3, 3);
  const std::vector<std::size_t> none;
  EXPECT_THROW(neumann_matrix(s, std::span<const std::size_t>(none)), Unsupported);
}
