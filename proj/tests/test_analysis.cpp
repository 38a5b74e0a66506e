#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace ddm;
using namespace ddm::testing;

namespace {

AssembledSystem<double> fem(std::size_t cells)
{
  const auto mesh = TriMesh::unit_square(cells, cells);
  return diffusion_fem_2d(mesh, std::vector<double>(mesh.triangles.size(), 1.0));
}

std::vector<double> sorted_real(const std::vector<complex_t>& v)
{
  std::vector<double> out;
  for (auto z : v)
    out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST(Spectrum, IdentityPreconditionerGivesMatrixSpectrum)
{
  const auto sys = poisson_1d(3);
  const auto s = preconditioned_spectrum(sys.A, identity_map());
  ASSERT_TRUE(s.hermitian_path);
  const double r2 = std::sqrt(2.0);
  EXPECT_NEAR(s.lambda_min, 16.0 * (2.0 - r2), 1e-12);
  EXPECT_NEAR(s.lambda_max, 16.0 * (2.0 + r2), 1e-12);
  EXPECT_NEAR(s.kappa, (2.0 + r2) / (2.0 - r2), 1e-12);
  EXPECT_EQ(s.count_near(32.0, 1e-10), 1u);
}

TEST(Spectrum, SingleSubdomainAsmIsIdentity)
{
  const auto sys = poisson_2d_fd(6, 6);
  const auto dec = make_decomposition(sys, cartesian_partition(sys.grid, 1, 1), 0);
  const auto M = OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::ASM);
  const auto s = preconditioned_spectrum(sys.A, M.as_map());
  EXPECT_EQ(s.count_near(1.0, 1e-10), 36u);
  EXPECT_NEAR(s.kappa, 1.0, 1e-10);
}

TEST(Spectrum, HermitianPathMatchesGeneralEigenvalues)
{
  const auto sys = poisson_2d_fd(7, 7);
  const auto dec = make_decomposition(sys, cartesian_partition(sys.grid, 2, 2), 1);
  const auto M = OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::ASM);
  const auto s = preconditioned_spectrum(sys.A, M.as_map());
  ASSERT_TRUE(s.hermitian_path);
  const auto general = sorted_real(eigenvalues(matmul(assemble_dense(M.as_map(), 49), sys.A.to_dense())));
  const auto herm = sorted_real(s.eigenvalues);
  ASSERT_EQ(general.size(), herm.size());
  for (std::size_t k = 0; k < herm.size(); ++k)
    EXPECT_NEAR(herm[k], general[k], 1e-8);
}

TEST(Spectrum, NonsymmetricPreconditionerUsesGeneralPath)
{
  const auto sys = poisson_2d_fd(8, 8);
  const auto dec = make_decomposition(sys, cartesian_partition(sys.grid, 2, 2), 2);
  const auto M = OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::RAS);
  const auto s = preconditioned_spectrum(sys.A, M.as_map());
  EXPECT_FALSE(s.hermitian_path);
  EXPECT_TRUE(std::isnan(s.kappa));
  EXPECT_EQ(s.eigenvalues.size(), 64u);
}

TEST(Spectrum, ZeroOverlapRasMatchesAsm)
{
  const auto sys = poisson_2d_fd(6, 9);
  const auto dec = make_decomposition(sys, cartesian_partition(sys.grid, 2, 3), 0);
  const auto a = preconditioned_spectrum(sys.A, OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::ASM).as_map());
  const auto r = preconditioned_spectrum(sys.A, OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::RAS).as_map());
  EXPECT_NEAR(a.lambda_min, r.lambda_min, 1e-10);
  EXPECT_NEAR(a.lambda_max, r.lambda_max, 1e-10);
}

TEST(Spectrum, SizeLimit)
{
  const auto sys = poisson_2d_fd(45, 45);
  EXPECT_THROW(preconditioned_spectrum(sys.A, identity_map()), SizeLimitExceeded);
}

TEST(Spectrum, RichardsonRadius)
{
  SpectrumReport s;
  s.eigenvalues = {0.5, 1.5};
  EXPECT_DOUBLE_EQ(richardson_spectral_radius(s), 0.5);
  EXPECT_DOUBLE_EQ(richardson_spectral_radius(s, 2.0), 2.0);
  s.eigenvalues = {complex_t(1.0, 0.3)};
  EXPECT_DOUBLE_EQ(richardson_spectral_radius(s), 0.3);
}

TEST(ColoringBound, AsmLargestEigenvalueBelowColorCount)
{
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto sys = poisson_2d_fd(9 + seed, 8);
    const auto dec = make_decomposition(sys, greedy_graph_partition(sys.A, 3 + seed, seed), 1 + seed % 3);
    const auto M = OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::ASM);
    const auto s = preconditioned_spectrum(sys.A, M.as_map());
    const auto b = coloring_bound_check(s, *dec);
    EXPECT_TRUE(b.satisfied) << b.measured << " > " << b.bound;
    EXPECT_EQ(b.bound, static_cast<double>(dec->n_colors));
  }
}

TEST(Fsl, SingleSubdomainConstantsAreOne)
{
  const auto sys = fem(6);
  const auto dec = make_decomposition(sys, cartesian_partition(sys.grid, 1, 1), 0);
  const auto N = neumann_matrices(sys, *dec);
  const std::vector<DenseMatrix<double>> B{sys.A.to_dense()};
  const auto c = fsl_constants(sys.A, *dec, N, B);
  EXPECT_NEAR(c.tau1, 1.0, 1e-10);
  EXPECT_NEAR(c.gamma1, 1.0, 1e-10);
  EXPECT_EQ(c.Mc, 1u);
  EXPECT_EQ(c.Nc, 1u);
}

TEST(Fsl, BoundsHoldOnTwoSubdomains)
{
  const auto sys = fem(10);
  const auto dec = make_decomposition(sys, cartesian_partition(sys.grid, 2, 1), 2);
  const auto N = neumann_matrices(sys, *dec);
  const auto robin = LocalOperatorKind<double>::robin_constant(1.0, sys.interface_mass_scale);
  const auto soras = OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::SORAS, robin);
  std::vector<DenseMatrix<double>> B;
  for (const auto& op : soras.local_operators())
    B.push_back(op.matrix);
  const auto c = fsl_constants(sys.A, *dec, N, B);
  EXPECT_GT(c.tau1, 0.0);
  EXPECT_GT(c.gamma1, 0.0);
  const auto asm_ = OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::ASM);
  EXPECT_TRUE(fsl_lower_check(preconditioned_spectrum(sys.A, asm_.as_map()), c).satisfied);
  EXPECT_TRUE(fsl_upper_check(preconditioned_spectrum(sys.A, soras.as_map()), c).satisfied);
}

TEST(Fsl, MismatchedListsRejected)
{
  const auto sys = fem(5);
  const auto dec = make_decomposition(sys, cartesian_partition(sys.grid, 2, 1), 1);
  const std::vector<DenseMatrix<double>> one{sys.A.to_dense()};
  EXPECT_THROW(fsl_constants(sys.A, *dec, one, {}), DimensionMismatch);
  EXPECT_THROW(fsl_constants(sys.A, *dec, {}, one), DimensionMismatch);
  const auto c = fsl_constants(sys.A, *dec, {}, {});
  EXPECT_TRUE(std::isnan(c.tau1));
  EXPECT_TRUE(std::isnan(c.gamma1));
}

TEST(GeneoBound, Arithmetic)
{
  EXPECT_DOUBLE_EQ(geneo_bound(2, 0.5), 96.0);
  EXPECT_DOUBLE_EQ(geneo_bound(1, 1.0), 2.0 * (2.0 + 3.0 * 2.0));
  SpectrumReport s;
  s.hermitian_path = true;
  s.kappa = 95.0;
  EXPECT_TRUE(geneo_bound_check(s, 2, 0.5).satisfied);
  s.kappa = 97.0;
  EXPECT_FALSE(geneo_bound_check(s, 2, 0.5).satisfied);
  s.hermitian_path = false;
  s.kappa = 1.0;
  EXPECT_FALSE(geneo_bound_check(s, 2, 0.5).satisfied);
}

TEST(PcgBound, Factor)
{
  EXPECT_EQ(pcg_bound_factor(100.0, 0), 1.0);
  EXPECT_DOUBLE_EQ(pcg_bound_factor(9.0, 1), 1.0);
  EXPECT_DOUBLE_EQ(pcg_bound_factor(9.0, 3), 0.25);
  EXPECT_EQ(pcg_bound_factor(1.0, 2), 0.0);
}

TEST(PcgBound, Envelope)
{
  const auto ok = pcg_bound_envelope({1.0, 0.9, 0.2, 0.1}, 9.0);
  EXPECT_TRUE(ok.satisfied);
  const auto bad = pcg_bound_envelope({1.0, 0.9, 0.6}, 9.0);
  EXPECT_FALSE(bad.satisfied);
  EXPECT_DOUBLE_EQ(bad.bound, 0.5);
  EXPECT_DOUBLE_EQ(bad.measured, 0.6);
}

TEST(PcgBound, HoldsForSchwarzPcg)
{
  const auto sys = poisson_2d_fd(14, 14);
  const auto dec = make_decomposition(sys, cartesian_partition(sys.grid, 2, 2), 1);
  const auto M = OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::ASM);
  const auto s = preconditioned_spectrum(sys.A, M.as_map());
  const auto exact = auto_factor(sys.A.to_dense()).solve(sys.F);
  std::vector<Vector<double>> iterates;
  (void)pcg(as_map(sys.A), sys.F, M.as_map(), Vector<double>(sys.size(), 0.0), 1e-10, 200,
            IterateObserver<double>([&](std::size_t, const Vector<double>& x) { iterates.push_back(x); }));
  const auto e = energy_errors(sys.A, exact, iterates);
  EXPECT_TRUE(pcg_bound_envelope(e, s.kappa, 1e-10 * e.front()).satisfied);
}

TEST(EnergyErrors, ExactIterateHasZeroError)
{
  const auto sys = poisson_1d(5);
  const Vector<double> x{1, 2, 3, 4, 5};
  const auto e = energy_errors(sys.A, x, {x, Vector<double>(5, 0.0)});
  EXPECT_EQ(e[0], 0.0);
  EXPECT_NEAR(e[1] * e[1], dot(x, sys.A.multiply(x)), 1e-9);
}

TEST(SpectrumCsv, Format)
{
  std::ostringstream out;
  write_spectrum_csv(out, {complex_t(1.5, 0.0), complex_t(2.0, -0.5)});
  EXPECT_EQ(out.str(), "re,im\n1.5,0\n2,-0.5\n");
}
