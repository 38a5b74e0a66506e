// Assemble, decompose, precondition and solve a small Poisson problem with the library API.

#include <ddmlab/ddmlab.hpp>

#include <cstdio>
#include <memory>

int main()
{
  using namespace ddm;
  const auto sys = poisson_2d_fd(31, 31);
  const auto geo = geometry_of(sys);
  auto dec = std::make_shared<const Decomposition>(expand_overlap(sys.A, cartesian_partition(sys.grid, 4, 4), 2, &geo));
  const auto ras = OneLevelPreconditioner<double>::build(sys.A, dec, SchwarzMethod::RAS);
  const auto coarse = std::make_shared<const CoarseSpace<double>>(nicolaides_space(sys.A, *dec));
  const TwoLevelPreconditioner<double> two(as_map(sys.A), ras.as_map(), coarse, Combinator::ADEF1);

  const Vector<double> x0(sys.size(), 0.0);
  const auto one = gmres(as_map(sys.A), sys.F, ras.as_map(), PcSide::right, x0, 1e-8, 500);
  const auto with_coarse = gmres(as_map(sys.A), sys.F, two.as_map(), PcSide::right, x0, 1e-8, 500);
  std::printf("unknowns %zu, subdomains %zu, colors %zu\n", sys.size(), dec->size(), dec->n_colors);
  std::printf("RAS + GMRES:                %3zu iterations\n", one.report.iterations);
  std::printf("RAS + Nicolaides (ADEF1):   %3zu iterations\n", with_coarse.report.iterations);
  return one.report.converged && with_coarse.report.converged ? 0 : 1;
}
