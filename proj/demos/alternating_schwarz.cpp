// Max-norm error per sweep of the two-subdomain alternating method, Gauss-Seidel versus Jacobi order.

#include <ddmlab/schwarz.hpp>

#include <cstdio>

int main()
{
  const std::size_t m = 63, split = 31, sweeps = 12;
  const auto gs = ddm::alternating_schwarz_1d(m, split, sweeps, ddm::SweepOrder::gauss_seidel);
  const auto jac = ddm::alternating_schwarz_1d(m, split, sweeps, ddm::SweepOrder::jacobi);
  std::printf("sweep  gauss_seidel      jacobi\n");
  for (std::size_t k = 0; k < sweeps; ++k)
    std::printf("%5zu  %12.4e  %12.4e\n", k + 1, gs[k], jac[k]);
  return 0;
}
