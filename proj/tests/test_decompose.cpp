#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace ddm;
using namespace ddm::testing;

namespace {

using Sets = std::vector<std::vector<std::size_t>>;

std::vector<std::size_t> range(std::size_t a, std::size_t b)
{
  std::vector<std::size_t> v(b - a);
  std::iota(v.begin(), v.end(), a);
  return v;
}

bool connected_within(const CsrMatrix<double>& A, const std::vector<std::size_t>& part)
{
  const std::set<std::size_t> in(part.begin(), part.end());
  std::set<std::size_t> seen{part.front()};
  std::vector<std::size_t> stack{part.front()};
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : A.row_cols(u))
      if (in.count(v) && seen.insert(v).second)
        stack.push_back(v);
  }
  return seen.size() == part.size();
}

} // namespace

TEST(CartesianPartition, LineEvenSplit)
{
  const auto p = cartesian_partition(StructuredGrid::line(8), 2);
  EXPECT_EQ(p.cores, (Sets{range(0, 4), range(4, 8)}));
}

TEST(CartesianPartition, LineUnevenSplitFrontLoaded)
{
  const auto p = cartesian_partition(StructuredGrid::line(10), 3);
  EXPECT_EQ(p.cores, (Sets{range(0, 4), range(4, 7), range(7, 10)}));
}

TEST(CartesianPartition, SquareBlocks)
{
  const auto g = StructuredGrid::square(4, 4);
  const auto p = cartesian_partition(g, 2, 2);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p.cores[0], (std::vector<std::size_t>{0, 1, 4, 5}));
  EXPECT_EQ(p.cores[1], (std::vector<std::size_t>{2, 3, 6, 7}));
  EXPECT_EQ(p.cores[2], (std::vector<std::size_t>{8, 9, 12, 13}));
  EXPECT_EQ(p.cores[3], (std::vector<std::size_t>{10, 11, 14, 15}));
}

TEST(CartesianPartition, TooManyPartsRejected)
{
  EXPECT_THROW(cartesian_partition(StructuredGrid::line(3), 4), InvalidArgument);
  EXPECT_THROW(cartesian_partition(StructuredGrid::line(3), 0), InvalidArgument);
}

TEST(Partition, FromOwnerValidates)
{
  EXPECT_THROW(Partition::from_owner({0, 0, 2}, 3, PartitionSource::cartesian), InvalidArgument);
  EXPECT_THROW(Partition::from_owner({0, 3}, 2, PartitionSource::cartesian), InvalidArgument);
  const auto p = Partition::from_owner({1, 0, 1}, 2, PartitionSource::cartesian);
  EXPECT_EQ(p.cores, (Sets{{1}, {0, 2}}));
}

TEST(GreedyPartition, PathOfSixIntoTwo)
{
  const auto p = greedy_graph_partition(poisson_1d(6).A, 2);
  EXPECT_EQ(p.cores, (Sets{{0, 1, 2}, {3, 4, 5}}));
}

TEST(GreedyPartition, BalancedConnectedAndDeterministic)
{
  const auto sys = poisson_2d_fd(13, 11);
  for (std::size_t N : {2u, 3u, 5u, 8u, 16u})
    for (std::uint64_t seed : {0u, 1u, 7u}) {
      const auto p = greedy_graph_partition(sys.A, N, seed);
      ASSERT_EQ(p.size(), N);
      const std::size_t lo = sys.size() / N;
      for (const auto& c : p.cores) {
        EXPECT_GE(c.size(), lo);
        EXPECT_LE(c.size(), lo + 1);
      }
      // relabeled by smallest member
      for (std::size_t i = 1; i < N; ++i)
        EXPECT_LT(p.cores[i - 1].front(), p.cores[i].front());
      EXPECT_TRUE(connected_within(sys.A, p.cores.front()));
      const auto again = greedy_graph_partition(sys.A, N, seed);
      EXPECT_EQ(again.owner, p.owner);
    }
}

TEST(GreedyPartition, RejectsBadPartCount)
{
  const auto A = poisson_1d(4).A;
  EXPECT_THROW(greedy_graph_partition(A, 0), InvalidArgument);
  EXPECT_THROW(greedy_graph_partition(A, 5), InvalidArgument);
}

TEST(ExpandOverlap, ZeroOverlapKeepsCores)
{
  const auto sys = poisson_2d_fd(6, 6);
  const auto p = cartesian_partition(sys.grid, 3, 2);
  const auto dec = expand_overlap(sys.A, p, 0);
  EXPECT_EQ(dec.sets, p.cores);
  EXPECT_EQ(dec.max_multiplicity, 1u);
}

TEST(ExpandOverlap, LineOfTwelveIntoThree)
{
  const auto sys = poisson_1d(12);
  const auto p = cartesian_partition(sys.grid, 3);
  const auto geo = geometry_of(sys);
  const auto dec = expand_overlap(sys.A, p, 1, &geo);
  EXPECT_EQ(dec.sets, (Sets{range(0, 5), range(3, 9), range(7, 12)}));
  EXPECT_EQ(dec.max_multiplicity, 2u);
  EXPECT_EQ(dec.multiplicity[3], 2u);
  EXPECT_EQ(dec.multiplicity[5], 1u);
  EXPECT_EQ(dec.adjacency, (Sets{{1}, {0, 2}, {1}}));
  EXPECT_EQ(dec.color, (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(dec.n_colors, 2u);
  const double h = 1.0 / 13.0;
  EXPECT_NEAR(dec.diameter[0], 4 * h, 1e-14);
  EXPECT_NEAR(dec.overlap_width[1], h, 1e-14);
}

TEST(ExpandOverlap, GraphBallIsDiamond)
{
  const auto g = StructuredGrid::square(7, 7);
  const auto sys = poisson_2d_fd(7, 7);
  const auto center = g.index(3, 3);
  std::vector<std::size_t> owner(g.size(), 1);
  owner[center] = 0;
  const auto p = Partition::from_owner(owner, 2, PartitionSource::cartesian);
  const auto dec = expand_overlap(sys.A, p, 2);
  ASSERT_EQ(dec.sets[0].size(), 13u);
  for (auto k : dec.sets[0]) {
    const auto dx = static_cast<long>(g.ix(k)) - 3, dy = static_cast<long>(g.iy(k)) - 3;
    EXPECT_LE(std::abs(dx) + std::abs(dy), 2);
  }
}

TEST(ExpandOverlap, SetsNestInDelta)
{
  const auto sys = poisson_2d_fd(9, 8);
  const auto p = greedy_graph_partition(sys.A, 5, 3);
  auto prev = expand_overlap(sys.A, p, 0);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto dec = expand_overlap(sys.A, p, d);
    for (std::size_t i = 0; i < p.size(); ++i)
      EXPECT_TRUE(std::includes(dec.sets[i].begin(), dec.sets[i].end(), prev.sets[i].begin(), prev.sets[i].end()));
    prev = dec;
  }
}

TEST(ExpandOverlap, SizeMismatchThrows)
{
  const auto p = cartesian_partition(StructuredGrid::line(5), 2);
  EXPECT_THROW(expand_overlap(poisson_1d(6).A, p, 1), DimensionMismatch);
}

class DecompositionProperty : public ::testing::TestWithParam<int> {};

TEST_P(DecompositionProperty, PartitionOfUnityAndColoring)
{
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  const std::size_t nx = 4 + rng() % 12, ny = 4 + rng() % 12;
  const auto sys = poisson_2d_fd(nx, ny);
  const std::size_t N = 1 + rng() % std::min<std::size_t>(12, sys.size() / 2);
  const std::size_t delta = rng() % 4;
  const auto p = greedy_graph_partition(sys.A, N, rng());
  auto dec = expand_overlap(sys.A, p, delta);

  // every unknown is covered and multiplicities agree with the sets
  std::vector<std::size_t> count(sys.size(), 0);
  for (const auto& s : dec.sets)
    for (auto j : s)
      ++count[j];
  EXPECT_EQ(count, dec.multiplicity);
  for (auto m : count)
    EXPECT_GE(m, 1u);

  EXPECT_LE(dec.pu_defect(), 1e-14);
  auto x = random_vector<double>(sys.size(), rng);
  Vector<double> y(sys.size(), 0.0);
  for (std::size_t i = 0; i < dec.size(); ++i) {
    auto xi = dec.restrict_to(i, x);
    for (std::size_t k = 0; k < xi.size(); ++k)
      xi[k] *= dec.weights[i][k];
    dec.prolong_add(i, xi, y);
  }
  EXPECT_LE(rel_diff(y, x), 1e-14);

  apply_pu(dec, PuKind::boolean);
  EXPECT_EQ(dec.pu_defect(), 0.0);
  for (const auto& w : dec.weights)
    for (auto v : w)
      EXPECT_TRUE(v == 0.0 || v == 1.0);

  // proper coloring of a symmetric interaction graph
  std::size_t max_degree = 0;
  for (std::size_t l = 0; l < dec.size(); ++l) {
    max_degree = std::max(max_degree, dec.adjacency[l].size());
    for (auto k : dec.adjacency[l]) {
      EXPECT_NE(dec.color[l], dec.color[k]);
      EXPECT_TRUE(std::binary_search(dec.adjacency[k].begin(), dec.adjacency[k].end(), l));
    }
  }
  EXPECT_LE(dec.n_colors, max_degree + 1);
  EXPECT_LE(dec.max_multiplicity, dec.n_colors);
}

INSTANTIATE_TEST_SUITE_P(Random, DecompositionProperty, ::testing::Range(0, 40));
