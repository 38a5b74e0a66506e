#pragma once

// Overlapping decompositions: disjoint partitions, overlap growth along the matrix graph,
// restriction index sets, partitions of unity, subdomain geometry and coloring.

#include <ddmlab/discretize.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace ddm {

enum class PartitionSource { cartesian, greedy_graph };
enum class PuKind { multiplicity, boolean };

inline std::string to_string(PuKind k) { return k == PuKind::multiplicity ? "multiplicity" : "boolean"; }
inline std::string to_string(PartitionSource s) { return s == PartitionSource::cartesian ? "cartesian" : "greedy_graph"; }

/// Disjoint cover of the unknowns by N nonempty core sets.
struct Partition {
  std::size_t n_dofs = 0;
  std::vector<std::vector<std::size_t>> cores; ///< sorted
  std::vector<std::size_t> owner;
  PartitionSource source = PartitionSource::cartesian;

  std::size_t size() const { return cores.size(); }

  static Partition from_owner(std::vector<std::size_t> owner, std::size_t n_parts, PartitionSource source)
  {
    Partition p;
    p.n_dofs = owner.size();
    p.cores.resize(n_parts);
    for (std::size_t d = 0; d < owner.size(); ++d) {
      if (owner[d] >= n_parts)
        throw InvalidArgument("Partition: owner index out of range");
      p.cores[owner[d]].push_back(d);
    }
    p.owner = std::move(owner);
    p.source = source;
    p.validate();
    return p;
  }

  void validate() const
  {
    if (owner.size() != n_dofs)
      throw DimensionMismatch("Partition: owner array length");
    std::size_t total = 0;
    for (std::size_t i = 0; i < cores.size(); ++i) {
      if (cores[i].empty())
        throw InvalidArgument("Partition: subdomain " + std::to_string(i) + " is empty");
      for (auto d : cores[i])
        if (owner.at(d) != i)
          throw InvalidArgument("Partition: core sets and owner array disagree");
      total += cores[i].size();
    }
    if (total != n_dofs)
      throw InvalidArgument("Partition: core sets do not cover the unknowns exactly once");
  }
};

namespace detail {

/// Splits n items into p contiguous blocks; the first n % p blocks get one extra item.
inline std::vector<std::size_t> block_starts(std::size_t n, std::size_t p)
{
  std::vector<std::size_t> start(p + 1, 0);
  for (std::size_t b = 0; b < p; ++b)
    start[b + 1] = start[b] + n / p + (b < n % p ? 1 : 0);
  return start;
}

} // namespace detail

/// Contiguous px x py blocks of a structured grid (py = 1 in 1D); subdomain index = by * px + bx.
inline Partition cartesian_partition(const StructuredGrid& grid, std::size_t px, std::size_t py = 1)
{
  if (px == 0 || py == 0)
    throw InvalidArgument("cartesian_partition: block counts must be positive");
  if (px > grid.nx || py > grid.ny)
    throw InvalidArgument("cartesian_partition: more blocks than grid points along an axis");
  const auto sx = detail::block_starts(grid.nx, px);
  const auto sy = detail::block_starts(grid.ny, py);
  std::vector<std::size_t> owner(grid.size());
  std::size_t by = 0;
  for (std::size_t j = 0; j < grid.ny; ++j) {
    while (j >= sy[by + 1])
      ++by;
    std::size_t bx = 0;
    for (std::size_t i = 0; i < grid.nx; ++i) {
      while (i >= sx[bx + 1])
        ++bx;
      owner[grid.index(i, j)] = by * px + bx;
    }
  }
  return Partition::from_owner(std::move(owner), px * py, PartitionSource::cartesian);
}

namespace detail {

template <Scalar T>
std::vector<std::vector<std::size_t>> adjacency_lists(const CsrMatrix<T>& A)
{
  const auto S = A.symmetrized_pattern();
  std::vector<std::vector<std::size_t>> adj(S.nrows());
  for (std::size_t i = 0; i < S.nrows(); ++i)
    for (auto j : S.row_cols(i))
      if (j != i)
        adj[i].push_back(j);
  return adj;
}

inline std::vector<std::size_t> bfs_levels(const std::vector<std::vector<std::size_t>>& adj, std::size_t start)
{
  std::vector<std::size_t> level(adj.size(), no_dof);
  std::deque<std::size_t> q{start};
  level[start] = 0;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (auto v : adj[u])
      if (level[v] == no_dof) {
        level[v] = level[u] + 1;
        q.push_back(v);
      }
  }
  return level;
}

} // namespace detail

/// Breadth-first region growing into N regions of balanced size (sizes differ by at most one).
///
/// The first region grows from a pseudo-peripheral node reached from a seed-chosen start; each later
/// region starts from the unassigned node closest (in BFS distance from the first start) to the
/// assigned ones. Regions are relabeled by their smallest node index.
template <Scalar T>
Partition greedy_graph_partition(const CsrMatrix<T>& A, std::size_t n_parts, std::uint64_t seed = 0)
{
  const std::size_t n = A.nrows();
  if (A.ncols() != n)
    throw DimensionMismatch("greedy_graph_partition: matrix not square");
  if (n_parts == 0 || n_parts > n)
    throw InvalidArgument("greedy_graph_partition: need 1 <= N <= number of unknowns");
  const auto adj = detail::adjacency_lists(A);

  std::mt19937_64 rng(seed);
  std::size_t start = seed == 0 ? 0 : static_cast<std::size_t>(rng() % n);
  {
    const auto lvl = detail::bfs_levels(adj, start);
    std::size_t far = start;
    for (std::size_t v = 0; v < n; ++v)
      if (lvl[v] != no_dof && lvl[v] > lvl[far])
        far = v;
    start = far;
  }
  const auto dist = detail::bfs_levels(adj, start);

  std::vector<std::size_t> owner(n, no_dof);
  for (std::size_t part = 0; part < n_parts; ++part) {
    const std::size_t target = n / n_parts + (part < n % n_parts ? 1 : 0);
    std::size_t count = 0;
    std::deque<std::size_t> q;
    while (count < target) {
      if (q.empty()) {
        // next seed: unassigned node with smallest distance from the global start, then index
        std::size_t best = no_dof;
        for (std::size_t v = 0; v < n; ++v) {
          if (owner[v] != no_dof)
            continue;
          if (best == no_dof || dist[v] < dist[best])
            best = v;
        }
        q.push_back(best);
        owner[best] = part;
        ++count;
        continue;
      }
      const auto u = q.front();
      q.pop_front();
      for (auto v : adj[u]) {
        if (count == target)
          break;
        if (owner[v] == no_dof) {
          owner[v] = part;
          ++count;
          q.push_back(v);
        }
      }
    }
  }

  // relabel by smallest member
  std::vector<std::size_t> first(n_parts, no_dof);
  for (std::size_t v = 0; v < n; ++v)
    if (first[owner[v]] == no_dof)
      first[owner[v]] = v;
  std::vector<std::size_t> order(n_parts);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return first[a] < first[b]; });
  std::vector<std::size_t> relabel(n_parts);
  for (std::size_t k = 0; k < n_parts; ++k)
    relabel[order[k]] = k;
  for (auto& o : owner)
    o = relabel[o];
  return Partition::from_owner(std::move(owner), n_parts, PartitionSource::greedy_graph);
}

/// Node coordinates and mesh size used for subdomain diameters and overlap widths.
struct Geometry {
  std::vector<Point2> coords;
  double h = 1.0;
};

template <Scalar T>
Geometry geometry_of(const AssembledSystem<T>& sys)
{
  return {sys.dof_coords, sys.h};
}

/// Overlapping subdomains with restriction sets, partition of unity and interaction data.
struct Decomposition {
  std::size_t n_dofs = 0;
  std::size_t overlap = 0;
  PuKind pu = PuKind::multiplicity;
  std::vector<std::vector<std::size_t>> cores;        ///< disjoint cores N_i
  std::vector<std::vector<std::size_t>> sets;         ///< overlapped sets N_i^delta, sorted
  std::vector<std::vector<double>> weights;           ///< diagonal of D_i, per local unknown
  std::vector<std::size_t> multiplicity;              ///< m_j: number of sets containing unknown j
  std::vector<double> diameter;                       ///< H_i (bounding-box diagonal)
  std::vector<double> overlap_width;                  ///< delta_i = overlap * h
  std::vector<std::vector<std::size_t>> adjacency;    ///< subdomain interaction graph
  std::vector<std::size_t> color;
  std::size_t n_colors = 0;                           ///< N_c
  std::size_t max_multiplicity = 0;                   ///< M_c = k_0

  std::size_t size() const { return sets.size(); }

  template <Scalar T>
  Vector<T> restrict_to(std::size_t i, const Vector<T>& x) const
  {
    require_same_size(x.size(), n_dofs, "restrict");
    const auto& s = sets[i];
    Vector<T> y(s.size());
    for (std::size_t k = 0; k < s.size(); ++k)
      y[k] = x[s[k]];
    return y;
  }

  /// x += R_i^T y
  template <Scalar T>
  void prolong_add(std::size_t i, const Vector<T>& y, Vector<T>& x) const
  {
    const auto& s = sets[i];
    require_same_size(y.size(), s.size(), "prolong");
    for (std::size_t k = 0; k < s.size(); ++k)
      x[s[k]] += y[k];
  }

  /// Diagonal of sum_i R_i^T D_i R_i (the off-diagonal part is zero by construction).
  std::vector<double> pu_sum() const
  {
    std::vector<double> s(n_dofs, 0.0);
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t k = 0; k < sets[i].size(); ++k)
        s[sets[i][k]] += weights[i][k];
    return s;
  }

  /// max_j |(sum_i R_i^T D_i R_i)_jj - 1|
  double pu_defect() const
  {
    double m = 0.0;
    for (auto v : pu_sum())
      m = std::max(m, std::abs(v - 1.0));
    return m;
  }
};

/// (D_i)_{local(j)} = 1 / m_j
inline void multiplicity_pu(Decomposition& dec)
{
  dec.weights.assign(dec.sets.size(), {});
  for (std::size_t i = 0; i < dec.sets.size(); ++i) {
    dec.weights[i].resize(dec.sets[i].size());
    for (std::size_t k = 0; k < dec.sets[i].size(); ++k)
      dec.weights[i][k] = 1.0 / static_cast<double>(dec.multiplicity[dec.sets[i][k]]);
  }
  dec.pu = PuKind::multiplicity;
}

/// Each unknown gets weight 1 in the lowest-index subdomain containing it, 0 elsewhere.
inline void boolean_pu(Decomposition& dec)
{
  std::vector<std::size_t> first(dec.n_dofs, no_dof);
  for (std::size_t i = 0; i < dec.sets.size(); ++i)
    for (auto j : dec.sets[i])
      if (first[j] == no_dof)
        first[j] = i;
  dec.weights.assign(dec.sets.size(), {});
  for (std::size_t i = 0; i < dec.sets.size(); ++i) {
    dec.weights[i].resize(dec.sets[i].size());
    for (std::size_t k = 0; k < dec.sets[i].size(); ++k)
      dec.weights[i][k] = first[dec.sets[i][k]] == i ? 1.0 : 0.0;
  }
  dec.pu = PuKind::boolean;
}

inline void apply_pu(Decomposition& dec, PuKind kind)
{
  if (kind == PuKind::multiplicity)
    multiplicity_pu(dec);
  else
    boolean_pu(dec);
}

/// Grows each core by `delta` layers of matrix-graph neighbours and builds the derived data.
/// The partition of unity is initialized to multiplicity scaling.
template <Scalar T>
Decomposition expand_overlap(const CsrMatrix<T>& A, const Partition& partition, std::size_t delta,
                             const Geometry* geometry = nullptr)
{
  const std::size_t n = A.nrows();
  if (partition.n_dofs != n)
    throw DimensionMismatch("expand_overlap: partition does not match matrix size");
  if (geometry && geometry->coords.size() != n)
    throw DimensionMismatch("expand_overlap: geometry does not match matrix size");
  const auto S = A.symmetrized_pattern();

  Decomposition dec;
  dec.n_dofs = n;
  dec.overlap = delta;
  dec.cores = partition.cores;
  const std::size_t N = partition.size();
  dec.sets.resize(N);
  std::vector<std::size_t> mark(n, no_dof);
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<std::size_t> current = partition.cores[i];
    for (auto d : current)
      mark[d] = i;
    std::vector<std::size_t> frontier = current;
    for (std::size_t layer = 0; layer < delta; ++layer) {
      std::vector<std::size_t> next;
      for (auto k : frontier)
        for (auto j : S.row_cols(k))
          if (mark[j] != i) {
            mark[j] = i;
            next.push_back(j);
          }
      current.insert(current.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
    std::sort(current.begin(), current.end());
    dec.sets[i] = std::move(current);
  }

  dec.multiplicity.assign(n, 0);
  for (const auto& s : dec.sets)
    for (auto j : s)
      ++dec.multiplicity[j];
  dec.max_multiplicity = *std::max_element(dec.multiplicity.begin(), dec.multiplicity.end());

  // subdomains l, k interact iff R_l A R_k^T has a structural nonzero
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < N; ++i)
    for (auto j : dec.sets[i])
      members[j].push_back(i);
  dec.adjacency.assign(N, {});
  std::vector<std::size_t> seen(N, no_dof);
  for (std::size_t l = 0; l < N; ++l) {
    seen[l] = l;
    for (auto a : dec.sets[l])
      for (auto b : S.row_cols(a))
        for (auto k : members[b])
          if (seen[k] != l) {
            seen[k] = l;
            dec.adjacency[l].push_back(k);
          }
    std::sort(dec.adjacency[l].begin(), dec.adjacency[l].end());
  }

  // first-fit coloring in ascending subdomain order
  dec.color.assign(N, no_dof);
  dec.n_colors = 0;
  for (std::size_t l = 0; l < N; ++l) {
    std::vector<bool> used(dec.n_colors + 1, false);
    for (auto k : dec.adjacency[l])
      if (dec.color[k] != no_dof)
        used[dec.color[k]] = true;
    std::size_t c = 0;
    while (used[c])
      ++c;
    dec.color[l] = c;
    dec.n_colors = std::max(dec.n_colors, c + 1);
  }

  dec.diameter.assign(N, 0.0);
  dec.overlap_width.assign(N, 0.0);
  if (geometry) {
    for (std::size_t i = 0; i < N; ++i) {
      double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
      for (auto j : dec.sets[i])
        for (int c = 0; c < 2; ++c) {
          lo[c] = std::min(lo[c], geometry->coords[j][c]);
          hi[c] = std::max(hi[c], geometry->coords[j][c]);
        }
      dec.diameter[i] = std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
      dec.overlap_width[i] = static_cast<double>(delta) * geometry->h;
    }
  }
  multiplicity_pu(dec);
  return dec;
}

} // namespace ddm
