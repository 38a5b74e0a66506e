#pragma once

// Scenario configuration: versioned JSON schema, strict parsing, canonical serialization and hashing.

#include <ddmlab/coarse.hpp>
#include <ddmlab/decompose.hpp>
#include <ddmlab/discretize.hpp>
#include <ddmlab/krylov.hpp>
#include <ddmlab/schwarz.hpp>

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ddm::bench {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

namespace detail {

inline void require_object(const json& j, const std::string& where)
{
  if (!j.is_object())
    throw ConfigError(where + ": expected an object");
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
  require_object(j, where);
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class V>
V get_or(const json& j, const char* key, V fallback, const std::string& where)
{
  if (!j.contains(key))
    return fallback;
  try {
    return j.at(key).get<V>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

} // namespace detail

/// Diffusion coefficient layout on the unit square.
struct CoefficientSpec {
  std::string type = "constant"; ///< constant | channels | halves
  double value = 1.0;            ///< background value
  double contrast = 1.0;         ///< channel / right-half value relative to background
  std::size_t count = 1;         ///< channels: number of horizontal channels
  std::size_t width_cells = 1;   ///< channels: thickness in mesh cells

  bool operator==(const CoefficientSpec&) const = default;
};

struct ProblemConfig {
  ProblemKind kind = ProblemKind::diffusion_fem_2d;
  std::vector<std::size_t> size{40, 40}; ///< interior points (FD) or cells (FEM) per axis
  CoefficientSpec coefficient;
  double omega = 0.0;
  double refractive_index = 1.0;
  std::optional<double> absorption;      ///< unset with absorption_k2 = true means xi = k^2
  bool absorption_k2 = false;
  BoundaryKind boundary = BoundaryKind::dirichlet;
  std::string rhs = "ones";              ///< ones | random
  std::uint64_t rhs_seed = 0;

  bool operator==(const ProblemConfig&) const = default;
};

struct PartitionConfig {
  PartitionSource kind = PartitionSource::greedy_graph;
  std::size_t px = 2, py = 1; ///< cartesian
  std::size_t n = 4;          ///< greedy_graph
  std::uint64_t seed = 0;

  bool operator==(const PartitionConfig&) const = default;
};

struct CoarseConfig {
  CoarseKind kind = CoarseKind::none;
  std::optional<double> geneo_threshold; ///< unset means auto
  std::size_t coarse_ratio = 2;          ///< grid: H_coarse / h
  bool fallback_nicolaides = true;       ///< geneo: use Nicolaides when nothing is selected

  bool operator==(const CoarseConfig&) const = default;
};

struct SolverConfig {
  KspKind ksp = KspKind::gmres;
  double rtol = 1e-6;
  std::size_t maxit = 200;
  PcSide pc_side = PcSide::right;

  bool operator==(const SolverConfig&) const = default;
};

struct AnalysisConfig {
  bool spectrum = false;      ///< dense spectrum of the preconditioned operator
  bool bounds = false;        ///< coloring / GenEO / FSL bound records
  bool energy_errors = false; ///< energy-norm errors against a direct solve and the CG envelope

  bool operator==(const AnalysisConfig&) const = default;
};

struct Scenario {
  std::string name = "scenario";
  ProblemConfig problem;
  PartitionConfig partition;
  std::size_t overlap = 1;
  PuKind pu = PuKind::multiplicity;
  SchwarzMethod schwarz_method = SchwarzMethod::RAS;
  std::optional<double> robin_parameter; ///< unset: 1/h (real problems) or -i k(x) (Helmholtz)
  CoarseConfig coarse;
  Combinator coarse_correction = default_combinator;
  SolverConfig solver;
  AnalysisConfig analysis;

  bool operator==(const Scenario&) const = default;
};

inline ProblemKind parse_problem_kind(const std::string& s)
{
  for (auto k : {ProblemKind::poisson_fd_1d, ProblemKind::poisson_fd_2d, ProblemKind::diffusion_fem_2d,
                 ProblemKind::helmholtz_2d})
    if (to_string(k) == s)
      return k;
  throw ConfigError("unknown problem kind '" + s + "'");
}

inline BoundaryKind parse_boundary(const std::string& s)
{
  if (s == "dirichlet")
    return BoundaryKind::dirichlet;
  if (s == "impedance")
    return BoundaryKind::impedance;
  throw ConfigError("unknown boundary '" + s + "' (expected dirichlet|impedance)");
}

inline PartitionSource parse_partitioner(const std::string& s)
{
  if (s == "cartesian")
    return PartitionSource::cartesian;
  if (s == "greedy_graph")
    return PartitionSource::greedy_graph;
  throw ConfigError("unknown partitioner '" + s + "' (expected cartesian|greedy_graph)");
}

inline PuKind parse_pu(const std::string& s)
{
  if (s == "multiplicity")
    return PuKind::multiplicity;
  if (s == "boolean")
    return PuKind::boolean;
  throw ConfigError("unknown partition of unity '" + s + "' (expected multiplicity|boolean)");
}

/// Every field with its resolved value; keys are emitted sorted.
inline json to_json(const Scenario& s)
{
  const auto& p = s.problem;
  json coeff = {{"type", p.coefficient.type},
                {"value", p.coefficient.value},
                {"contrast", p.coefficient.contrast},
                {"count", p.coefficient.count},
                {"width_cells", p.coefficient.width_cells}};
  json problem = {{"kind", to_string(p.kind)},
                  {"size", p.size},
                  {"coefficient", coeff},
                  {"omega", p.omega},
                  {"refractive_index", p.refractive_index},
                  {"boundary", to_string(p.boundary)},
                  {"rhs", p.rhs},
                  {"rhs_seed", p.rhs_seed}};
  if (p.absorption_k2)
    problem["absorption"] = "k2";
  else if (p.absorption)
    problem["absorption"] = *p.absorption;
  else
    problem["absorption"] = nullptr;
  json partition = {{"kind", to_string(s.partition.kind)}, {"seed", s.partition.seed}};
  if (s.partition.kind == PartitionSource::cartesian) {
    partition["px"] = s.partition.px;
    partition["py"] = s.partition.py;
  } else {
    partition["n"] = s.partition.n;
  }
  json coarse = {{"kind", to_string(s.coarse.kind)},
                 {"coarse_ratio", s.coarse.coarse_ratio},
                 {"fallback", s.coarse.fallback_nicolaides ? "nicolaides" : "error"}};
  if (s.coarse.geneo_threshold)
    coarse["geneo_threshold"] = *s.coarse.geneo_threshold;
  else
    coarse["geneo_threshold"] = "auto";
  json out = {{"schema_version", schema_version},
              {"name", s.name},
              {"problem", problem},
              {"partition", partition},
              {"overlap", s.overlap},
              {"pu", to_string(s.pu)},
              {"schwarz_method", to_string(s.schwarz_method)},
              {"coarse", coarse},
              {"coarse_correction", to_string(s.coarse_correction)},
              {"solver",
               {{"ksp", to_string(s.solver.ksp)},
                {"rtol", s.solver.rtol},
                {"maxit", s.solver.maxit},
                {"pc_side", to_string(s.solver.pc_side)}}},
              {"analysis",
               {{"spectrum", s.analysis.spectrum},
                {"bounds", s.analysis.bounds},
                {"energy_errors", s.analysis.energy_errors}}}};
  if (s.robin_parameter)
    out["robin_parameter"] = *s.robin_parameter;
  else
    out["robin_parameter"] = "default";
  return out;
}

inline void validate(const Scenario& s)
{
  const auto& p = s.problem;
  const std::size_t dims = p.kind == ProblemKind::poisson_fd_1d ? 1 : 2;
  if (p.size.size() != dims)
    throw ConfigError("problem.size: expected " + std::to_string(dims) + " entries");
  for (auto n : p.size)
    if (n == 0)
      throw ConfigError("problem.size: entries must be positive");
  if (p.kind == ProblemKind::diffusion_fem_2d && (p.size[0] < 2 || p.size[1] < 2))
    throw ConfigError("problem.size: a finite-element mesh needs at least 2 cells per axis");
  if (p.coefficient.type != "constant" && p.coefficient.type != "channels" && p.coefficient.type != "halves")
    throw ConfigError("problem.coefficient.type: expected constant|channels|halves");
  if (!(p.coefficient.value > 0.0) || !(p.coefficient.contrast > 0.0))
    throw ConfigError("problem.coefficient: value and contrast must be positive");
  if (p.coefficient.type != "constant" && p.kind != ProblemKind::diffusion_fem_2d)
    throw ConfigError("problem.coefficient: heterogeneous coefficients need diffusion_fem_2d");
  if (p.kind == ProblemKind::helmholtz_2d) {
    if (!(p.omega >= 0.0) || !(p.refractive_index > 0.0))
      throw ConfigError("problem: omega must be nonnegative and refractive_index positive");
  } else if (p.omega != 0.0 || p.absorption_k2 || p.absorption.value_or(0.0) != 0.0 ||
             p.boundary != BoundaryKind::dirichlet) {
    throw ConfigError("problem: omega, absorption and impedance apply to helmholtz_2d only");
  }
  if (p.absorption && *p.absorption < 0.0)
    throw ConfigError("problem.absorption must be nonnegative");
  if (p.rhs != "ones" && p.rhs != "random")
    throw ConfigError("problem.rhs: expected ones|random");
  if (s.partition.kind == PartitionSource::cartesian) {
    if (s.partition.px == 0 || s.partition.py == 0)
      throw ConfigError("partition: px and py must be positive");
    if (dims == 1 && s.partition.py != 1)
      throw ConfigError("partition.py must be 1 for a one-dimensional problem");
  } else if (s.partition.n == 0) {
    throw ConfigError("partition.n must be positive");
  }
  if (s.coarse.kind == CoarseKind::geneo && p.kind != ProblemKind::diffusion_fem_2d)
    throw ConfigError("coarse: geneo needs the diffusion_fem_2d discretization (Neumann matrices)");
  if (s.coarse.kind == CoarseKind::grid && s.coarse.coarse_ratio == 0)
    throw ConfigError("coarse.coarse_ratio must be positive");
  if (s.coarse.kind == CoarseKind::grid && p.kind == ProblemKind::diffusion_fem_2d)
    throw ConfigError("coarse: grid coarse spaces are defined on finite-difference grids");
  if (s.coarse.geneo_threshold && !(*s.coarse.geneo_threshold > 0.0))
    throw ConfigError("coarse.geneo_threshold must be positive or \"auto\"");
  if (!(s.solver.rtol > 0.0))
    throw ConfigError("solver.rtol must be positive");
  if (p.kind == ProblemKind::helmholtz_2d && s.solver.ksp != KspKind::gmres)
    throw ConfigError("solver: Helmholtz systems are indefinite, use gmres");
}

inline Scenario scenario_from_json(const json& j)
{
  using detail::get_or;
  using detail::reject_unknown;
  reject_unknown(j,
                 {"schema_version", "name", "problem", "partition", "overlap", "pu", "schwarz_method", "robin_parameter",
                  "coarse", "coarse_correction", "solver", "analysis"},
                 "config");
  const int version = get_or<int>(j, "schema_version", -1, "config");
  if (version != schema_version)
    throw ConfigError("config.schema_version: expected " + std::to_string(schema_version));
  Scenario s;
  s.name = get_or<std::string>(j, "name", s.name, "config");
  try {
    if (j.contains("problem")) {
      const auto& p = j.at("problem");
      reject_unknown(p,
                     {"kind", "size", "coefficient", "omega", "refractive_index", "absorption", "boundary", "rhs",
                      "rhs_seed"},
                     "problem");
      if (p.contains("kind"))
        s.problem.kind = parse_problem_kind(p.at("kind").get<std::string>());
      if (s.problem.kind == ProblemKind::poisson_fd_1d)
        s.problem.size = {255};
      s.problem.size = get_or<std::vector<std::size_t>>(p, "size", s.problem.size, "problem");
      if (p.contains("coefficient")) {
        const auto& c = p.at("coefficient");
        reject_unknown(c, {"type", "value", "contrast", "count", "width_cells"}, "problem.coefficient");
        auto& cs = s.problem.coefficient;
        cs.type = get_or<std::string>(c, "type", cs.type, "problem.coefficient");
        cs.value = get_or<double>(c, "value", cs.value, "problem.coefficient");
        cs.contrast = get_or<double>(c, "contrast", cs.contrast, "problem.coefficient");
        cs.count = get_or<std::size_t>(c, "count", cs.count, "problem.coefficient");
        cs.width_cells = get_or<std::size_t>(c, "width_cells", cs.width_cells, "problem.coefficient");
      }
      s.problem.omega = get_or<double>(p, "omega", s.problem.omega, "problem");
      s.problem.refractive_index = get_or<double>(p, "refractive_index", s.problem.refractive_index, "problem");
      if (p.contains("absorption")) {
        const auto& a = p.at("absorption");
        if (a.is_null()) {
          s.problem.absorption.reset();
        } else if (a.is_string()) {
          if (a.get<std::string>() != "k2")
            throw ConfigError("problem.absorption: expected a number or \"k2\"");
          s.problem.absorption_k2 = true;
        } else {
          s.problem.absorption = a.get<double>();
        }
      }
      if (p.contains("boundary"))
        s.problem.boundary = parse_boundary(p.at("boundary").get<std::string>());
      s.problem.rhs = get_or<std::string>(p, "rhs", s.problem.rhs, "problem");
      s.problem.rhs_seed = get_or<std::uint64_t>(p, "rhs_seed", s.problem.rhs_seed, "problem");
    }
    if (j.contains("partition")) {
      const auto& p = j.at("partition");
      reject_unknown(p, {"kind", "px", "py", "n", "seed"}, "partition");
      if (p.contains("kind"))
        s.partition.kind = parse_partitioner(p.at("kind").get<std::string>());
      s.partition.px = get_or<std::size_t>(p, "px", s.partition.px, "partition");
      s.partition.py = get_or<std::size_t>(p, "py", s.partition.py, "partition");
      s.partition.n = get_or<std::size_t>(p, "n", s.partition.n, "partition");
      s.partition.seed = get_or<std::uint64_t>(p, "seed", s.partition.seed, "partition");
      if (s.problem.kind == ProblemKind::poisson_fd_1d && !p.contains("py"))
        s.partition.py = 1;
    }
    s.overlap = get_or<std::size_t>(j, "overlap", s.overlap, "config");
    if (j.contains("pu"))
      s.pu = parse_pu(j.at("pu").get<std::string>());
    if (j.contains("schwarz_method"))
      s.schwarz_method = parse_schwarz_method(j.at("schwarz_method").get<std::string>());
    if (j.contains("robin_parameter")) {
      const auto& r = j.at("robin_parameter");
      if (r.is_string()) {
        if (r.get<std::string>() != "default")
          throw ConfigError("robin_parameter: expected a number or \"default\"");
      } else {
        s.robin_parameter = r.get<double>();
      }
    }
    if (j.contains("coarse")) {
      const auto& c = j.at("coarse");
      reject_unknown(c, {"kind", "geneo_threshold", "coarse_ratio", "fallback"}, "coarse");
      if (c.contains("kind"))
        s.coarse.kind = parse_coarse_kind(c.at("kind").get<std::string>());
      if (c.contains("geneo_threshold")) {
        const auto& t = c.at("geneo_threshold");
        if (t.is_string()) {
          if (t.get<std::string>() != "auto")
            throw ConfigError("coarse.geneo_threshold: expected a number or \"auto\"");
          s.coarse.geneo_threshold.reset();
        } else {
          s.coarse.geneo_threshold = t.get<double>();
        }
      }
      s.coarse.coarse_ratio = get_or<std::size_t>(c, "coarse_ratio", s.coarse.coarse_ratio, "coarse");
      if (c.contains("fallback")) {
        const auto f = c.at("fallback").get<std::string>();
        if (f != "nicolaides" && f != "error")
          throw ConfigError("coarse.fallback: expected nicolaides|error");
        s.coarse.fallback_nicolaides = f == "nicolaides";
      }
    }
    if (j.contains("coarse_correction"))
      s.coarse_correction = parse_combinator(j.at("coarse_correction").get<std::string>());
    if (j.contains("solver")) {
      const auto& v = j.at("solver");
      reject_unknown(v, {"ksp", "rtol", "maxit", "pc_side"}, "solver");
      if (v.contains("ksp"))
        s.solver.ksp = parse_ksp(v.at("ksp").get<std::string>());
      s.solver.rtol = get_or<double>(v, "rtol", s.solver.rtol, "solver");
      s.solver.maxit = get_or<std::size_t>(v, "maxit", s.solver.maxit, "solver");
      if (v.contains("pc_side"))
        s.solver.pc_side = parse_pc_side(v.at("pc_side").get<std::string>());
    }
    if (j.contains("analysis")) {
      const auto& a = j.at("analysis");
      reject_unknown(a, {"spectrum", "bounds", "energy_errors"}, "analysis");
      s.analysis.spectrum = get_or<bool>(a, "spectrum", false, "analysis");
      s.analysis.bounds = get_or<bool>(a, "bounds", false, "analysis");
      s.analysis.energy_errors = get_or<bool>(a, "energy_errors", false, "analysis");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  validate(s);
  return s;
}

inline json load_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// 64-bit FNV-1a as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Hash of the canonical dump; keys are sorted so equal scenarios hash equally.
inline std::string scenario_hash(const Scenario& s) { return fnv1a_hex(to_json(s).dump()); }

} // namespace ddm::bench
