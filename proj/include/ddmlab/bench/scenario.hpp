#pragma once

// Runs one scenario end to end and collects a reproducible record.

#include <ddmlab/analysis.hpp>
#include <ddmlab/bench/config.hpp>
#include <ddmlab/coarse.hpp>
#include <ddmlab/krylov.hpp>
#include <ddmlab/schwarz.hpp>

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace ddm::bench {

/// Timing buckets, in seconds, plus call counters for the operator applications.
struct Timings {
  double decomposition = 0.0;
  double local_factorization = 0.0;
  double coarse_setup = 0.0;
  double krylov = 0.0;
  double matvec = 0.0;
  double preconditioner = 0.0;
  double coarse_solve = 0.0;
  std::size_t matvec_calls = 0;
  std::size_t preconditioner_calls = 0;
  std::size_t coarse_solve_calls = 0;

  json to_json() const
  {
    return {{"decomposition", decomposition},
            {"local_factorization", local_factorization},
            {"coarse_assembly_factorization", coarse_setup},
            {"krylov", krylov},
            {"matvec", matvec},
            {"preconditioner", preconditioner},
            {"coarse_solve", coarse_solve},
            {"matvec_calls", matvec_calls},
            {"preconditioner_calls", preconditioner_calls},
            {"coarse_solve_calls", coarse_solve_calls}};
  }
};

struct RunRecord {
  std::string hash;
  Scenario scenario;
  SolveReport report;
  Timings timings;
  std::size_t n_dofs = 0;
  std::size_t coarse_size = 0;
  bool coarse_fallback = false;
  std::optional<SpectrumReport> spectrum;
  std::vector<double> energy_errors;
  json decomposition; ///< per-subdomain sets, weights, neighbours and colors
  json payload;       ///< full record as written to disk

  /// The payload without wall-clock timings; identical across reruns of one scenario.
  json deterministic_payload() const
  {
    json p = payload;
    p.erase("timings");
    p.erase("machine");
    return p;
  }
};

namespace detail {

class Stopwatch {
public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
  std::chrono::steady_clock::time_point t0_;
};

template <Scalar T>
LinearMap<T> timed(LinearMap<T> f, double& bucket, std::size_t& calls)
{
  return [f = std::move(f), &bucket, &calls](const Vector<T>& x) {
    Stopwatch w;
    auto y = f(x);
    bucket += w.seconds();
    ++calls;
    return y;
  };
}

inline ScalarField coefficient_field(const CoefficientSpec& c, std::size_t cells_x, std::size_t cells_y)
{
  if (c.type == "halves")
    return [c](double x, double) { return x < 0.5 ? c.value : c.value * c.contrast; };
  if (c.type == "channels") {
    // horizontal channels one cell away from the left and right boundary
    std::vector<bool> row_in(cells_y, false);
    for (std::size_t k = 0; k < c.count; ++k) {
      const auto center = static_cast<std::size_t>((static_cast<double>(k) + 0.5) * static_cast<double>(cells_y) /
                                                   static_cast<double>(c.count));
      for (std::size_t w = 0; w < c.width_cells && center + w < cells_y; ++w)
        row_in[center + w] = true;
    }
    return [c, row_in, cells_x, cells_y](double x, double y) {
      const auto i = static_cast<std::size_t>(x * static_cast<double>(cells_x));
      const auto j = static_cast<std::size_t>(y * static_cast<double>(cells_y));
      const bool in = j < cells_y && row_in[j] && i >= 1 && i + 2 <= cells_x;
      return in ? c.value * c.contrast : c.value;
    };
  }
  return [v = c.value](double, double) { return v; };
}

template <Scalar T>
AssembledSystem<T> build_system(const ProblemConfig& p)
{
  AssembledSystem<T> sys;
  if constexpr (is_complex_v<T>) {
    const auto grid = StructuredGrid::square(p.size[0], p.size[1]);
    const double k = p.refractive_index * p.omega;
    const double xi = p.absorption_k2 ? k * k : p.absorption.value_or(0.0);
    const double n = p.refractive_index;
    sys = helmholtz_2d(grid, p.omega, [n](double, double) { return n; }, xi, p.boundary);
  } else {
    switch (p.kind) {
    case ProblemKind::poisson_fd_1d: sys = poisson_1d(p.size[0]); break;
    case ProblemKind::poisson_fd_2d: sys = poisson_2d_fd(p.size[0], p.size[1]); break;
    case ProblemKind::diffusion_fem_2d: {
      const auto mesh = TriMesh::unit_square(p.size[0], p.size[1]);
      const auto alpha = element_coefficients(mesh, coefficient_field(p.coefficient, p.size[0], p.size[1]));
      sys = diffusion_fem_2d(mesh, alpha);
      break;
    }
    case ProblemKind::helmholtz_2d: throw ConfigError("helmholtz_2d requires complex scalars");
    }
  }
  if (p.rhs == "random") {
    std::mt19937_64 rng(p.rhs_seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : sys.F)
      v = T(u(rng));
  }
  return sys;
}

template <Scalar T>
std::vector<T> robin_coefficients(const Scenario& s, const AssembledSystem<T>& sys)
{
  if (s.robin_parameter)
    return {T(*s.robin_parameter)};
  if constexpr (is_complex_v<T>) {
    std::vector<T> p;
    p.reserve(sys.size());
    for (double k : sys.wavenumber)
      p.emplace_back(0.0, -k);
    return p;
  } else {
    return {T(1.0 / sys.h)};
  }
}

inline json decomposition_json(const Decomposition& dec)
{
  json subs = json::array();
  for (std::size_t i = 0; i < dec.size(); ++i)
    subs.push_back({{"core", dec.cores[i]},
                    {"set", dec.sets[i]},
                    {"weights", dec.weights[i]},
                    {"neighbours", dec.adjacency[i]},
                    {"color", dec.color[i]},
                    {"diameter", dec.diameter[i]},
                    {"overlap_width", dec.overlap_width[i]}});
  return {{"n_dofs", dec.n_dofs},
          {"overlap", dec.overlap},
          {"pu", to_string(dec.pu)},
          {"n_subdomains", dec.size()},
          {"n_colors", dec.n_colors},
          {"max_multiplicity", dec.max_multiplicity},
          {"multiplicity", dec.multiplicity},
          {"subdomains", subs}};
}

inline json bound_json(const BoundRecord& b)
{
  return {{"name", b.name}, {"bound", b.bound}, {"measured", b.measured}, {"satisfied", b.satisfied}};
}

inline json machine_json()
{
  return {{"compiler", __VERSION__}, {"cxx_standard", __cplusplus}, {"hardware_threads", std::thread::hardware_concurrency()}};
}

template <Scalar T>
RunRecord run_impl(const Scenario& s)
{
  RunRecord rec;
  rec.scenario = s;
  rec.hash = scenario_hash(s);
  auto& tm = rec.timings;

  const auto sys = build_system<T>(s.problem);
  rec.n_dofs = sys.size();

  Stopwatch w_dec;
  const auto partition = s.partition.kind == PartitionSource::cartesian
                           ? cartesian_partition(sys.grid, s.partition.px, s.partition.py)
                           : greedy_graph_partition(sys.A, s.partition.n, s.partition.seed);
  const auto geo = geometry_of(sys);
  auto dec_mut = expand_overlap(sys.A, partition, s.overlap, &geo);
  apply_pu(dec_mut, s.pu);
  const auto dec = std::make_shared<const Decomposition>(std::move(dec_mut));
  tm.decomposition = w_dec.seconds();
  rec.decomposition = decomposition_json(*dec);

  Stopwatch w_fac;
  const auto robin = uses_robin(s.schwarz_method)
                       ? LocalOperatorKind<T>{true, robin_coefficients(s, sys), sys.interface_mass_scale}
                       : LocalOperatorKind<T>::dirichlet();
  const auto M1 = OneLevelPreconditioner<T>::build(sys.A, dec, s.schwarz_method, robin, sys.on_boundary);
  tm.local_factorization = w_fac.seconds();

  const LinearMap<T> A_raw = [&A = sys.A](const Vector<T>& x) { return A.multiply(x); };
  const auto A_timed = timed<T>(A_raw, tm.matvec, tm.matvec_calls);

  Stopwatch w_coarse;
  std::shared_ptr<const CoarseSpace<T>> coarse;
  json coarse_info = {{"kind", to_string(s.coarse.kind)}};
  switch (s.coarse.kind) {
  case CoarseKind::none:
  case CoarseKind::custom: break;
  case CoarseKind::nicolaides: coarse = std::make_shared<const CoarseSpace<T>>(nicolaides_space(sys.A, *dec)); break;
  case CoarseKind::grid:
    coarse = std::make_shared<const CoarseSpace<T>>(grid_space(sys.A, sys.grid, s.coarse.coarse_ratio));
    break;
  case CoarseKind::geneo: {
    const double tau = s.coarse.geneo_threshold ? *s.coarse.geneo_threshold : geneo_tau_auto(*dec);
    coarse_info["tau"] = tau;
    try {
      coarse = std::make_shared<const CoarseSpace<T>>(geneo_space(sys, *dec, tau));
      coarse_info["modes_per_subdomain"] = coarse->modes_per_subdomain;
    } catch (const EmptyCoarseSpace&) {
      if (!s.coarse.fallback_nicolaides)
        throw;
      coarse = std::make_shared<const CoarseSpace<T>>(nicolaides_space(sys.A, *dec));
      rec.coarse_fallback = true;
    }
    break;
  }
  }
  tm.coarse_setup = w_coarse.seconds();
  rec.coarse_size = coarse ? coarse->size() : 0;
  coarse_info["size"] = rec.coarse_size;
  coarse_info["fallback_nicolaides"] = rec.coarse_fallback;
  const Combinator combinator = coarse ? s.coarse_correction : Combinator::none;
  coarse_info["combinator"] = to_string(combinator);

  // untimed maps feed the dense analysis
  const LinearMap<T> M1_raw = M1.as_map();
  std::optional<TwoLevelPreconditioner<T>> M2_raw;
  if (coarse)
    M2_raw.emplace(A_raw, M1_raw, coarse, combinator);
  const LinearMap<T> M_raw = M2_raw ? M2_raw->as_map() : M1_raw;

  std::optional<TwoLevelPreconditioner<T>> M2_timed;
  double one_level_time = 0.0;
  std::size_t one_level_calls = 0;
  LinearMap<T> M_timed;
  if (coarse) {
    M2_timed.emplace(A_timed, timed<T>(M1_raw, one_level_time, one_level_calls), coarse, combinator);
    M2_timed->set_coarse_map(timed<T>([coarse](const Vector<T>& r) { return coarse->solve(r); }, tm.coarse_solve,
                                      tm.coarse_solve_calls));
    M_timed = timed<T>(M2_timed->as_map(), tm.preconditioner, tm.preconditioner_calls);
  } else {
    M_timed = timed<T>(M1_raw, tm.preconditioner, tm.preconditioner_calls);
  }

  Vector<T> exact;
  const bool want_errors = s.analysis.energy_errors && rec.n_dofs <= dense_analysis_limit;
  if (want_errors)
    exact = auto_factor(sys.A.to_dense()).solve(sys.F);
  std::vector<Vector<T>> iterates;
  IterateObserver<T> observe;
  if (want_errors)
    observe = [&iterates](std::size_t, const Vector<T>& x) { iterates.push_back(x); };

  const Vector<T> x0(sys.size(), T{});
  Stopwatch w_ksp;
  SolveResult<T> result;
  switch (s.solver.ksp) {
  case KspKind::cg: result = cg<T>(A_timed, sys.F, x0, s.solver.rtol, s.solver.maxit, observe); break;
  case KspKind::pcg: result = pcg<T>(A_timed, sys.F, M_timed, x0, s.solver.rtol, s.solver.maxit, observe); break;
  case KspKind::gmres:
    result = gmres<T>(A_timed, sys.F, M_timed, s.solver.pc_side, x0, s.solver.rtol, s.solver.maxit, observe);
    break;
  }
  tm.krylov = w_ksp.seconds();
  rec.report = result.report;
  rec.report.timings = {{"decomposition", tm.decomposition},  {"local_factorization", tm.local_factorization},
                        {"coarse_setup", tm.coarse_setup},    {"krylov", tm.krylov},
                        {"matvec", tm.matvec},                {"preconditioner", tm.preconditioner},
                        {"coarse_solve", tm.coarse_solve}};

  json analysis = json::object();
  const bool want_spectrum = (s.analysis.spectrum || s.analysis.bounds || want_errors) && rec.n_dofs <= dense_analysis_limit;
  if ((s.analysis.spectrum || s.analysis.bounds) && rec.n_dofs > dense_analysis_limit)
    analysis["skipped"] = "n exceeds the dense analysis limit";
  if (want_spectrum) {
    const LinearMap<T> M_for_spectrum = s.solver.ksp == KspKind::cg ? LinearMap<T>([](const Vector<T>& v) { return v; })
                                                                      : M_raw;
    auto spec = preconditioned_spectrum(sys.A, M_for_spectrum);
    if (s.analysis.bounds) {
      const bool pure_one_level = !coarse && s.solver.ksp != KspKind::cg;
      if (pure_one_level && s.schwarz_method == SchwarzMethod::ASM)
        spec.bounds.push_back(coloring_bound_check(spec, *dec));
      if (coarse && s.coarse.kind == CoarseKind::geneo && !rec.coarse_fallback &&
          s.schwarz_method == SchwarzMethod::ASM && combinator == Combinator::AD)
        spec.bounds.push_back(geneo_bound_check(spec, dec->max_multiplicity, coarse->tau));
      if constexpr (!is_complex_v<T>) {
        if (pure_one_level && sys.is_fem() && s.schwarz_method == SchwarzMethod::ASM) {
          const auto c = fsl_constants(sys.A, *dec, neumann_matrices(sys, *dec), {});
          spec.bounds.push_back(fsl_lower_check(spec, c));
          analysis["tau1"] = c.tau1;
        }
        if (pure_one_level && s.schwarz_method == SchwarzMethod::SORAS) {
          std::vector<DenseMatrix<T>> B;
          for (const auto& op : M1.local_operators())
            B.push_back(op.matrix);
          const auto c = fsl_constants(sys.A, *dec, {}, B);
          spec.bounds.push_back(fsl_upper_check(spec, c));
          analysis["gamma1"] = c.gamma1;
        }
      }
    }
    json eig = json::array();
    if (s.analysis.spectrum)
      for (auto z : spec.eigenvalues)
        eig.push_back({z.real(), z.imag()});
    analysis["eigenvalues"] = eig;
    analysis["lambda_min"] = spec.lambda_min;
    analysis["lambda_max"] = spec.lambda_max;
    analysis["hermitian_path"] = spec.hermitian_path;
    analysis["kappa"] = std::isfinite(spec.kappa) ? json(spec.kappa) : json(nullptr);
    rec.spectrum = std::move(spec);
  }
  if (want_errors) {
    rec.energy_errors = energy_errors(sys.A, exact, iterates);
    analysis["energy_errors"] = rec.energy_errors;
    if (rec.spectrum && rec.spectrum->hermitian_path && s.solver.ksp != KspKind::gmres) {
      const auto env = pcg_bound_envelope(rec.energy_errors, rec.spectrum->kappa);
      rec.spectrum->bounds.push_back(env);
    }
  }
  if (rec.spectrum) {
    json b = json::array();
    for (const auto& r : rec.spectrum->bounds)
      b.push_back(bound_json(r));
    analysis["bounds"] = b;
  }

  json solve = {{"iterations", rec.report.iterations},
                {"converged", rec.report.converged},
                {"diverged", rec.report.diverged},
                {"breakdown", rec.report.breakdown},
                {"rtol", rec.report.rtol},
                {"final_relative_residual", rec.report.final_relative_residual},
                {"residual_history", rec.report.residual_history},
                {"message", rec.report.message}};
  rec.payload = {{"hash", rec.hash},
                 {"config", to_json(s)},
                 {"n_dofs", rec.n_dofs},
                 {"solve", solve},
                 {"decomposition",
                  {{"n_subdomains", dec->size()},
                   {"n_colors", dec->n_colors},
                   {"max_multiplicity", dec->max_multiplicity},
                   {"pu_defect", dec->pu_defect()}}},
                 {"coarse", coarse_info},
                 {"analysis", analysis},
                 {"timings", tm.to_json()},
                 {"machine", machine_json()}};
  return rec;
}

} // namespace detail

/// decompose -> discretize -> schwarz -> coarse -> krylov -> analysis. Errors carry the scenario name.
inline RunRecord run_scenario(const Scenario& s)
{
  validate(s);
  try {
    if (s.problem.kind == ProblemKind::helmholtz_2d)
      return detail::run_impl<complex_t>(s);
    return detail::run_impl<double>(s);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error("scenario '" + s.name + "': " + e.what());
  }
}

} // namespace ddm::bench
