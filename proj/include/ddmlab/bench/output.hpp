#pragma once

// On-disk artifacts for runs and suites: JSON record, CSV residual history / spectrum, markdown summary.

#include <ddmlab/analysis.hpp>
#include <ddmlab/bench/scenario.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace ddm::bench {

namespace fs = std::filesystem;

namespace detail {

inline std::ofstream open_out(const fs::path& p)
{
  std::ofstream out(p);
  if (!out)
    throw Error("cannot write " + p.string());
  return out;
}

inline std::string fmt(double v, int digits = 4)
{
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

} // namespace detail

inline std::string run_summary_markdown(const RunRecord& r)
{
  std::ostringstream md;
  const auto& t = r.timings;
  md << "# " << r.scenario.name << "\n\n";
  md << "- hash: `" << r.hash << "`\n";
  md << "- unknowns: " << r.n_dofs << "\n";
  md << "- subdomains: " << r.payload["decomposition"]["n_subdomains"].get<std::size_t>() << ", overlap "
     << r.scenario.overlap << ", " << to_string(r.scenario.schwarz_method) << "\n";
  md << "- coarse space: " << to_string(r.scenario.coarse.kind) << " (" << r.coarse_size << " vectors"
     << (r.coarse_fallback ? ", Nicolaides fallback" : "") << "), correction "
     << r.payload["coarse"]["combinator"].get<std::string>() << "\n";
  md << "- solver: " << to_string(r.scenario.solver.ksp) << " " << (r.report.converged ? "converged" : "did not converge")
     << " in " << r.report.iterations << " iterations, relative residual " << detail::fmt(r.report.final_relative_residual)
     << "\n";
  if (r.spectrum) {
    md << "- spectrum: lambda in [" << detail::fmt(r.spectrum->lambda_min) << ", " << detail::fmt(r.spectrum->lambda_max)
       << "]";
    if (r.spectrum->hermitian_path)
      md << ", kappa " << detail::fmt(r.spectrum->kappa);
    md << "\n";
    for (const auto& b : r.spectrum->bounds)
      md << "- bound " << b.name << ": measured " << detail::fmt(b.measured, 6) << " vs " << detail::fmt(b.bound, 6)
         << (b.satisfied ? " (holds)" : " (VIOLATED)") << "\n";
  }
  md << "\n| phase | seconds | calls |\n|---|---|---|\n";
  md << "| decomposition | " << detail::fmt(t.decomposition) << " | |\n";
  md << "| local factorization | " << detail::fmt(t.local_factorization) << " | |\n";
  md << "| coarse assembly+factorization | " << detail::fmt(t.coarse_setup) << " | |\n";
  md << "| Krylov | " << detail::fmt(t.krylov) << " | |\n";
  md << "| matvec | " << detail::fmt(t.matvec) << " | " << t.matvec_calls << " |\n";
  md << "| preconditioner | " << detail::fmt(t.preconditioner) << " | " << t.preconditioner_calls << " |\n";
  md << "| coarse solve | " << detail::fmt(t.coarse_solve) << " | " << t.coarse_solve_calls << " |\n";
  return md.str();
}

/// Writes out_root/<hash>/{record.json, residuals.csv, summary.md, decomposition.json[, spectrum.csv]}.
inline fs::path write_run(const RunRecord& r, const fs::path& out_root)
{
  const fs::path dir = out_root / r.hash;
  fs::create_directories(dir);
  detail::open_out(dir / "record.json") << r.payload.dump(2) << '\n';
  detail::open_out(dir / "decomposition.json") << r.decomposition.dump() << '\n';
  {
    auto out = detail::open_out(dir / "residuals.csv");
    out << "iteration,residual\n" << std::setprecision(17);
    for (std::size_t k = 0; k < r.report.residual_history.size(); ++k)
      out << k << ',' << r.report.residual_history[k] << '\n';
  }
  if (r.spectrum && r.scenario.analysis.spectrum) {
    auto out = detail::open_out(dir / "spectrum.csv");
    write_spectrum_csv(out, r.spectrum->eigenvalues);
  }
  detail::open_out(dir / "summary.md") << run_summary_markdown(r);
  return dir;
}

} // namespace ddm::bench
