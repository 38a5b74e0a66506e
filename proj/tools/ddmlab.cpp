#include <ddmlab/bench/overrides.hpp>
#include <ddmlab/bench/suite.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace ddm::bench;

void add_override_flags(CLI::App* cmd, Overrides& o)
{
  cmd->add_option("--partitioner", o.partitioner, "cartesian | greedy_graph");
  cmd->add_option("--overlap", o.overlap, "overlap layers per side");
  cmd->add_option("--schwarz-method", o.schwarz_method, "asm | ras | oras | soras | none");
  cmd->add_option("--coarse", o.coarse, "none | nicolaides | geneo | grid");
  cmd->add_option("--geneo-threshold", o.geneo_threshold, "GenEO threshold tau, or auto");
  cmd->add_option("--coarse-correction", o.coarse_correction, "AD | BNN | ADEF1 | ADEF2 | RBNN1 | RBNN2 | none");
  cmd->add_option("--ksp", o.ksp, "cg | pcg | gmres");
  cmd->add_option("--ksp-rtol", o.ksp_rtol, "relative residual tolerance");
  cmd->add_option("--ksp-maxit", o.ksp_maxit, "iteration limit");
  cmd->add_option("--pc-side", o.pc_side, "left | right | none");
}

int run_one(const std::string& path, const Overrides& o, const std::string& out_root, bool print_spectrum)
{
  auto cfg = load_json_file(path);
  o.apply(cfg);
  const auto scenario = scenario_from_json(cfg);
  const auto rec = run_scenario(scenario);
  const auto dir = write_run(rec, out_root);
  std::cout << run_summary_markdown(rec);
  if (print_spectrum && rec.spectrum)
    std::cout << "\nspectrum: " << rec.spectrum->eigenvalues.size() << " eigenvalues written to "
              << (dir / "spectrum.csv").string() << "\n";
  std::cout << "\nwrote " << dir.string() << "\n";
  return rec.report.converged ? 0 : 2;
}

int run_suite_file(const std::string& path, const Overrides& o, const std::string& out_root)
{
  auto j = load_json_file(path);
  if (j.contains("base"))
    o.apply(j["base"]);
  const auto suite = suite_from_json(j);
  const auto result = run_suite(suite, std::filesystem::path(out_root));
  const auto dir = write_suite(result, out_root);
  std::cout << suite_markdown(result) << "\nwrote " << dir.string() << "\n";
  for (const auto& c : result.cells)
    if (!c.error.empty())
      return 2;
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"ddmlab: overlapping Schwarz preconditioners, coarse spaces and Krylov solvers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_root = "out";
  app.add_option("--out", out_root, "output root; each run lands in <out>/<hash>/")->capture_default_str();

  Overrides run_o, suite_o, spec_o;
  std::string run_path, suite_path, spec_path;
  auto* run = app.add_subcommand("run", "solve one scenario");
  run->add_option("config", run_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  add_override_flags(run, run_o);
  auto* suite = app.add_subcommand("suite", "run a parameter sweep and write a comparison table");
  suite->add_option("suite", suite_path, "suite JSON")->required()->check(CLI::ExistingFile);
  add_override_flags(suite, suite_o);
  auto* spec = app.add_subcommand("spectrum", "solve one scenario and write the preconditioned spectrum");
  spec->add_option("config", spec_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  add_override_flags(spec, spec_o);
  spec_o.force_spectrum = true;

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run)
      return run_one(run_path, run_o, out_root, false);
    if (*suite)
      return run_suite_file(suite_path, suite_o, out_root);
    return run_one(spec_path, spec_o, out_root, true);
  } catch (const std::exception& e) {
    std::cerr << "ddmlab: " << e.what() << "\n";
    return 1;
  }
}
