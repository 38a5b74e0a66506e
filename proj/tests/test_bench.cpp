#include "support.hpp"

#include <ddmlab/bench/overrides.hpp>
#include <ddmlab/bench/suite.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ddm;
using namespace ddm::bench;
namespace fs = std::filesystem;

namespace {

json small_config()
{
  return json::parse(R"({
    "schema_version": 1,
    "name": "small",
    "problem": {"kind": "poisson_fd_2d", "size": [12, 12]},
    "partition": {"kind": "cartesian", "px": 2, "py": 2},
    "overlap": 1,
    "schwarz_method": "asm",
    "coarse": {"kind": "nicolaides"},
    "coarse_correction": "AD",
    "solver": {"ksp": "pcg", "rtol": 1e-8, "maxit": 100},
    "analysis": {"spectrum": true, "bounds": true, "energy_errors": true}
  })");
}

fs::path fresh_dir(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / ("ddmlab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

} // namespace

TEST(Fnv1a, KnownVectors)
{
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, DefaultsRoundTrip)
{
  const Scenario s;
  EXPECT_EQ(scenario_from_json(to_json(s)), s);
}

TEST(Config, ShippedConfigsParseAndRoundTrip)
{
  std::size_t scenarios = 0, suites = 0;
  for (const auto& entry : fs::directory_iterator(DDMLAB_SOURCE_DIR "/configs")) {
    const auto j = load_json_file(entry.path().string());
    if (entry.path().filename().string().rfind("suite_", 0) == 0) {
      EXPECT_NO_THROW(suite_from_json(j)) << entry.path();
      ++suites;
    } else {
      const auto s = scenario_from_json(j);
      EXPECT_EQ(scenario_from_json(to_json(s)), s) << entry.path();
      ++scenarios;
    }
  }
  EXPECT_GE(scenarios, 1u);
  EXPECT_GE(suites, 1u);
}

TEST(Config, RoundTripNonDefaults)
{
  auto j = small_config();
  j["robin_parameter"] = 3.5;
  j["pu"] = "boolean";
  j["coarse"]["fallback"] = "error";
  const auto s = scenario_from_json(j);
  EXPECT_EQ(s.pu, PuKind::boolean);
  EXPECT_EQ(*s.robin_parameter, 3.5);
  EXPECT_FALSE(s.coarse.fallback_nicolaides);
  EXPECT_EQ(scenario_from_json(to_json(s)), s);
}

TEST(Config, UnknownKeysRejected)
{
  auto top = small_config();
  top["overlapp"] = 2;
  EXPECT_THROW(scenario_from_json(top), ConfigError);
  auto nested = small_config();
  nested["solver"]["tolerance"] = 1e-6;
  EXPECT_THROW(scenario_from_json(nested), ConfigError);
}

TEST(Config, SchemaVersionRequired)
{
  auto j = small_config();
  j["schema_version"] = 2;
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  j.erase("schema_version");
  EXPECT_THROW(scenario_from_json(j), ConfigError);
}

TEST(Config, InconsistentCombinationsRejected)
{
  auto geneo_fd = small_config();
  geneo_fd["coarse"]["kind"] = "geneo";
  EXPECT_THROW(scenario_from_json(geneo_fd), ConfigError);

  auto helm_pcg = small_config();
  helm_pcg["problem"] = {{"kind", "helmholtz_2d"}, {"size", {7, 7}}, {"omega", 5.0}};
  EXPECT_THROW(scenario_from_json(helm_pcg), ConfigError);

  auto absorbing_poisson = small_config();
  absorbing_poisson["problem"]["absorption"] = 1.0;
  EXPECT_THROW(scenario_from_json(absorbing_poisson), ConfigError);

  auto bad_enum = small_config();
  bad_enum["schwarz_method"] = "multiplicative";
  EXPECT_THROW(scenario_from_json(bad_enum), ConfigError);

  auto wrong_type = small_config();
  wrong_type["overlap"] = "two";
  EXPECT_THROW(scenario_from_json(wrong_type), ConfigError);
}

TEST(Config, HashIdentifiesScenario)
{
  const auto a = scenario_from_json(small_config());
  auto j = small_config();
  EXPECT_EQ(scenario_hash(a), scenario_hash(scenario_from_json(j)));
  j["overlap"] = 2;
  EXPECT_NE(scenario_hash(a), scenario_hash(scenario_from_json(j)));
  EXPECT_EQ(scenario_hash(a).size(), 16u);
}

TEST(Overrides, PatchMergesIntoConfig)
{
  Overrides o;
  o.overlap = 3;
  o.coarse = "none";
  o.ksp = "gmres";
  o.pc_side = "left";
  o.geneo_threshold = "auto";
  o.force_spectrum = true;
  auto j = small_config();
  o.apply(j);
  const auto s = scenario_from_json(j);
  EXPECT_EQ(s.overlap, 3u);
  EXPECT_EQ(s.coarse.kind, CoarseKind::none);
  EXPECT_EQ(s.solver.ksp, KspKind::gmres);
  EXPECT_EQ(s.solver.pc_side, PcSide::left);
  EXPECT_FALSE(s.coarse.geneo_threshold.has_value());
  EXPECT_TRUE(s.analysis.spectrum);
  EXPECT_EQ(s.solver.rtol, 1e-8); // untouched keys survive
}

TEST(Overrides, GeneoThresholdParsing)
{
  Overrides o;
  o.geneo_threshold = "0.25";
  EXPECT_EQ(o.patch()["coarse"]["geneo_threshold"].get<double>(), 0.25);
  o.geneo_threshold = "0.25x";
  EXPECT_THROW(o.patch(), ConfigError);
  o.geneo_threshold = "many";
  EXPECT_THROW(o.patch(), ConfigError);
}

TEST(Run, DeterministicApartFromTimings)
{
  const auto s = scenario_from_json(small_config());
  const auto a = run_scenario(s);
  const auto b = run_scenario(s);
  EXPECT_EQ(a.deterministic_payload(), b.deterministic_payload());
  EXPECT_EQ(a.hash, scenario_hash(s));
  EXPECT_TRUE(a.report.converged);
  EXPECT_EQ(a.coarse_size, 4u);
}

TEST(Run, BoundsRecorded)
{
  const auto rec = run_scenario(scenario_from_json(small_config()));
  ASSERT_TRUE(rec.spectrum.has_value());
  EXPECT_TRUE(rec.spectrum->hermitian_path);
  bool envelope = false;
  for (const auto& b : rec.spectrum->bounds)
    if (b.name == "pcg_envelope") {
      envelope = true;
      EXPECT_TRUE(b.satisfied);
    }
  EXPECT_TRUE(envelope);
  EXPECT_EQ(rec.energy_errors.size(), rec.report.iterations + 1);
}

TEST(Run, WritesArtifacts)
{
  const auto rec = run_scenario(scenario_from_json(small_config()));
  const auto root = fresh_dir("run");
  const auto dir = write_run(rec, root);
  EXPECT_EQ(dir.filename().string(), rec.hash);
  for (const char* f : {"record.json", "residuals.csv", "summary.md", "decomposition.json", "spectrum.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto record = load_json_file((dir / "record.json").string());
  EXPECT_EQ(record["hash"], rec.hash);
  EXPECT_EQ(scenario_from_json(record["config"]), rec.scenario);
  std::ifstream csv(dir / "residuals.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "iteration,residual");
  fs::remove_all(root);
}

TEST(Run, GeneoFallsBackToNicolaides)
{
  const auto j = json::parse(R"({
    "schema_version": 1,
    "problem": {"kind": "diffusion_fem_2d", "size": [8, 8]},
    "partition": {"kind": "cartesian", "px": 2, "py": 2},
    "overlap": 1,
    "schwarz_method": "asm",
    "coarse": {"kind": "geneo", "geneo_threshold": 1e-10},
    "solver": {"ksp": "pcg"}
  })");
  const auto rec = run_scenario(scenario_from_json(j));
  EXPECT_TRUE(rec.coarse_fallback);
  EXPECT_EQ(rec.coarse_size, 4u);
  auto strict = j;
  strict["coarse"]["fallback"] = "error";
  EXPECT_THROW(run_scenario(scenario_from_json(strict)), Error);
}

TEST(Run, HelmholtzUsesComplexPath)
{
  const auto j = json::parse(R"({
    "schema_version": 1,
    "problem": {"kind": "helmholtz_2d", "size": [15, 15], "omega": 10, "absorption": "k2", "boundary": "impedance"},
    "partition": {"kind": "cartesian", "px": 2, "py": 2},
    "schwarz_method": "oras",
    "coarse": {"kind": "grid", "coarse_ratio": 4},
    "solver": {"ksp": "gmres", "maxit": 300}
  })");
  const auto rec = run_scenario(scenario_from_json(j));
  EXPECT_TRUE(rec.report.converged);
  EXPECT_EQ(rec.coarse_size, 9u);
}

TEST(Suite, ParseRunAndWrite)
{
  const auto j = json::parse(R"({
    "schema_version": 1,
    "name": "tiny",
    "base": {"problem": {"kind": "poisson_fd_1d", "size": [31]}, "partition": {"kind": "cartesian", "px": 2},
             "schwarz_method": "asm", "solver": {"ksp": "pcg"}},
    "series": [{"label": "one-level"}, {"label": "AD", "patch": {"coarse": {"kind": "nicolaides"}, "coarse_correction": "AD"}}],
    "points": [{"label": "N=2"}, {"label": "N=4", "patch": {"partition": {"px": 4}}}],
    "reference": [{"label": "ref", "values": [1, null]}]
  })");
  const auto s = suite_from_json(j);
  const auto r = run_suite(s);
  ASSERT_EQ(r.cells.size(), 4u);
  for (const auto& c : r.cells) {
    EXPECT_TRUE(c.error.empty()) << c.error;
    EXPECT_TRUE(c.converged);
  }
  EXPECT_EQ(r.at(1, 1).coarse_size, 4u);
  EXPECT_EQ(r.at(0, 1).coarse_size, 0u);
  EXPECT_NE(r.at(0, 0).hash, r.at(0, 1).hash);
  const auto csv = suite_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "series,point,hash,iterations,converged,coarse_size,kappa,error");
  const auto md = suite_markdown(r);
  EXPECT_NE(md.find("| ref | 1 | - |"), std::string::npos);

  const auto root = fresh_dir("suite");
  const auto dir = write_suite(r, root);
  EXPECT_EQ(dir.filename().string(), suite_hash(s));
  for (const char* f : {"suite.json", "table.csv", "table.md"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  fs::remove_all(root);
}

TEST(Suite, RejectsBadInput)
{
  auto j = json::parse(R"({"schema_version": 1, "base": {"problem": {"kind": "poisson_fd_1d"}},
                           "points": [{"label": "a"}, {"label": "b"}],
                           "reference": [{"label": "r", "values": [1]}]})");
  EXPECT_THROW(suite_from_json(j), ConfigError);
  j.erase("reference");
  j["points"][1]["patch"] = {{"coarse", {{"kind", "geneo"}}}};
  EXPECT_THROW(suite_from_json(j), ConfigError);
  j.erase("base");
  EXPECT_THROW(suite_from_json(j), ConfigError);
}

TEST(Suite, FailedCellDoesNotStopSweep)
{
  const auto j = json::parse(R"({
    "schema_version": 1,
    "base": {"problem": {"kind": "poisson_fd_1d", "size": [8]}, "partition": {"kind": "cartesian", "px": 2},
             "solver": {"ksp": "pcg"}, "schwarz_method": "asm"},
    "points": [{"label": "ok"}, {"label": "too many parts", "patch": {"partition": {"px": 9}}}]
  })");
  const auto r = run_suite(suite_from_json(j));
  EXPECT_TRUE(r.at(0, 0).error.empty());
  EXPECT_FALSE(r.at(0, 1).error.empty());
}
