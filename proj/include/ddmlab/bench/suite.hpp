#pragma once

// Parameter sweeps: a base scenario, a list of sweep points and optional series, each a JSON merge patch.

#include <ddmlab/bench/config.hpp>
#include <ddmlab/bench/output.hpp>
#include <ddmlab/bench/scenario.hpp>

#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ddm::bench {

struct SuiteEntry {
  std::string label;
  json patch = json::object();
};

struct ReferenceRow {
  std::string label;
  std::vector<std::optional<double>> values; ///< one per point
};

struct Suite {
  std::string name = "suite";
  json base = json::object();
  std::vector<SuiteEntry> series; ///< table rows
  std::vector<SuiteEntry> points; ///< table columns
  std::vector<ReferenceRow> reference;
  json source; ///< the suite file as parsed
};

struct SuiteCell {
  std::string series;
  std::string point;
  std::string hash;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t coarse_size = 0;
  std::optional<double> kappa;
  std::string error; ///< non-empty when the run failed
};

struct SuiteResult {
  Suite suite;
  std::vector<SuiteCell> cells; ///< series-major

  const SuiteCell& at(std::size_t series, std::size_t point) const { return cells.at(series * suite.points.size() + point); }
};

inline Suite suite_from_json(const json& j)
{
  detail::reject_unknown(j, {"schema_version", "name", "base", "series", "points", "reference"}, "suite");
  if (detail::get_or<int>(j, "schema_version", -1, "suite") != schema_version)
    throw ConfigError("suite.schema_version: expected " + std::to_string(schema_version));
  Suite s;
  s.source = j;
  s.name = detail::get_or<std::string>(j, "name", s.name, "suite");
  if (!j.contains("base"))
    throw ConfigError("suite: missing base scenario");
  s.base = j.at("base");
  detail::require_object(s.base, "suite.base");
  if (!s.base.contains("schema_version"))
    s.base["schema_version"] = schema_version;
  auto entries = [&](const char* key) {
    std::vector<SuiteEntry> out;
    if (!j.contains(key))
      return out;
    for (const auto& e : j.at(key)) {
      detail::reject_unknown(e, {"label", "patch"}, std::string("suite.") + key);
      out.push_back({e.at("label").get<std::string>(), e.value("patch", json::object())});
    }
    return out;
  };
  s.series = entries("series");
  s.points = entries("points");
  if (s.series.empty())
    s.series.push_back({"run", json::object()});
  if (s.points.empty())
    s.points.push_back({"base", json::object()});
  if (j.contains("reference"))
    for (const auto& r : j.at("reference")) {
      detail::reject_unknown(r, {"label", "values"}, "suite.reference");
      ReferenceRow row{r.at("label").get<std::string>(), {}};
      for (const auto& v : r.at("values"))
        row.values.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
      if (row.values.size() != s.points.size())
        throw ConfigError("suite.reference: '" + row.label + "' needs one value per point");
      s.reference.push_back(std::move(row));
    }
  // every combination must parse before anything runs
  for (const auto& se : s.series)
    for (const auto& pt : s.points) {
      json cfg = s.base;
      cfg.merge_patch(se.patch);
      cfg.merge_patch(pt.patch);
      (void)scenario_from_json(cfg);
    }
  return s;
}

inline Scenario suite_scenario(const Suite& s, std::size_t series, std::size_t point)
{
  json cfg = s.base;
  cfg.merge_patch(s.series.at(series).patch);
  cfg.merge_patch(s.points.at(point).patch);
  auto sc = scenario_from_json(cfg);
  sc.name = s.name + "/" + s.series[series].label + "/" + s.points[point].label;
  return sc;
}

/// Runs every (series, point); a failing run marks its cell and the sweep continues.
/// When out_root is set, each run is written under out_root/<hash>/.
inline SuiteResult run_suite(const Suite& s, const std::optional<std::filesystem::path>& out_root = std::nullopt)
{
  SuiteResult res{s, {}};
  for (std::size_t i = 0; i < s.series.size(); ++i)
    for (std::size_t p = 0; p < s.points.size(); ++p) {
      SuiteCell cell{s.series[i].label, s.points[p].label, "", 0, false, 0, std::nullopt, ""};
      try {
        const auto sc = suite_scenario(s, i, p);
        cell.hash = scenario_hash(sc);
        const auto rec = run_scenario(sc);
        cell.iterations = rec.report.iterations;
        cell.converged = rec.report.converged;
        cell.coarse_size = rec.coarse_size;
        if (rec.spectrum && rec.spectrum->hermitian_path)
          cell.kappa = rec.spectrum->kappa;
        if (out_root)
          write_run(rec, *out_root);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      res.cells.push_back(std::move(cell));
    }
  return res;
}

inline std::string suite_csv(const SuiteResult& r)
{
  std::ostringstream out;
  out << "series,point,hash,iterations,converged,coarse_size,kappa,error\n";
  for (const auto& c : r.cells) {
    std::string err = c.error;
    for (auto& ch : err)
      if (ch == ',' || ch == '\n')
        ch = ';';
    out << c.series << ',' << c.point << ',' << c.hash << ',' << c.iterations << ',' << (c.converged ? 1 : 0) << ','
        << c.coarse_size << ',' << (c.kappa ? detail::fmt(*c.kappa, 8) : "") << ',' << err << '\n';
  }
  return out.str();
}

/// One row per series, one column per point; reference rows appended.
inline std::string suite_markdown(const SuiteResult& r)
{
  const auto& s = r.suite;
  std::ostringstream md;
  md << "# " << s.name << "\n\n| |";
  for (const auto& p : s.points)
    md << ' ' << p.label << " |";
  md << "\n|---|";
  for (std::size_t p = 0; p < s.points.size(); ++p)
    md << "---|";
  md << '\n';
  for (std::size_t i = 0; i < s.series.size(); ++i) {
    md << "| " << s.series[i].label << " |";
    for (std::size_t p = 0; p < s.points.size(); ++p) {
      const auto& c = r.at(i, p);
      if (!c.error.empty())
        md << " error |";
      else
        md << ' ' << c.iterations << (c.converged ? "" : "*") << " |";
    }
    md << '\n';
  }
  for (const auto& ref : s.reference) {
    md << "| " << ref.label << " |";
    for (const auto& v : ref.values)
      md << ' ' << (v ? detail::fmt(*v, 6) : "-") << " |";
    md << '\n';
  }
  md << "\nIteration counts; `*` marks runs that hit the iteration limit.\n";
  bool any_error = false;
  for (const auto& c : r.cells)
    if (!c.error.empty()) {
      if (!any_error)
        md << "\nFailed runs:\n\n";
      any_error = true;
      md << "- " << c.series << " / " << c.point << ": " << c.error << '\n';
    }
  md << "\nRuns (hash per cell):\n\n";
  for (const auto& c : r.cells)
    md << "- " << c.series << " / " << c.point << ": `" << c.hash << "`\n";
  return md.str();
}

inline std::string suite_hash(const Suite& s) { return fnv1a_hex(s.source.dump()); }

/// Writes out_root/<suite hash>/{suite.json, table.csv, table.md}; returns the directory.
inline std::filesystem::path write_suite(const SuiteResult& r, const std::filesystem::path& out_root)
{
  const auto dir = out_root / suite_hash(r.suite);
  std::filesystem::create_directories(dir);
  detail::open_out(dir / "suite.json") << r.suite.source.dump(2) << '\n';
  detail::open_out(dir / "table.csv") << suite_csv(r);
  detail::open_out(dir / "table.md") << suite_markdown(r);
  return dir;
}

} // namespace ddm::bench
