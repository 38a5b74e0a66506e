#pragma once

// Command-line overrides, applied as a JSON merge patch before the scenario is parsed.

#include <ddmlab/bench/config.hpp>

#include <optional>
#include <string>

namespace ddm::bench {

struct Overrides {
  std::optional<std::string> partitioner;
  std::optional<std::size_t> overlap;
  std::optional<std::string> schwarz_method;
  std::optional<std::string> coarse;
  std::optional<std::string> geneo_threshold; ///< a number or "auto"
  std::optional<std::string> coarse_correction;
  std::optional<std::string> ksp;
  std::optional<double> ksp_rtol;
  std::optional<std::size_t> ksp_maxit;
  std::optional<std::string> pc_side;
  bool force_spectrum = false;

  json patch() const
  {
    json p = json::object();
    if (partitioner)
      p["partition"]["kind"] = *partitioner;
    if (overlap)
      p["overlap"] = *overlap;
    if (schwarz_method)
      p["schwarz_method"] = *schwarz_method;
    if (coarse)
      p["coarse"]["kind"] = *coarse;
    if (geneo_threshold) {
      if (*geneo_threshold == "auto") {
        p["coarse"]["geneo_threshold"] = "auto";
      } else {
        std::size_t used = 0;
        double tau = 0.0;
        try {
          tau = std::stod(*geneo_threshold, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != geneo_threshold->size())
          throw ConfigError("--geneo-threshold: expected a number or auto, got '" + *geneo_threshold + "'");
        p["coarse"]["geneo_threshold"] = tau;
      }
    }
    if (coarse_correction)
      p["coarse_correction"] = *coarse_correction;
    if (ksp)
      p["solver"]["ksp"] = *ksp;
    if (ksp_rtol)
      p["solver"]["rtol"] = *ksp_rtol;
    if (ksp_maxit)
      p["solver"]["maxit"] = *ksp_maxit;
    if (pc_side)
      p["solver"]["pc_side"] = *pc_side;
    if (force_spectrum)
      p["analysis"]["spectrum"] = true;
    return p;
  }

  void apply(json& config) const
  {
    detail::require_object(config, "config");
    config.merge_patch(patch());
  }
};

} // namespace ddm::bench
