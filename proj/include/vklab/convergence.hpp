#pragma once

// Grid refinement study: every discretization used by the lab, compared with
// its closed form at successively halved spacings.

#include <string>
#include <vector>

#include "json.hpp"

#include "vklab/field2d.hpp"
#include "vklab/radial.hpp"

namespace vklab {

struct ConvergenceConfig {
  /// J at the coarsest level; the finest default level is the working grid.
  std::size_t radial_cells = kDefaultRadialCells / 4;
  int planar_cells = kDefaultCells2D;              ///< 2/h at the coarsest level
  double margin = kDefaultMargin;
  int levels = 3;
  bool planar = true;
  /// Points with t (or |x|) below this are excluded from pointwise comparisons.
  double min_radius = 0.05;
};

struct ConvergenceCheck {
  std::string name;
  std::vector<double> errors;  ///< relative, one per level
  std::vector<double> orders;  ///< log2 of successive error ratios
  bool exact = false;          ///< finest error at or below the exact floor
  bool pass = false;
};

struct ConvergenceReport {
  std::string profile;
  std::vector<std::size_t> radial_cells;
  std::vector<int> planar_cells;
  std::vector<ConvergenceCheck> checks;
  bool verdict = false;
};

/// Needs an analytic profile and at least 2 levels (InvalidInput otherwise).
ConvergenceReport run_convergence(const RadialProfile& v, const ConvergenceConfig& config = {});

nlohmann::ordered_json to_json(const ConvergenceReport& report);

}  // namespace vklab
