#pragma once

// Angular-averaging identities checked on the planar corpus at two
// resolutions (h, M) and (2h, M/2):
//
//   hessian-commutes     Hess(avg f) = avg(Hess f)
//   frobenius-integral   int w F : Hess f = int w F : Hess(avg f)
//   cofactor-pairing     cof F : Hess(avg f) = avg(cof F : Hess f)
//   frobenius-pairing    F : Hess(avg f) = avg(F : Hess f)
//
// with F the exact Hessian of a radial profile and w a smooth radial cutoff.
// Two more checks catch an under-resolved average: avg f against its closed
// form, and avg f against itself rotated by half an angular step.

#include <string>
#include <vector>

#include "json.hpp"

#include "vklab/field2d.hpp"
#include "vklab/radial.hpp"

namespace vklab {

/// Fine residuals at or below this count as exact (no order is required).
inline constexpr double kExactFloor = 1e-9;
inline constexpr double kMinOrder = 1.9;

struct AveragingConfig {
  int cells = kDefaultCells2D;  ///< fine level; the coarse level has half
  int angles = kDefaultAngles;  ///< fine level; the coarse level has half (at least 1)
  double margin = kDefaultMargin;
  Interpolation interp = Interpolation::cubic;
  /// Corpus functions to run; empty means all.
  std::vector<std::string> functions;
};

struct IdentityCheck {
  std::string identity;
  std::string function;
  double coarse = 0.0;  ///< relative residual at (2h, M/2)
  double fine = 0.0;    ///< relative residual at (h, M)
  double order = 0.0;   ///< log2(coarse / fine); NaN when exact
  bool exact = false;
  double bound = 0.0;   ///< C (h^2 + M^-2) at the fine level
  bool pass = false;
};

struct AveragingReport {
  int cells = 0, angles = 0;
  int coarse_cells = 0, coarse_angles = 0;
  double margin = 0.0;
  double covered_fraction = 0.0;  ///< of the fine grid's disk
  std::string background;
  std::vector<IdentityCheck> checks;
  bool verdict = false;
};

/// C (h^2 + M^-2).
double averaging_bound(double spacing, int angles);

AveragingReport verify_averaging(const AveragingConfig& config = {});

nlohmann::ordered_json to_json(const AveragingReport& report);

}  // namespace vklab
