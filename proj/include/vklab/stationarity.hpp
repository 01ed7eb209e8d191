#pragma once

// Admissible variations f of a radial V (cof Hess V : Hess f = 0) and the
// stationarity defect  integral_B Hess V : Hess f  measured along them.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "vklab/field2d.hpp"
#include "vklab/radial.hpp"

namespace vklab {

/// Field-level averaging constant C: relative Hessian/averaging residuals stay
/// below C (h^2 + M^-2). Calibrated once on the built-in planar corpus at
/// h = 2/512, M = 256 (largest observed ratio 0.24) and frozen.
inline constexpr double kAveragingConstant = 0.5;

inline constexpr double kRadialTolerance = 1e-8;
inline constexpr double kPlateauEpsAnalytic = 1e-9;
inline constexpr double kPlateauEpsSampled = 1e-6;

/// 5 C h^2, the tolerance for anything measured through 2D finite differences.
double planar_tolerance(const Grid2D& grid);

enum class VariationKind {
  radial_plateau,  ///< radial bump with f' supported inside a plateau of V'
  zero_hessian,    ///< 2D bump inside an annulus where Hess V = 0
  rotated,         ///< angular average of a 2D variation
  harmonic,        ///< Re/Im of (x1 + i x2)^m
  custom,          ///< supplied by the caller
};

const char* to_string(VariationKind kind);

using VariationPayload = std::variant<RadialProfile, ScalarField2D>;

struct Variation {
  VariationKind kind = VariationKind::custom;
  std::string label;
  VariationPayload payload;
  double admissibility_defect = 0.0;  ///< L^2 norm of cof Hess V : Hess f
  double stationarity_defect = 0.0;   ///< integral of Hess V : Hess f
  double norm_f = 0.0;                ///< L^2 norm of Hess f

  bool radial() const { return std::holds_alternative<RadialProfile>(payload); }
};

/// V prepared for measurement: the radial route always, the planar route
/// (FD Hessian of the lifted profile on a grid) when a grid is given.
class Background {
 public:
  explicit Background(RadialProfile v);
  Background(RadialProfile v, Grid2D grid);

  const RadialProfile& profile() const { return v_; }
  /// L^2 norm of Hess V from the radial formulas.
  double norm() const { return norm_; }

  bool has_planar() const { return grid_.has_value(); }
  const Grid2D& grid() const;
  const SymMatrixField2D& hessian() const;
  const SymMatrixField2D& cofactor() const;
  /// L^2 norm of the FD Hessian over the valid nodes.
  double planar_norm() const;

 private:
  RadialProfile v_;
  double norm_ = 0.0;
  std::optional<Grid2D> grid_;
  std::optional<SymMatrixField2D> hessian_, cofactor_;
  double planar_norm_ = 0.0;
};

struct Admissibility {
  bool admissible = false;
  double defect = 0.0;
  double threshold = 0.0;  ///< tol * norm_V * norm_f
};

Admissibility is_admissible(const Background& v, const RadialProfile& f, double tol_adm);
Admissibility is_admissible(const Background& v, const ScalarField2D& f, double tol_adm);

double stationarity_defect(const Background& v, const RadialProfile& f);
double stationarity_defect(const Background& v, const ScalarField2D& f);

/// Throws NotAdmissible when f fails is_admissible.
double checked_stationarity_defect(const Background& v, const RadialProfile& f, double tol_adm);
double checked_stationarity_defect(const Background& v, const ScalarField2D& f, double tol_adm);

/// Computes the three defects of a payload against V.
Variation measure(const Background& v, VariationKind kind, std::string label,
                  VariationPayload payload);

struct Plateau {
  double lo = 0.0;  ///< 0 when the plateau reaches the origin
  double hi = 0.0;  ///< 1 when it reaches the rim
  std::size_t first = 0;
  std::size_t last = 0;
  double width() const { return hi - lo; }
};

double default_plateau_epsilon(const RadialProfile& v);

/// Maximal runs of grid points with |v'| <= eps sup|v'| (and, when
/// flat_curvature is set, |v''| <= eps sup|v''| as well).
std::vector<Plateau> find_plateaus(const RadialProfile& v, double eps, bool flat_curvature = false);

struct PlateauVariations {
  std::vector<Variation> variations;
  bool nontrivial = false;
  std::vector<Plateau> plateaus;
};

/// Radial bumps f whose derivative f' is a scaled mollifier supported inside
/// a plateau. Without a usable plateau a single constant variation comes back
/// and nontrivial is false.
PlateauVariations gen_plateau_variations(const Background& v, std::size_t count,
                                         std::uint64_t seed);

/// Products of 1D mollifiers in x and y supported inside an annulus where
/// V' = V'' = 0. Throws NoPlateau when no annulus can hold one.
std::vector<Variation> gen_zero_hessian_variations(const Background& v, std::size_t count,
                                                   std::uint64_t seed);

/// Re and Im of (x1 + i x2)^m for m = 2..max_degree.
std::vector<Variation> gen_harmonic_variations(const Background& v, int max_degree = 6);

/// True when cof Hess V is a multiple of the identity (v'' = v'/t on the grid).
bool hessian_is_isotropic(const RadialProfile& v);

/// Angular average of f, measured as a variation of kind `rotated`.
Variation symmetrize_variation(const Background& v, const ScalarField2D& f,
                               int samples = kDefaultAngles);

struct Tolerances {
  double adm_radial = kRadialTolerance;
  double stat_radial = kRadialTolerance;
  double adm_planar = 0.0;
  double stat_planar = 0.0;
};

struct CustomVariation {
  std::string label;
  VariationPayload payload;
};

struct VerifyConfig {
  std::uint64_t seed = 1;
  std::size_t radial_count = 8;
  std::size_t planar_count = 6;
  std::size_t symmetrized_count = 6;
  int planar_cells = kDefaultCells2D;
  double margin = kDefaultMargin;
  int angles = kDefaultAngles;
  bool planar = true;
  /// Radial-path tolerances; planar ones default to planar_tolerance(grid).
  double tol_adm = kRadialTolerance;
  double tol_stat = kRadialTolerance;
  std::optional<double> tol_planar;
  std::vector<CustomVariation> custom;
};

struct VariationRecord {
  VariationKind kind = VariationKind::custom;
  std::string label;
  bool planar = false;
  double adm_defect = 0.0;
  double stat_defect = 0.0;
  double norm_f = 0.0;
  double normalized = 0.0;  ///< |stat_defect| / (norm_V norm_f)
  bool admissible = false;
  bool pass = false;  ///< admissible and normalized <= tolerance
};

struct StationarityReport {
  std::string profile;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  std::vector<VariationRecord> variations;
  std::vector<std::string> notes;
  /// Every admissible variation passes; inadmissible ones are excluded.
  bool verdict = false;

  std::size_t admissible_count() const;
};

/// Runs every applicable generator plus the caller's variations and checks
/// the normalized stationarity defect of each admissible one.
StationarityReport verify_proposition(const RadialProfile& v, const VerifyConfig& config = {});

/// Stable key order: profile, seed, tolerances{adm,stat}, variations[], notes[], verdict.
/// Inadmissible variations carry "pass": null.
nlohmann::ordered_json to_json(const StationarityReport& report);

}  // namespace vklab
