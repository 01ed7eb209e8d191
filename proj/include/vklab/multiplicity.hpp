#pragma once

// A radial profile built from bumps on consecutive intervals (t_n, t_{n+1}),
// and the family of profiles obtained by flipping its sign on one interval.
// Every member has |u'| = |v'|, hence the same Hessian determinant and the
// same energy density, while being a different function.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vklab/radial.hpp"
#include "vklab/stationarity.hpp"

namespace vklab {

inline constexpr double kDetTolerance = 1e-10;
inline constexpr double kSlopeTolerance = 1e-12;
inline constexpr double kDensityTolerance = 1e-10;
inline constexpr double kEnergyRelTolerance = 1e-10;
inline constexpr double kSeparationTolerance = 1e-10;
/// Profiles closer than this in sup norm count as equal.
inline constexpr double kDistinctThreshold = 10 * 1e-13;
inline constexpr double kTruncationFloor = 1e-14;
inline constexpr int kMaxDepth = 24;

enum class SequenceRule { geometric, custom };

struct FamilySpec {
  double R = 1.0;
  SequenceRule sequence = SequenceRule::geometric;
  /// Custom breakpoints t_1 < t_2 < ... in (0, R); t_0 = 0 is implied (a
  /// leading 0 is accepted and dropped).
  std::vector<double> t;
  /// Truncation depth: bumps n = 0..N-1 are kept. Defaults to the smallest n
  /// with (t_{n+1} - t_n)^(n-2) < 1e-14 (geometric, capped at 24) or to the
  /// number of custom intervals.
  std::optional<int> N;
  int members = 5;
  /// Bump eta(s) = exp(1 - 1/(1 - (s/a)^2)) for |s| < a; a in (0, 1/2].
  double eta_half_width = 0.25;

  /// Throws SpecInvalid.
  void validate() const;
  int depth() const;
  /// t_0 = 0, t_1, ..., t_N.
  std::vector<double> breakpoints() const;
  /// (t_{n+1} - t_n)^n max(eta), the sup of the n-th bump.
  double amplitude(int n) const;

  /// key = value lines; `#` starts a comment. Keys: R, sequence, t, N,
  /// members, eta_half_width. Throws SpecInvalid.
  static FamilySpec parse(std::istream& in);
  static FamilySpec load(const std::string& path);
};

/// Truncated bump series with analytic v, v', v''.
RadialProfile build_base_profile(const FamilySpec& spec,
                                 RadialGrid grid = RadialGrid::cell_centered());

struct FamilyMember {
  int index = 0;  ///< 0 for the base profile
  RadialProfile profile;
  double lo = 0.0, hi = 0.0;  ///< flip interval (empty for the base)
};

FamilyMember base_member(const RadialProfile& base);
/// u_n = -v on (t_n, t_{n+1}), v elsewhere; 1 <= n < N, else IndexOutOfRange.
FamilyMember flip(const RadialProfile& base, const FamilySpec& spec, int n);
/// Sign flipped on every interval n with flips[n] set (flips.size() <= N).
RadialProfile flip_pattern(const RadialProfile& base, const FamilySpec& spec,
                           const std::vector<bool>& flips, std::string name = {});

struct SameDetCheck {
  double det_discrepancy = 0.0;    ///< max |det(u) - det(v)|
  double slope_discrepancy = 0.0;  ///< max ||u'| - |v'||
  bool det_equal = false;
  bool slopes_equal = false;
  /// Both sides agree (pass together or fail together).
  bool consistent() const { return det_equal == slopes_equal; }
  bool pass() const { return det_equal && slopes_equal; }

  RadialProfile u, v;
};

/// GridMismatch unless u and v share a grid.
SameDetCheck check_same_det(const RadialProfile& u, const RadialProfile& v,
                            double det_tol = kDetTolerance, double slope_tol = kSlopeTolerance);

struct EnergyCheck {
  double density_discrepancy = 0.0;  ///< max pointwise difference
  double energy_u = 0.0, energy_v = 0.0;
  double energy_rel_discrepancy = 0.0;
  bool density_equal = false;
  bool energy_equal = false;
  bool pass() const { return density_equal && energy_equal; }
};

/// Needs the det check of the same pair, else PreconditionNotVerified.
EnergyCheck check_energy_equality(const RadialProfile& u, const RadialProfile& v,
                                  const SameDetCheck& same_det,
                                  double density_tol = kDensityTolerance,
                                  double energy_rel_tol = kEnergyRelTolerance);

/// sup |u - w| on [0, 1]: grid argmax refined by golden-section search.
double sup_distance(const RadialProfile& u, const RadialProfile& w);

struct Separation {
  bool distinct = true;
  double min_separation = 0.0;  ///< infinity with fewer than two members
  int first = -1, second = -1;  ///< indices of the closest pair
};

Separation pairwise_distinct(const std::vector<FamilyMember>& members,
                             double threshold = kDistinctThreshold);

/// Closed-form minimum separation of members: 2 max(a_n, a_m) for U_n, U_m
/// and 2 a_n against the base.
double expected_separation(const FamilySpec& spec, const std::vector<FamilyMember>& members);

struct MemberResult {
  FamilyMember member;
  SameDetCheck det;
  EnergyCheck energy;
  StationarityReport stationarity;
};

struct MultiplicityReport {
  FamilySpec spec;
  int depth = 0;
  StationarityReport base;
  double base_energy = 0.0;
  std::vector<MemberResult> members;
  Separation separation;
  double expected_separation = 0.0;
  bool separation_matches = true;
  bool verdict = false;
};

/// Base plus n_members flips: det and energy checks, separation, and the
/// stationarity verification of every profile.
MultiplicityReport run_multiplicity_experiment(const FamilySpec& spec, int n_members,
                                               const VerifyConfig& config = {},
                                               RadialGrid grid = RadialGrid::cell_centered(),
                                               const std::string& name = "family");

/// The stationarity report keys for the base, plus det_check, energy_check,
/// min_separation and members[].
nlohmann::ordered_json to_json(const MultiplicityReport& report);

}  // namespace vklab
