#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"

#include "vklab/bump.hpp"
#include "vklab/errors.hpp"
#include "vklab/multiplicity.hpp"
#include "vklab/rng.hpp"

using namespace vklab;

namespace {

// t_n = 1 - 2^-n, the default breakpoints, computed independently of FamilySpec.
double t_n(int n) { return 1.0 - std::ldexp(1.0, -n); }

const RadialProfile& base() {
  static const RadialProfile v = build_base_profile(FamilySpec{});
  return v;
}

FamilySpec parse(const std::string& text) {
  std::istringstream in(text);
  return FamilySpec::parse(in);
}

RadialProfile affine_in_t(double c) {
  return RadialProfile::analytic(
      "line", [c](double t) { return c * t; }, [c](double) { return c; }, [](double) { return 0.0; });
}

}  // namespace

TEST_CASE("default family specification") {
  const FamilySpec spec;
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.depth() == 8);
  const auto bp = spec.breakpoints();
  REQUIRE(bp.size() == 9);
  for (int n = 0; n <= 8; ++n) CHECK(bp[n] == t_n(n));
  // the truncation rule: first n with (t_{n+1} - t_n)^(n-2) below 1e-14
  CHECK(std::pow(t_n(9) - t_n(8), 6) < 1e-14);
  CHECK(std::pow(t_n(8) - t_n(7), 5) >= 1e-14);
}

TEST_CASE("base profile shape") {
  const RadialProfile& v = base();
  // beyond the last kept interval the profile vanishes identically
  for (std::size_t j = 0; j < v.grid().size(); ++j)
    if (v.grid()[j] > t_n(8)) CHECK(v.values()[j] == 0.0);
  // midpoint of (t_1, t_2): (t_2 - t_1)^1 * eta(0) with eta(0) = 1
  CHECK(v.value(0.5 * (t_n(1) + t_n(2))) == doctest::Approx(0.25).epsilon(1e-15));
  for (int n = 0; n <= 8; ++n) {
    CAPTURE(n);
    CHECK(std::abs(v.slope(t_n(n))) <= 1e-12);
    CHECK(std::abs(v.curvature(t_n(n))) <= 1e-12);
  }
}

TEST_CASE("amplitude law") {
  const FamilySpec spec;
  const RadialProfile& v = base();
  for (int n = 0; n < 8; ++n) {
    CAPTURE(n);
    const double gap = t_n(n + 1) - t_n(n);
    const double want = std::pow(gap, n);
    CHECK(std::abs(spec.amplitude(n) - want) <= 1e-12);
    double sup = 0.0;
    for (int k = 1; k < 2000; ++k) sup = std::max(sup, std::abs(v.value(t_n(n) + gap * k / 2000.0)));
    CHECK(std::abs(sup - want) <= 1e-12);
  }
}

TEST_CASE("smoothness across breakpoints") {
  const RadialProfile& v = base();
  const double d = 1e-7;
  for (int n = 1; n <= 8; ++n) {
    CAPTURE(n);
    const double t = t_n(n);
    CHECK(std::abs(v.value(t - d) - v.value(t + d)) <= 1e-10);
    CHECK(std::abs(v.slope(t - d) - v.slope(t + d)) <= 1e-10);
    CHECK(std::abs(v.curvature(t - d) - v.curvature(t + d)) <= 1e-10);
  }
}

TEST_CASE("constraint field vanishes off the bump supports") {
  const FamilySpec spec;
  const RadialField k = det_hessian_radial(base());
  const Mollifier eta(spec.eta_half_width);
  for (std::size_t j = 0; j < k.grid.size(); ++j) {
    const double t = k.grid[j];
    bool inside = false;
    for (int n = 0; n < 8; ++n) {
      const double c = 0.5 * (t_n(n) + t_n(n + 1)), gap = t_n(n + 1) - t_n(n);
      inside = inside || std::abs(t - c) < eta.half_width() * gap;
    }
    if (!inside) CHECK(k.values[j] == 0.0);
  }
  for (int n = 0; n <= 8; ++n) CHECK(base().curvature(t_n(n)) * base().slope(t_n(n)) == 0.0);
}

TEST_CASE("flipping one interval") {
  const FamilySpec spec;
  const FamilyMember u1 = flip(base(), spec, 1);
  CHECK(u1.lo == t_n(1));
  CHECK(u1.hi == t_n(2));
  for (std::size_t j = 0; j < base().grid().size(); ++j) {
    const double t = base().grid()[j];
    const double u = u1.profile.values()[j], v = base().values()[j];
    if (t > t_n(1) && t < t_n(2))
      CHECK(u + v == 0.0);
    else
      CHECK(u == v);
  }
  for (int n = 1; n <= 5; ++n) {
    const FamilyMember m = flip(base(), spec, n);
    for (std::size_t j = 0; j < base().grid().size(); ++j)
      CHECK(std::abs(m.profile.first()[j]) == std::abs(base().first()[j]));
    const double d = 1e-7;
    for (double t : {t_n(n), t_n(n + 1)})
      CHECK(std::abs(m.profile.curvature(t - d) - m.profile.curvature(t + d)) <= 1e-10);
  }
  CHECK_THROWS_AS(flip(base(), spec, 0), IndexOutOfRange);
  CHECK_THROWS_AS(flip(base(), spec, 8), IndexOutOfRange);
}

TEST_CASE("same determinant characterization") {
  const FamilySpec spec;
  SUBCASE("single flip") {
    const SameDetCheck c = check_same_det(flip(base(), spec, 3).profile, base());
    CHECK(c.pass());
    CHECK(c.det_discrepancy <= 1e-10);
  }
  SUBCASE("any sign pattern") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<bool> flips(8);
      for (int n = 0; n < 8; ++n) flips[n] = rng.next() & 1u;
      const SameDetCheck c = check_same_det(flip_pattern(base(), spec, flips), base());
      CHECK(c.det_discrepancy <= kDetTolerance);
      CHECK(c.slope_discrepancy <= kSlopeTolerance);
    }
  }
  SUBCASE("global sign flip") {
    const SameDetCheck c = check_same_det(combine(-1.0, base(), 0.0, base()), base());
    CHECK(c.pass());
  }
  SUBCASE("a tilted profile fails on both sides") {
    const SameDetCheck c = check_same_det(combine(1.0, base(), 1.0, affine_in_t(0.3)), base());
    CHECK_FALSE(c.det_equal);
    CHECK_FALSE(c.slopes_equal);
    CHECK(c.consistent());
  }
  SUBCASE("grids must match") {
    const RadialProfile coarse = build_base_profile(spec, RadialGrid::cell_centered(1024));
    CHECK_THROWS_AS(check_same_det(coarse, base()), GridMismatch);
  }
}

TEST_CASE("energy equality") {
  const FamilySpec spec;
  const RadialProfile u = flip(base(), spec, 2).profile;
  const SameDetCheck same = check_same_det(u, base());
  const EnergyCheck e = check_energy_equality(u, base(), same);
  CHECK(e.pass());
  CHECK(e.density_discrepancy <= 1e-10);
  CHECK(e.energy_rel_discrepancy <= 1e-10);

  const EnergyCheck self = check_energy_equality(base(), base(), check_same_det(base(), base()));
  CHECK(self.density_discrepancy == 0.0);
  CHECK(self.energy_u == self.energy_v);

  const RadialProfile twice = combine(2.0, base(), 0.0, base());
  const EnergyCheck scaled = check_energy_equality(twice, base(), check_same_det(twice, base()));
  CHECK_FALSE(scaled.pass());
  CHECK(scaled.energy_u / scaled.energy_v == doctest::Approx(4.0).epsilon(1e-12));

  // the det check must concern the same pair
  CHECK_THROWS_AS(check_energy_equality(u, base(), check_same_det(twice, base())),
                  PreconditionNotVerified);
}

TEST_CASE("pairwise separation") {
  const FamilySpec spec;
  std::vector<FamilyMember> members;
  for (int n = 1; n <= 5; ++n) members.push_back(flip(base(), spec, n));
  // U_4 and U_5 differ on both intervals; the larger bump decides: 2 (t_5 - t_4)^4
  const Separation s = pairwise_distinct(members);
  CHECK(s.distinct);
  const double flips_only = 2.0 * std::pow(t_n(5) - t_n(4), 4);
  CHECK(std::abs(s.min_separation - flips_only) <= kSeparationTolerance);
  CHECK(expected_separation(spec, members) == doctest::Approx(flips_only).epsilon(1e-14));

  // with the base profile in the set, U_5 against V gives 2 (t_6 - t_5)^5
  members.insert(members.begin(), base_member(base()));
  const Separation with_base = pairwise_distinct(members);
  const double want = 2.0 * std::pow(t_n(6) - t_n(5), 5);
  CHECK(std::abs(with_base.min_separation - want) <= kSeparationTolerance);
  CHECK(with_base.min_separation == doctest::Approx(want).epsilon(1e-9));
  CHECK(expected_separation(spec, members) == doctest::Approx(want).epsilon(1e-14));
  CHECK(std::abs(sup_distance(members[1].profile, base()) - 2.0 * 0.25) <= 1e-12);

  std::vector<FamilyMember> dup{members[3], members[3]};
  const Separation d = pairwise_distinct(dup);
  CHECK_FALSE(d.distinct);
  CHECK(d.min_separation == 0.0);

  const Separation one = pairwise_distinct({members[1]});
  CHECK(one.distinct);
  CHECK(one.min_separation == std::numeric_limits<double>::infinity());
}

TEST_CASE("multiplicity experiment") {
  VerifyConfig cfg;
  cfg.planar = false;
  const MultiplicityReport r = run_multiplicity_experiment(FamilySpec{}, 5, cfg);
  CHECK(r.verdict);
  CHECK(r.members.size() == 5);
  CHECK(r.separation_matches);
  for (const auto& m : r.members) {
    CHECK(m.det.pass());
    CHECK(m.energy.pass());
    CHECK(m.stationarity.verdict);
  }
  const MultiplicityReport none = run_multiplicity_experiment(FamilySpec{}, 0, cfg);
  CHECK(none.verdict);
  CHECK(none.members.empty());
  CHECK_FALSE(none.base.variations.empty());
  const auto j = to_json(none);
  CHECK(j["members"].empty());
}

TEST_CASE("family spec parsing") {
  const FamilySpec spec = parse("# custom family\nsequence = custom\nt = [0.3, 0.6, 0.8, 0.9]\nmembers = 2\n");
  CHECK(spec.depth() == 4);
  CHECK(spec.breakpoints().front() == 0.0);
  CHECK(spec.members == 2);
  CHECK(parse("eta_half_width = 0.2\nR = 0.9").R == 0.9);
  CHECK(parse("").depth() == 8);

  CHECK_THROWS_AS(parse("sequence = custom\nt = [0.5, 0.4, 0.6]"), SpecInvalid);
  CHECK_THROWS_AS(parse("sequence = custom\nt = [0.5, 1.2]"), SpecInvalid);
  CHECK_THROWS_AS(parse("R = 1.5"), SpecInvalid);
  CHECK_THROWS_AS(parse("R = 0.5\nR = 0.6"), SpecInvalid);
  CHECK_THROWS_AS(parse("colour = red"), SpecInvalid);
  CHECK_THROWS_AS(parse("members = 9"), SpecInvalid);
  CHECK_THROWS_AS(parse("eta_half_width = 0.7"), SpecInvalid);
  CHECK_THROWS_AS(parse("N = 1"), SpecInvalid);
  CHECK_THROWS_AS(parse("t = [0.2, 0.4]"), SpecInvalid);
  CHECK_THROWS_AS(FamilySpec::load("/nonexistent/family.cfg"), SpecInvalid);
}
