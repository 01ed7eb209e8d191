#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "vklab/averaging.hpp"
#include "vklab/corpus.hpp"
#include "vklab/errors.hpp"
#include "vklab/field2d.hpp"
#include "vklab/profiles.hpp"
#include "vklab/stationarity.hpp"

using namespace vklab;

namespace {

constexpr double kPi = std::numbers::pi;

double c_h2(const Grid2D& g) { return kAveragingConstant * g.spacing() * g.spacing(); }

SymMatrixField2D constant_matrix(const Grid2D& g, Sym2 a) {
  return sample_matrix_field(g, [a](double, double) { return a; });
}

void check_matrix_near(const SymMatrixField2D& f, Sym2 want, double tol) {
  REQUIRE(f.valid_count() > 0);
  const SymMatrixField2D ref = constant_matrix(f.grid(), want);
  CHECK(max_abs_difference(f, ref).max_abs <= tol);
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid2D g(0.01);
  CHECK(g.cells() == 200);
  CHECK(g.node_at(0.3, 0.4).has_value());
  CHECK_FALSE(g.node_at(0.305, 0.4).has_value());
  CHECK_THROWS_AS(Grid2D(0.3), InvalidInput);
  CHECK_THROWS_AS(Grid2D::with_cells(32), ResolutionTooCoarse);
  CHECK_THROWS_AS(Grid2D(2.0 / 128, 0.01), InvalidInput);  // margin below 2h
  CHECK(g.refined().cells() == 400);
}

TEST_CASE("lifting a radial profile") {
  const Grid2D g(0.01);
  const ScalarField2D p = lift_radial(builtin_profile("paraboloid"), g);
  CHECK(p.value_at(0.3, 0.4).value() == doctest::Approx(0.125).epsilon(1e-14));
  const ScalarField2D q = lift_radial(builtin_profile("quartic"), g);
  CHECK(q.value_at(0.3, 0.4).value() == doctest::Approx(0.015625).epsilon(1e-14));
  // |x| = 1 lies outside the mask
  CHECK_FALSE(q.value_at(0.6, 0.8).has_value());
  const ScalarField2D zero = lift_radial(builtin_profile("constant"), g);
  CHECK(max_abs(zero) == 1.0);
}

TEST_CASE("finite-difference Hessian") {
  const Grid2D g = Grid2D::with_cells(128);
  check_matrix_near(hessian_fd(sample_field(g, [](double x, double) { return x * x; })), {2, 0, 0},
                    1e-9);
  check_matrix_near(hessian_fd(sample_field(g, [](double x, double y) { return 1 + 2 * x - 3 * y; })),
                    {0, 0, 0}, 1e-9);
  check_matrix_near(hessian_fd(sample_field(g, [](double x, double y) { return x * y; })), {0, 1, 0},
                    1e-9);

  // v = t^4/4 at (0.5, 0): radial eigenvalue 3t^2, tangential t^2.
  const Grid2D fine = Grid2D::with_cells(512);
  const SymMatrixField2D h = hessian_fd(lift_radial(builtin_profile("quartic"), fine));
  const Sym2 at = h.value_at(0.5, 0.0).value();
  CHECK(std::abs(at.a11 - 0.75) <= planar_tolerance(fine));
  CHECK(std::abs(at.a12) <= planar_tolerance(fine));
  CHECK(std::abs(at.a22 - 0.25) <= planar_tolerance(fine));

  // the stencil footprint shrinks the valid set by one ring
  const ScalarField2D f = sample_field(g, [](double x, double) { return x; });
  CHECK(hessian_fd(f).valid_count() < f.valid_count());
}

TEST_CASE("exact lifted Hessian matches the FD Hessian to second order") {
  auto error = [](int cells) {
    const Grid2D g = Grid2D::with_cells(cells);
    const RadialProfile v = builtin_profile("quartic");
    return max_abs_difference(hessian_fd(lift_radial(v, g)), lift_radial_hessian(v, g)).max_abs;
  };
  CHECK(std::log2(error(128) / error(256)) >= 1.9);
}

TEST_CASE("scalar rotation pullback") {
  const Grid2D g = Grid2D::with_cells(128);
  const ScalarField2D x = sample_field(g, [](double x, double) { return x; });
  const ScalarField2D minus_y = sample_field(g, [](double, double y) { return -y; });
  const ScalarField2D rotated = rotate_pullback_scalar(x, RotationAngle(kPi / 2));
  CHECK(max_abs_difference(rotated, minus_y).max_abs <= c_h2(g));

  const ScalarField2D same = rotate_pullback_scalar(x, RotationAngle(0.0));
  CHECK(max_abs_difference(same, x).max_abs == 0.0);
  // the cubic stencil needs one ring of neighbours, even at angle 0
  CHECK(same.valid_count() <= x.valid_count());

  const ScalarField2D radial = lift_radial(builtin_profile("quartic"), g);
  for (double phi : {0.3, 1.1, 2.5})
    CHECK(max_abs_difference(rotate_pullback_scalar(radial, RotationAngle(phi)), radial).max_abs <=
          c_h2(g));
  CHECK(RotationAngle(-kPi / 2).radians() == doctest::Approx(3 * kPi / 2));
}

TEST_CASE("matrix rotation pullback") {
  const Grid2D g = Grid2D::with_cells(128);
  const SymMatrixField2D e11 = constant_matrix(g, {1, 0, 0});
  check_matrix_near(rotate_pullback_matrix(e11, RotationAngle(kPi / 2)), {0, 0, 1}, 1e-14);
  check_matrix_near(rotate_pullback_matrix(e11, RotationAngle(0.0)), {1, 0, 0}, 0.0);
  const SymMatrixField2D id = constant_matrix(g, {1, 0, 1});
  check_matrix_near(rotate_pullback_matrix(id, RotationAngle(0.7)), {1, 0, 1}, 1e-14);

  // conjugation by a rotation: R^T A R
  const double c = std::cos(0.4), s = std::sin(0.4);
  const Sym2 r = conjugate({1, 0, 0}, c, s);
  CHECK(r.a11 == doctest::Approx(c * c));
  CHECK(r.a12 == doctest::Approx(-c * s));
  CHECK(r.a22 == doctest::Approx(s * s));
}

TEST_CASE("angular averages") {
  const Grid2D g = Grid2D::with_cells(128);
  const int m = 64;
  const double tol = averaging_bound(g.spacing(), m);

  const ScalarField2D x = sample_field(g, [](double x, double) { return x; });
  CHECK(max_abs(angular_average_scalar(x, m)) <= tol);

  const ScalarField2D x2 = sample_field(g, [](double x, double) { return x * x; });
  const ScalarField2D half_r2 = sample_field(g, [](double x, double y) { return (x * x + y * y) / 2; });
  CHECK(max_abs_difference(angular_average_scalar(x2, m), half_r2).max_abs <= tol);

  const ScalarField2D radial = lift_radial(builtin_profile("quartic"), g);
  const ScalarField2D avg = angular_average_scalar(radial, m);
  CHECK(max_abs_difference(avg, radial).max_abs <= tol);

  const ScalarField2D gauss = sample_field(g, corpus_function("gaussian-offset").f);
  const ScalarField2D once = angular_average_scalar(gauss, m);
  CHECK(max_abs_difference(angular_average_scalar(once, m), once).max_abs <= tol);

  check_matrix_near(angular_average_matrix(constant_matrix(g, {1, 0, 0}), m), {0.5, 0, 0.5}, 1e-14);
  check_matrix_near(angular_average_matrix(constant_matrix(g, {1, 0, 1}), m), {1, 0, 1}, 1e-14);
  const SymMatrixField2D hv = lift_radial_hessian(builtin_profile("quartic"), g);
  CHECK(max_abs_difference(angular_average_matrix(hv, m), hv).max_abs <= tol * (1 + max_abs(hv)));

  CHECK_THROWS_AS(angular_average_scalar(x, 0), InvalidInput);
}

TEST_CASE("averages work with any angle count") {
  // M = 3 is not a multiple of four and takes the unfolded path.
  const Grid2D g = Grid2D::with_cells(128);
  const ScalarField2D x2 = sample_field(g, [](double x, double) { return x * x; });
  const ScalarField2D half_r2 = sample_field(g, [](double x, double y) { return (x * x + y * y) / 2; });
  CHECK(max_abs_difference(angular_average_scalar(x2, 3), half_r2).max_abs <= 1e-12);
  const ScalarField2D x4 = sample_field(g, [](double x, double) { return std::pow(x, 4); });
  CHECK(max_abs_difference(angular_average_scalar(x4, 4), angular_average_scalar(x4, 12)).max_abs >
        1e-3);
}

TEST_CASE("pointwise matrix algebra") {
  const Sym2 a{1, 2, 3}, b{0, 1, 0};
  CHECK(frobenius(a, b) == 4.0);
  CHECK(frobenius({1, 0, 1}, {1, 0, 1}) == 2.0);
  CHECK(frobenius(a, {}) == 0.0);
  const Sym2 ca = cof(a);
  CHECK(ca.a11 == 3.0);
  CHECK(ca.a12 == -2.0);
  CHECK(ca.a22 == 1.0);
  CHECK(det(a) == -1.0);
  CHECK(det({1, 0, 1}) == 1.0);
  CHECK(det({}) == 0.0);

  const Grid2D g = Grid2D::with_cells(128);
  const SymMatrixField2D fa = constant_matrix(g, a);
  CHECK(max_abs_difference(pairing_2d(fa, constant_matrix(g, b)),
                           sample_field(g, [](double, double) { return 4.0; }))
            .max_abs == 0.0);
  check_matrix_near(cof_2d(fa), {3, -2, 1}, 0.0);
  CHECK(max_abs(det_2d(fa)) == 1.0);
}

TEST_CASE("planar integrals") {
  const Grid2D g = Grid2D::with_cells(512);
  const double r = g.mask_radius();
  const AreaIntegral one = integral_2d(sample_field(g, [](double, double) { return 1.0; }));
  CHECK(std::abs(one.value - kPi * r * r) <= 2 * kPi * r * g.spacing());
  CHECK(one.covered_fraction == doctest::Approx(r * r).epsilon(0.01));
  CHECK(integral_2d(sample_field(g, [](double, double) { return 0.0; })).value == 0.0);

  // radial oracle restricted to the mask: 2 pi * 10 r^6 / 6
  const ScalarField2D g4 = sample_field(g, [](double x, double y) {
    const double t2 = x * x + y * y;
    return 10.0 * t2 * t2;
  });
  const double want = 2.0 * kPi * 10.0 * std::pow(r, 6) / 6.0;
  CHECK(std::abs(integral_2d(g4).value - want) <= 0.01 * want);
}

TEST_CASE("grid mismatch is rejected") {
  const ScalarField2D a = sample_field(Grid2D::with_cells(128), [](double, double) { return 1.0; });
  const ScalarField2D b = sample_field(Grid2D::with_cells(256), [](double, double) { return 1.0; });
  CHECK_THROWS_AS(combine(1.0, a, 1.0, b), GridMismatch);
  CHECK_THROWS_AS(max_abs_difference(a, b), GridMismatch);
}

TEST_CASE("field I/O") {
  const Grid2D g = Grid2D::with_cells(128);
  const ScalarField2D f = sample_field(g, corpus_function("gaussian").f);
  std::stringstream bin;
  write_field_binary(f, bin);
  const ScalarField2D back = read_field_binary(bin);
  CHECK(back.grid() == g);
  CHECK(back.valid_count() == f.valid_count());
  CHECK(max_abs_difference(back, f).max_abs == 0.0);

  std::stringstream csv;
  write_field_csv(f, csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x,y,value");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == f.valid_count());

  std::stringstream truncated(bin.str().substr(0, 20));
  CHECK_THROWS_AS(read_field_binary(truncated), InvalidInput);
}

TEST_CASE("corpus averages match their closed forms") {
  const Grid2D g = Grid2D::with_cells(256);
  for (const auto& fn : planar_corpus()) {
    CAPTURE(fn.name);
    const ScalarField2D avg = angular_average_scalar(sample_field(g, fn.f), 128);
    const ScalarField2D oracle =
        sample_field(g, [&](double x, double y) { return fn.average(std::hypot(x, y)); });
    CHECK(max_abs_difference(avg, oracle).max_abs <= averaging_bound(g.spacing(), 128));
    // the closed-form Hessians agree with finite differences
    const SymMatrixField2D exact = sample_matrix_field(g, fn.hessian);
    const ScalarField2D f = sample_field(g, fn.f);
    CHECK(max_abs_difference(hessian_fd(f), exact).max_abs <=
          planar_tolerance(g) * (1 + max_abs(exact)));
  }
}

TEST_CASE("bilinear interpolation breaks the commuting identity") {
  // Why the rotations interpolate with cubics: a bilinear pullback has O(h^2)
  // value error, which the FD Hessian of the average divides by h^2.
  AveragingConfig cfg;
  cfg.cells = 256;
  cfg.angles = 64;
  cfg.functions = {"gaussian"};
  cfg.interp = Interpolation::bilinear;
  const AveragingReport bilinear = verify_averaging(cfg);
  cfg.interp = Interpolation::cubic;
  const AveragingReport cubic = verify_averaging(cfg);
  REQUIRE(bilinear.checks.front().identity == "hessian-commutes");
  CHECK_FALSE(bilinear.checks.front().pass);
  CHECK(cubic.checks.front().pass);
  CHECK(bilinear.checks.front().fine > 100 * cubic.checks.front().fine);
}
