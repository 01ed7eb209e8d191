#include "vklab/averaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "vklab/corpus.hpp"
#include "vklab/errors.hpp"
#include "vklab/profiles.hpp"
#include "vklab/stationarity.hpp"

namespace vklab {

double averaging_bound(double spacing, int angles) {
  const double m = static_cast<double>(angles);
  return kAveragingConstant * (spacing * spacing + 1.0 / (m * m));
}

namespace {

constexpr std::array<const char*, 6> kIdentities{"hessian-commutes",  "frobenius-integral",
                                                 "cofactor-pairing",  "frobenius-pairing",
                                                 "closed-form-average", "rotation-fixed-point"};

// 1 on r <= 0.8, 0 on r >= 0.9, C-infinity in between.
double cutoff(double r) {
  auto e = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double s = (r - 0.8) / 0.1;
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return e(1.0 - s) / (e(1.0 - s) + e(s));
}

struct Level {
  Grid2D grid;
  int angles;
  SymMatrixField2D F, cofF;
};

Level make_level(int cells, int angles, double margin, const RadialProfile& background) {
  const Grid2D grid = Grid2D::with_cells(cells, margin);
  SymMatrixField2D F = lift_radial_hessian(background, grid);
  SymMatrixField2D cofF = cof_2d(F);
  return {grid, angles, std::move(F), std::move(cofF)};
}

std::array<double, 6> residuals(const Level& lv, const PlanarTestFunction& fn,
                                Interpolation interp) {
  const ScalarField2D f = sample_field(lv.grid, fn.f);
  const ScalarField2D fbar = angular_average_scalar(f, lv.angles, interp);
  const SymMatrixField2D hf = hessian_fd(f);
  const SymMatrixField2D h_fbar = hessian_fd(fbar);
  const double scale_f = 1.0 + max_abs(f);
  const double scale_h = 1.0 + max_abs(hf);
  const double scale_fh = 1.0 + max_abs(lv.F) * max_abs(hf);

  std::array<double, 6> r{};
  r[0] = max_abs_difference(h_fbar, angular_average_matrix(hf, lv.angles, interp)).max_abs / scale_h;

  const ScalarField2D p = pairing_2d(lv.F, hf);
  const ScalarField2D p_bar = pairing_2d(lv.F, h_fbar);
  const double i_f = integral_2d_weighted(p, cutoff).value;
  const double i_fbar = integral_2d_weighted(p_bar, cutoff).value;
  r[1] = std::abs(i_f - i_fbar) / (1.0 + l2_norm_2d(lv.F) * l2_norm_2d(hf));

  const ScalarField2D c = pairing_2d(lv.cofF, hf);
  r[2] = max_abs_difference(pairing_2d(lv.cofF, h_fbar), angular_average_scalar(c, lv.angles, interp))
             .max_abs /
         scale_fh;
  r[3] = max_abs_difference(p_bar, angular_average_scalar(p, lv.angles, interp)).max_abs / scale_fh;

  const ScalarField2D oracle =
      sample_field(lv.grid, [&](double x, double y) { return fn.average(std::hypot(x, y)); });
  r[4] = max_abs_difference(fbar, oracle).max_abs / scale_f;

  const RotationAngle half_step(std::numbers::pi / lv.angles);
  r[5] = max_abs_difference(fbar, rotate_pullback_scalar(fbar, half_step, interp)).max_abs / scale_f;
  return r;
}

}  // namespace

AveragingReport verify_averaging(const AveragingConfig& cfg) {
  if (cfg.cells % 2 != 0) throw InvalidInput("fine cell count must be even");
  if (cfg.angles < 1) throw InvalidInput("angle count must be positive");

  AveragingReport report;
  report.cells = cfg.cells;
  report.angles = cfg.angles;
  report.coarse_cells = cfg.cells / 2;
  report.coarse_angles = std::max(1, cfg.angles / 2);
  report.margin = cfg.margin;

  std::vector<const PlanarTestFunction*> functions;
  if (cfg.functions.empty())
    for (const auto& fn : planar_corpus()) functions.push_back(&fn);
  else
    for (const auto& name : cfg.functions) functions.push_back(&corpus_function(name));

  const RadialProfile background = builtin_profile("quartic");
  report.background = background.name();
  const Level coarse = make_level(report.coarse_cells, report.coarse_angles, cfg.margin, background);
  const Level fine = make_level(report.cells, report.angles, cfg.margin, background);

  report.covered_fraction =
      integral_2d(sample_field(fine.grid, [](double, double) { return 1.0; })).covered_fraction;
  const double bound = averaging_bound(fine.grid.spacing(), fine.angles);

  report.verdict = true;
  for (const auto* fn : functions) {
    const auto rc = residuals(coarse, *fn, cfg.interp);
    const auto rf = residuals(fine, *fn, cfg.interp);
    for (std::size_t k = 0; k < kIdentities.size(); ++k) {
      IdentityCheck chk;
      chk.identity = kIdentities[k];
      chk.function = fn->name;
      chk.coarse = rc[k];
      chk.fine = rf[k];
      chk.bound = bound;
      chk.exact = rf[k] <= kExactFloor;
      chk.order = chk.exact ? std::numeric_limits<double>::quiet_NaN() : std::log2(rc[k] / rf[k]);
      chk.pass = std::isfinite(rf[k]) && rf[k] <= bound && (chk.exact || chk.order >= kMinOrder);
      report.verdict = report.verdict && chk.pass;
      report.checks.push_back(chk);
    }
  }
  return report;
}

nlohmann::ordered_json to_json(const AveragingReport& report) {
  using json = nlohmann::ordered_json;
  json j;
  j["grid"] = {{"fine", {{"cells", report.cells}, {"h", 2.0 / report.cells}, {"angles", report.angles}}},
               {"coarse",
                {{"cells", report.coarse_cells},
                 {"h", 2.0 / report.coarse_cells},
                 {"angles", report.coarse_angles}}}};
  j["margin"] = report.margin;
  j["covered_fraction"] = report.covered_fraction;
  j["background"] = report.background;
  j["constant"] = kAveragingConstant;
  j["min_order"] = kMinOrder;
  j["exact_floor"] = kExactFloor;
  auto checks = json::array();
  for (const auto& c : report.checks) {
    json e;
    e["identity"] = c.identity;
    e["function"] = c.function;
    e["coarse"] = c.coarse;
    e["fine"] = c.fine;
    if (c.exact)
      e["order"] = nullptr;
    else
      e["order"] = c.order;
    e["exact"] = c.exact;
    e["bound"] = c.bound;
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["verdict"] = report.verdict ? "PASS" : "FAIL";
  return j;
}

}  // namespace vklab
