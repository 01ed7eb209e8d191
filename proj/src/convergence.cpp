#include "vklab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "vklab/averaging.hpp"
#include "vklab/errors.hpp"

namespace vklab {

namespace {

double max_rel_error(const RadialField& got, const RadialField& want, double min_radius) {
  double err = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < want.values.size(); ++j) {
    if (want.grid[j] < min_radius) continue;
    err = std::max(err, std::abs(got.values[j] - want.values[j]));
    scale = std::max(scale, std::abs(want.values[j]));
  }
  return err / (1.0 + scale);
}

double max_rel_error(const ScalarField2D& got, const ScalarField2D& want, double min_radius) {
  const double err = max_abs_difference(got, want, min_radius).max_abs;
  return err / (1.0 + max_abs(want));
}

// Radial closed forms evaluated at the nodes of a planar grid.
ScalarField2D radial_reference(const RadialProfile& v, const Grid2D& grid,
                               const std::function<double(double, double, double)>& form) {
  return sample_field(grid, [&](double x, double y) {
    const double r = std::hypot(x, y);
    if (r == 0.0) return 0.0;  // excluded by min_radius anyway
    return form(v.eval1()(r), v.eval2()(r), r);
  });
}

ConvergenceCheck finish(std::string name, std::vector<double> errors) {
  ConvergenceCheck c;
  c.name = std::move(name);
  c.errors = std::move(errors);
  for (std::size_t l = 1; l < c.errors.size(); ++l)
    c.orders.push_back(std::log2(c.errors[l - 1] / c.errors[l]));
  c.exact = c.errors.back() <= kExactFloor;
  c.pass = c.exact || std::all_of(c.orders.begin(), c.orders.end(),
                                  [](double p) { return p >= kMinOrder; });
  return c;
}

}  // namespace

ConvergenceReport run_convergence(const RadialProfile& v, const ConvergenceConfig& cfg) {
  if (cfg.levels < 2)
    throw InvalidInput("a refinement study needs at least 2 levels; order is undefined otherwise");
  if (v.kind() != ProfileKind::analytic)
    throw InvalidInput("the refinement study compares against closed forms and needs an analytic profile");

  ConvergenceReport report;
  report.profile = v.name();

  std::vector<double> quad, det_r, dens_r;
  const double exact_quad = 10.0 * std::numbers::pi / 3.0;
  for (int l = 0; l < cfg.levels; ++l) {
    const std::size_t cells = cfg.radial_cells << l;
    report.radial_cells.push_back(cells);
    const RadialGrid grid = RadialGrid::cell_centered(cells);

    RadialField g{grid, {}};
    for (std::size_t j = 0; j < grid.size(); ++j) g.values.push_back(10.0 * std::pow(grid[j], 4));
    quad.push_back(std::abs(disk_integral(g) - exact_quad) / exact_quad);

    const RadialProfile analytic = v.on_grid(grid);
    const RadialProfile sampled = RadialProfile::sampled(
        v.name() + "-sampled", grid, std::vector<double>(analytic.values().begin(), analytic.values().end()));
    det_r.push_back(max_rel_error(det_hessian_radial(sampled), det_hessian_radial(analytic), cfg.min_radius));
    dens_r.push_back(
        max_rel_error(energy_density_radial(sampled), energy_density_radial(analytic), cfg.min_radius));
  }
  report.checks.push_back(finish("radial-quadrature", quad));
  report.checks.push_back(finish("radial-det-sampled", det_r));
  report.checks.push_back(finish("radial-density-sampled", dens_r));

  if (cfg.planar) {
    std::vector<double> det_p, dens_p;
    for (int l = 0; l < cfg.levels; ++l) {
      const int cells = cfg.planar_cells << l;
      report.planar_cells.push_back(cells);
      const Grid2D grid = Grid2D::with_cells(cells, cfg.margin);
      const SymMatrixField2D h = hessian_fd(lift_radial(v, grid));
      det_p.push_back(max_rel_error(
          det_2d(h),
          radial_reference(v, grid, [](double d1, double d2, double r) { return d2 * d1 / r; }),
          cfg.min_radius));
      dens_p.push_back(max_rel_error(
          pairing_2d(h, h),
          radial_reference(v, grid,
                           [](double d1, double d2, double r) { return d2 * d2 + (d1 / r) * (d1 / r); }),
          cfg.min_radius));
    }
    report.checks.push_back(finish("planar-det", det_p));
    report.checks.push_back(finish("planar-density", dens_p));
  }

  report.verdict = std::all_of(report.checks.begin(), report.checks.end(),
                               [](const ConvergenceCheck& c) { return c.pass; });
  return report;
}

nlohmann::ordered_json to_json(const ConvergenceReport& report) {
  using json = nlohmann::ordered_json;
  json j;
  j["profile"] = report.profile;
  j["radial_cells"] = report.radial_cells;
  j["planar_cells"] = report.planar_cells;
  j["min_order"] = kMinOrder;
  j["exact_floor"] = kExactFloor;
  auto checks = json::array();
  for (const auto& c : report.checks) {
    json e;
    e["name"] = c.name;
    e["errors"] = c.errors;
    auto orders = json::array();
    for (double p : c.orders) {
      if (std::isfinite(p))
        orders.push_back(p);
      else
        orders.push_back(nullptr);
    }
    e["orders"] = std::move(orders);
    e["exact"] = c.exact;
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["verdict"] = report.verdict ? "PASS" : "FAIL";
  return j;
}

}  // namespace vklab
