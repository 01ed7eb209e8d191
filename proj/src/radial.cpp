#include "vklab/radial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string_view>

#include "vklab/errors.hpp"

namespace vklab {

namespace {

// Fornberg's recursion: weights of the derivatives 0..max_order at z for the
// stencil nodes x. Returned as weights[node][order].
std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> x,
                                                  int max_order) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(max_order + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  return c;
}

double stencil_apply(const RadialGrid& grid, std::span<const double> values, std::size_t at,
                     std::size_t first, std::size_t count, int order) {
  std::vector<double> nodes(count);
  for (std::size_t i = 0; i < count; ++i) nodes[i] = grid[first + i];
  const auto w = fornberg_weights(grid[at], nodes, order);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) acc += w[i][order] * values[first + i];
  return acc;
}

// Value at grid[0] extrapolated quadratically from samples 1..3.
double extrapolate_first(const RadialGrid& grid, std::span<const double> values) {
  const double nodes[3] = {grid[1], grid[2], grid[3]};
  const auto w = fornberg_weights(grid[0], nodes, 0);
  return w[0][0] * values[1] + w[1][0] * values[2] + w[2][0] * values[3];
}

void require_finite(const RadialField& f, const char* what) {
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    if (!std::isfinite(f.values[j])) {
      std::ostringstream msg;
      msg << what << ": non-finite value at t = " << f.grid[j];
      throw NonFiniteValue(msg.str());
    }
  }
}

void require_same_grid(const RadialProfile& a, const RadialProfile& b) {
  if (!(a.grid() == b.grid()))
    throw GridMismatch("profiles '" + a.name() + "' and '" + b.name() + "' use different grids");
}

bool any_sampled(const RadialProfile& a, const RadialProfile& b) {
  return a.kind() == ProfileKind::sampled || b.kind() == ProfileKind::sampled;
}

// The 1/t weights amplify finite-difference error at the first cell; sampled
// inputs get that sample replaced by extrapolation from its neighbours.
void patch_origin(RadialField& f) {
  if (f.values.size() >= 4) f.values[0] = extrapolate_first(f.grid, f.values);
}

std::size_t locate(std::span<const double> t, double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.begin()) return 0;
  std::size_t j = static_cast<std::size_t>(it - t.begin()) - 1;
  return std::min(j, t.size() - 2);
}

}  // namespace

// ---------------------------------------------------------------- RadialGrid

RadialGrid RadialGrid::cell_centered(std::size_t cells) {
  if (cells < 4) throw InvalidInput("radial grid needs at least 4 cells");
  auto d = std::make_shared<Data>();
  d->points.resize(cells);
  d->weights.assign(cells, 1.0 / static_cast<double>(cells));
  for (std::size_t j = 0; j < cells; ++j)
    d->points[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(cells);
  d->cell_centered = true;
  return RadialGrid(std::shared_ptr<const Data>(std::move(d)));
}

RadialGrid::RadialGrid(std::vector<double> points) {
  if (points.size() < 4) throw InvalidInput("radial grid needs at least 4 points");
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (!std::isfinite(points[j]) || points[j] <= 0.0 || points[j] >= 1.0)
      throw InvalidInput("radial grid points must lie in (0,1)");
    if (j > 0 && points[j] <= points[j - 1])
      throw InvalidInput("radial grid points must be strictly increasing");
  }
  auto d = std::make_shared<Data>();
  const std::size_t n = points.size();
  d->weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = j == 0 ? 0.0 : 0.5 * (points[j - 1] + points[j]);
    const double hi = j + 1 == n ? 1.0 : 0.5 * (points[j] + points[j + 1]);
    d->weights[j] = hi - lo;
  }
  d->points = std::move(points);
  data_ = std::move(d);
}

bool operator==(const RadialGrid& a, const RadialGrid& b) {
  if (a.data_ == b.data_) return true;
  return a.data_->points == b.data_->points;
}

// ------------------------------------------------------------- RadialProfile

RadialProfile RadialProfile::analytic(std::string name, Evaluator v, Evaluator d1, Evaluator d2,
                                      RadialGrid grid) {
  auto d = std::make_shared<Data>(Data{ProfileKind::analytic, std::move(name), std::move(grid),
                                       std::move(v), std::move(d1), std::move(d2), {}, {}, {}});
  const std::size_t n = d->grid.size();
  d->v.resize(n);
  d->d1.resize(n);
  d->d2.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = d->grid[j];
    d->v[j] = d->e0(t);
    d->d1[j] = d->e1(t);
    d->d2[j] = d->e2(t);
    if (!std::isfinite(d->v[j]) || !std::isfinite(d->d1[j]) || !std::isfinite(d->d2[j])) {
      std::ostringstream msg;
      msg << "profile '" << d->name << "' is not finite at t = " << t;
      throw NonFiniteValue(msg.str());
    }
  }
  return RadialProfile(std::move(d));
}

RadialProfile RadialProfile::sampled(std::string name, RadialGrid grid, std::vector<double> values) {
  if (values.size() != grid.size()) throw GridMismatch("sample count does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw NonFiniteValue("profile '" + name + "' has non-finite samples");
  auto d1 = differentiate(grid, values, 1);
  auto d2 = differentiate(grid, values, 2);
  return tabulated(std::move(name), std::move(grid), std::move(values), std::move(d1),
                   std::move(d2));
}

RadialProfile RadialProfile::tabulated(std::string name, RadialGrid grid, std::vector<double> values,
                                       std::vector<double> first, std::vector<double> second) {
  const std::size_t n = grid.size();
  if (values.size() != n || first.size() != n || second.size() != n)
    throw GridMismatch("sample count does not match grid");
  for (std::size_t j = 0; j < n; ++j)
    if (!std::isfinite(values[j]) || !std::isfinite(first[j]) || !std::isfinite(second[j]))
      throw NonFiniteValue("profile '" + name + "' has non-finite samples");
  auto d = std::make_shared<Data>(Data{ProfileKind::sampled, std::move(name), std::move(grid), {},
                                       {}, {}, std::move(values), std::move(first),
                                       std::move(second)});
  return RadialProfile(std::move(d));
}

double RadialProfile::value(double t) const {
  if (kind() == ProfileKind::analytic) return data_->e0(t);
  const auto tp = grid().points();
  const std::size_t n = tp.size();
  if (t <= tp[0] || t >= tp[n - 1]) {
    const std::size_t j = t <= tp[0] ? 0 : n - 1;
    const double dt = t - tp[j];
    return data_->v[j] + data_->d1[j] * dt + 0.5 * data_->d2[j] * dt * dt;
  }
  const std::size_t j = locate(tp, t);
  const double h = tp[j + 1] - tp[j];
  const double s = (t - tp[j]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * data_->v[j] + h10 * h * data_->d1[j] + h01 * data_->v[j + 1] +
         h11 * h * data_->d1[j + 1];
}

double RadialProfile::slope(double t) const {
  if (kind() == ProfileKind::analytic) return data_->e1(t);
  const auto tp = grid().points();
  const std::size_t n = tp.size();
  if (t <= tp[0] || t >= tp[n - 1]) {
    const std::size_t j = t <= tp[0] ? 0 : n - 1;
    return data_->d1[j] + data_->d2[j] * (t - tp[j]);
  }
  const std::size_t j = locate(tp, t);
  const double h = tp[j + 1] - tp[j];
  const double s = (t - tp[j]) / h;
  const double g00 = 6 * s * (s - 1) / h, g10 = (1 - s) * (1 - 3 * s);
  const double g01 = -6 * s * (s - 1) / h, g11 = s * (3 * s - 2);
  return g00 * data_->v[j] + g10 * data_->d1[j] + g01 * data_->v[j + 1] + g11 * data_->d1[j + 1];
}

double RadialProfile::curvature(double t) const {
  if (kind() == ProfileKind::analytic) return data_->e2(t);
  const auto tp = grid().points();
  const std::size_t n = tp.size();
  if (t <= tp[0]) return data_->d2[0];
  if (t >= tp[n - 1]) return data_->d2[n - 1];
  const std::size_t j = locate(tp, t);
  const double s = (t - tp[j]) / (tp[j + 1] - tp[j]);
  return (1 - s) * data_->d2[j] + s * data_->d2[j + 1];
}

RadialProfile RadialProfile::on_grid(RadialGrid grid) const {
  if (kind() != ProfileKind::analytic)
    throw InvalidInput("only analytic profiles can be moved to another grid");
  return analytic(name(), data_->e0, data_->e1, data_->e2, std::move(grid));
}

RadialProfile RadialProfile::renamed(std::string name) const {
  auto d = std::make_shared<Data>(*data_);
  d->name = std::move(name);
  return RadialProfile(std::move(d));
}

double RadialProfile::origin_slope() const {
  if (kind() == ProfileKind::analytic) return data_->e1(0.0);
  const auto& g = grid();
  const double nodes[3] = {g[0], g[1], g[2]};
  const auto w = fornberg_weights(0.0, nodes, 0);
  return w[0][0] * data_->d1[0] + w[1][0] * data_->d1[1] + w[2][0] * data_->d1[2];
}

void RadialProfile::check_invariants(double tol_origin) const {
  const double s0 = origin_slope();
  double bound = tol_origin;
  if (kind() == ProfileKind::sampled) {
    double sup2 = 0.0;
    for (double x : data_->d2) sup2 = std::max(sup2, std::abs(x));
    bound = tol_origin * (1.0 + sup2);
  }
  if (!(std::abs(s0) <= bound)) {
    std::ostringstream msg;
    msg << "profile '" << name() << "': v'(0+) = " << s0 << " exceeds " << bound;
    throw InvalidInput(msg.str());
  }
  const double e = energy(*this);
  if (!std::isfinite(e)) throw InvalidInput("profile '" + name() + "' has infinite energy");
}

const Evaluator& RadialProfile::eval0() const {
  if (kind() != ProfileKind::analytic) throw InvalidInput("sampled profile has no evaluator");
  return data_->e0;
}
const Evaluator& RadialProfile::eval1() const {
  if (kind() != ProfileKind::analytic) throw InvalidInput("sampled profile has no evaluator");
  return data_->e1;
}
const Evaluator& RadialProfile::eval2() const {
  if (kind() != ProfileKind::analytic) throw InvalidInput("sampled profile has no evaluator");
  return data_->e2;
}

RadialProfile combine(double a, const RadialProfile& f, double b, const RadialProfile& g,
                      std::string name) {
  require_same_grid(f, g);
  if (name.empty()) name = "combination(" + f.name() + "," + g.name() + ")";
  if (f.kind() == ProfileKind::analytic && g.kind() == ProfileKind::analytic) {
    auto f0 = f.eval0(), f1 = f.eval1(), f2 = f.eval2();
    auto g0 = g.eval0(), g1 = g.eval1(), g2 = g.eval2();
    return RadialProfile::analytic(
        std::move(name), [=](double t) { return a * f0(t) + b * g0(t); },
        [=](double t) { return a * f1(t) + b * g1(t); },
        [=](double t) { return a * f2(t) + b * g2(t); }, f.grid());
  }
  const std::size_t n = f.grid().size();
  std::vector<double> v(n), d1(n), d2(n);
  for (std::size_t j = 0; j < n; ++j) {
    v[j] = a * f.values()[j] + b * g.values()[j];
    d1[j] = a * f.first()[j] + b * g.first()[j];
    d2[j] = a * f.second()[j] + b * g.second()[j];
  }
  return RadialProfile::tabulated(std::move(name), f.grid(), std::move(v), std::move(d1),
                                  std::move(d2));
}

// --------------------------------------------------------------- operators

double RadialField::max_abs() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> differentiate(const RadialGrid& grid, std::span<const double> values,
                                  int order) {
  const std::size_t n = grid.size();
  if (values.size() != n) throw GridMismatch("sample count does not match grid");
  if (order != 1 && order != 2) throw InvalidInput("derivative order must be 1 or 2");
  std::vector<double> out(n);
  const std::size_t edge = order == 1 ? 3 : 4;
  out[0] = stencil_apply(grid, values, 0, 0, edge, order);
  out[n - 1] = stencil_apply(grid, values, n - 1, n - edge, edge, order);
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] = stencil_apply(grid, values, j, j - 1, 3, order);
  return out;
}

RadialField det_hessian_radial(const RadialProfile& v) {
  const auto& g = v.grid();
  RadialField k{g, std::vector<double>(g.size())};
  for (std::size_t j = 0; j < g.size(); ++j) k.values[j] = v.second()[j] * v.first()[j] / g[j];
  if (v.kind() == ProfileKind::sampled) patch_origin(k);
  require_finite(k, "det_hessian_radial");
  return k;
}

RadialField det_hessian_radial_product_form(const RadialProfile& v) {
  RadialField k = cof_pairing_radial_product_form(v, v);
  for (double& x : k.values) x *= 0.5;
  return k;
}

RadialField cof_pairing_radial(const RadialProfile& v, const RadialProfile& f) {
  require_same_grid(v, f);
  const auto& g = v.grid();
  RadialField p{g, std::vector<double>(g.size())};
  for (std::size_t j = 0; j < g.size(); ++j)
    p.values[j] = v.second()[j] * f.first()[j] / g[j] + f.second()[j] * v.first()[j] / g[j];
  if (any_sampled(v, f)) patch_origin(p);
  require_finite(p, "cof_pairing_radial");
  return p;
}

RadialField cof_pairing_radial_product_form(const RadialProfile& v, const RadialProfile& f) {
  require_same_grid(v, f);
  const auto& g = v.grid();
  std::vector<double> prod(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) prod[j] = v.first()[j] * f.first()[j];
  RadialField p{g, differentiate(g, prod, 1)};
  for (std::size_t j = 0; j < g.size(); ++j) p.values[j] /= g[j];
  patch_origin(p);
  require_finite(p, "cof_pairing_radial_product_form");
  return p;
}

RadialField frobenius_pairing_radial(const RadialProfile& v, const RadialProfile& f) {
  require_same_grid(v, f);
  const auto& g = v.grid();
  RadialField p{g, std::vector<double>(g.size())};
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double t = g[j];
    p.values[j] = v.second()[j] * f.second()[j] + v.first()[j] * f.first()[j] / (t * t);
  }
  if (any_sampled(v, f)) patch_origin(p);
  require_finite(p, "frobenius_pairing_radial");
  return p;
}

RadialField energy_density_radial(const RadialProfile& v) {
  const auto& g = v.grid();
  RadialField e{g, std::vector<double>(g.size())};
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double a = v.second()[j];
    const double b = v.first()[j] / g[j];
    e.values[j] = a * a + b * b;
  }
  if (v.kind() == ProfileKind::sampled) patch_origin(e);
  require_finite(e, "energy_density_radial");
  return e;
}

double disk_integral(const RadialField& g) {
  require_finite(g, "disk_integral");
  const auto t = g.grid.points();
  const auto w = g.grid.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) acc += g.values[j] * t[j] * w[j];
  return 2.0 * std::numbers::pi * acc;
}

double disk_l2_norm(const RadialField& g) {
  RadialField sq{g.grid, g.values};
  for (double& x : sq.values) x *= x;
  return std::sqrt(disk_integral(sq));
}

double energy(const RadialProfile& v) { return disk_integral(energy_density_radial(v)); }

// --------------------------------------------------------------------- CSV

void write_profile_csv(const RadialProfile& v, std::ostream& out) {
  out << "t,v,v1,v2\n" << std::setprecision(17);
  const auto& g = v.grid();
  for (std::size_t j = 0; j < g.size(); ++j)
    out << g[j] << ',' << v.values()[j] << ',' << v.first()[j] << ',' << v.second()[j] << '\n';
}

void write_profile_csv(const RadialProfile& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  write_profile_csv(v, out);
}

namespace {

double parse_number(std::string_view s, std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InvalidInput("profile CSV line " + std::to_string(line) + ": bad number '" +
                       std::string(s) + "'");
  return x;
}

}  // namespace

RadialProfile read_profile_csv(std::istream& in, std::string name, CsvDerivatives mode) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("profile CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,v,v1,v2") throw InvalidInput("profile CSV header must be 't,v,v1,v2'");
  std::vector<double> t, v, d1, d2;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (;;) {
      auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols.size() != 4)
      throw InvalidInput("profile CSV line " + std::to_string(lineno) + ": expected 4 columns");
    t.push_back(parse_number(cols[0], lineno));
    v.push_back(parse_number(cols[1], lineno));
    d1.push_back(parse_number(cols[2], lineno));
    d2.push_back(parse_number(cols[3], lineno));
  }
  RadialGrid grid(std::move(t));
  if (mode == CsvDerivatives::recompute)
    return RadialProfile::sampled(std::move(name), std::move(grid), std::move(v));
  return RadialProfile::tabulated(std::move(name), std::move(grid), std::move(v), std::move(d1),
                                  std::move(d2));
}

RadialProfile read_profile_csv(const std::string& path, CsvDerivatives mode) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open profile CSV " + path);
  std::string name = path;
  auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  return read_profile_csv(in, name, mode);
}

}  // namespace vklab
