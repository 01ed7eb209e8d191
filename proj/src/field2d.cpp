#include "vklab/field2d.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "parallel.hpp"
#include "vklab/errors.hpp"

namespace vklab {

// ------------------------------------------------------------------ Grid2D

Grid2D::Grid2D(double spacing, double margin) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidInput("grid spacing must be positive");
  const double cells = std::round(2.0 / spacing);
  if (std::abs(cells * spacing - 2.0) > 1e-9)
    throw InvalidInput("grid spacing must divide the side length 2");
  if (cells + 1 < kMinNodesAcross) {
    std::ostringstream msg;
    msg << "spacing " << spacing << " gives " << cells + 1 << " nodes across the diameter (need "
        << kMinNodesAcross << ")";
    throw ResolutionTooCoarse(msg.str());
  }
  cells_ = static_cast<int>(cells);
  h_ = 2.0 / cells;
  if (!(margin > 0.0 && margin < 1.0)) throw InvalidInput("mask margin must lie in (0,1)");
  if (margin < 2.0 * h_ - 1e-15) throw InvalidInput("mask margin must be at least 2h");
  margin_ = margin;
}

Grid2D Grid2D::with_cells(int cells, double margin) {
  if (cells <= 0) throw InvalidInput("cell count must be positive");
  return Grid2D(2.0 / cells, margin);
}

bool Grid2D::in_mask(int i, int j) const {
  const double x = coord(i), y = coord(j);
  const double r = mask_radius();
  return x * x + y * y <= r * r;
}

std::optional<std::pair<int, int>> Grid2D::node_at(double x, double y) const {
  const double fi = (x + 1.0) / h_, fj = (y + 1.0) / h_;
  const double ri = std::round(fi), rj = std::round(fj);
  if (std::abs(fi - ri) > 1e-9 || std::abs(fj - rj) > 1e-9) return std::nullopt;
  if (ri < 0 || rj < 0 || ri > cells_ || rj > cells_) return std::nullopt;
  return std::make_pair(static_cast<int>(ri), static_cast<int>(rj));
}

// ------------------------------------------------------------------ fields

ScalarField2D::ScalarField2D(Grid2D grid)
    : grid_(grid), values_(grid.node_count(), 0.0), valid_(grid.node_count(), 0) {}

std::optional<double> ScalarField2D::value_at(double x, double y) const {
  const auto node = grid_.node_at(x, y);
  if (!node || !valid(node->first, node->second)) return std::nullopt;
  return (*this)(node->first, node->second);
}

std::size_t ScalarField2D::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

SymMatrixField2D::SymMatrixField2D(Grid2D grid)
    : grid_(grid),
      a11_(grid.node_count(), 0.0),
      a12_(grid.node_count(), 0.0),
      a22_(grid.node_count(), 0.0),
      valid_(grid.node_count(), 0) {}

std::optional<Sym2> SymMatrixField2D::value_at(double x, double y) const {
  const auto node = grid_.node_at(x, y);
  if (!node || !valid(node->first, node->second)) return std::nullopt;
  return at(node->first, node->second);
}

std::size_t SymMatrixField2D::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

RotationAngle::RotationAngle(double radians) {
  if (!std::isfinite(radians)) throw InvalidInput("rotation angle must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double phi = std::fmod(radians, two_pi);
  if (phi < 0.0) phi += two_pi;
  if (phi >= two_pi) phi = 0.0;
  phi_ = phi;
}

namespace {

void require_same_grid(const Grid2D& a, const Grid2D& b) {
  if (!(a == b)) throw GridMismatch("fields live on different 2D grids");
}

// ----------------------------------------------------------- interpolation

struct Rotation {
  double c;
  double s;
};

template <int W>
inline void stencil_weights(double s, std::array<double, W>& w) {
  if constexpr (W == 2) {
    w = {1.0 - s, s};
  } else {
    const double sm1 = s - 1.0, sm2 = s - 2.0, sp1 = s + 1.0;
    const double a = s * sm1, b = sp1 * sm2;
    w = {-a * sm2 * (1.0 / 6.0), b * sm1 * 0.5, -b * s * 0.5, sp1 * a * (1.0 / 6.0)};
  }
}

// ok[index(i0, j0)] == 1 when the W x W block of nodes starting at (i0, j0)
// is entirely valid.
template <int W>
std::vector<std::uint8_t> stencil_ok(const Grid2D& g, const std::vector<std::uint8_t>& valid) {
  const int n = g.nodes_per_side();
  std::vector<std::uint8_t> rows(g.node_count(), 0), ok(g.node_count(), 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + W <= n; ++i) {
      bool all = true;
      for (int a = 0; a < W && all; ++a) all = valid[g.index(i + a, j)] != 0;
      rows[g.index(i, j)] = all ? 1 : 0;
    }
  for (int j = 0; j + W <= n; ++j)
    for (int i = 0; i + W <= n; ++i) {
      bool all = true;
      for (int b = 0; b < W && all; ++b) all = rows[g.index(i, j + b)] != 0;
      ok[g.index(i, j)] = all ? 1 : 0;
    }
  return ok;
}

// For every target node and every rotation, interpolates the K source arrays
// at R x, maps the K values through post(rotation, in, out) and accumulates
// into dst. Each node's sum runs over the rotations in order, so the result
// is independent of the row partition. Nodes with any non-interpolable image
// end up invalid.
template <int W, std::size_t K, class Post>
void rotate_accumulate(const Grid2D& g, const std::vector<std::uint8_t>& src_valid,
                       const std::array<const double*, K>& src, const std::vector<Rotation>& rots,
                       const std::array<double*, K>& dst, std::vector<std::uint8_t>& dst_valid,
                       Post post) {
  const auto ok = stencil_ok<W>(g, src_valid);
  const int n = g.nodes_per_side();
  const double centre = 0.5 * g.cells();
  constexpr int lead = W == 4 ? 1 : 0;
  std::fill(dst_valid.begin(), dst_valid.end(), std::uint8_t{1});

  detail::parallel_blocks(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
    std::array<double, W> wx{}, wy{};
    std::array<double, K> in{}, out{};
    for (const Rotation& rot : rots) {
      for (std::size_t jj = lo; jj < hi; ++jj) {
        const int j = static_cast<int>(jj);
        const double dy = j - centre;
        // Image of node (i, j) is (bx + c i, by + s i) in index space.
        const double bx = centre - rot.c * centre - rot.s * dy;
        const double by = centre - rot.s * centre + rot.c * dy;
        const std::size_t row_start = g.index(0, j);
        for (int i = 0; i < n; ++i) {
          const std::size_t target = row_start + static_cast<std::size_t>(i);
          if (!dst_valid[target]) continue;
          const double gx = bx + rot.c * i, gy = by + rot.s * i;
          if (!(gx >= lead && gy >= lead)) {
            dst_valid[target] = 0;
            continue;
          }
          const int fx = static_cast<int>(gx), fy = static_cast<int>(gy);
          const int i0 = fx - lead, j0 = fy - lead;
          if (i0 + W > n || j0 + W > n || !ok[g.index(i0, j0)]) {
            dst_valid[target] = 0;
            continue;
          }
          stencil_weights<W>(gx - fx, wx);
          stencil_weights<W>(gy - fy, wy);
          in.fill(0.0);
          for (int b = 0; b < W; ++b) {
            const std::size_t row = g.index(i0, j0 + b);
            for (std::size_t k = 0; k < K; ++k) {
              const double* r = src[k] + row;
              double acc = 0.0;
              for (int a = 0; a < W; ++a) acc += wx[a] * r[a];
              in[k] += wy[b] * acc;
            }
          }
          post(rot, in, out);
          for (std::size_t k = 0; k < K; ++k) dst[k][target] += out[k];
        }
      }
    }
  });
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t idx = 0; idx < g.node_count(); ++idx)
      if (!dst_valid[idx]) dst[k][idx] = 0.0;
}

std::vector<Rotation> uniform_rotations(int samples) {
  if (samples < 1) throw InvalidInput("angular sample count must be positive");
  std::vector<Rotation> rots(samples);
  for (int m = 0; m < samples; ++m) {
    const double phi = 2.0 * std::numbers::pi * m / samples;
    rots[m] = {std::cos(phi), std::sin(phi)};
  }
  return rots;
}

template <std::size_t K, class Post>
void dispatch(Interpolation interp, const Grid2D& g, const std::vector<std::uint8_t>& src_valid,
              const std::array<const double*, K>& src, const std::vector<Rotation>& rots,
              const std::array<double*, K>& dst, std::vector<std::uint8_t>& dst_valid, Post post) {
  if (interp == Interpolation::bilinear)
    rotate_accumulate<2, K>(g, src_valid, src, rots, dst, dst_valid, post);
  else
    rotate_accumulate<4, K>(g, src_valid, src, rots, dst, dst_valid, post);
}

struct Identity {
  template <std::size_t K>
  void operator()(const Rotation&, const std::array<double, K>& in, std::array<double, K>& out) const {
    out = in;
  }
};

struct Conjugate {
  void operator()(const Rotation& r, const std::array<double, 3>& in,
                  std::array<double, 3>& out) const {
    const Sym2 m = conjugate(Sym2{in[0], in[1], in[2]}, r.c, r.s);
    out = {m.a11, m.a12, m.a22};
  }
};

ScalarField2D rotate_scalar(const ScalarField2D& f, const std::vector<Rotation>& rots,
                            Interpolation interp) {
  ScalarField2D out(f.grid());
  dispatch<1>(interp, f.grid(), f.mask(), {f.values().data()}, rots, {out.values().data()},
              out.mask(), Identity{});
  return out;
}

SymMatrixField2D rotate_matrix(const SymMatrixField2D& f, const std::vector<Rotation>& rots,
                               Interpolation interp) {
  SymMatrixField2D out(f.grid());
  dispatch<3>(interp, f.grid(), f.mask(), {f.a11().data(), f.a12().data(), f.a22().data()}, rots,
              {out.a11().data(), out.a12().data(), out.a22().data()}, out.mask(), Conjugate{});
  return out;
}

}  // namespace

// --------------------------------------------------------------- sampling

ScalarField2D sample_field(const Grid2D& grid, const PlanarFunction& fn) {
  ScalarField2D f(grid);
  const int n = grid.nodes_per_side();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!grid.in_mask(i, j)) continue;
      const double v = fn(grid.coord(i), grid.coord(j));
      if (!std::isfinite(v)) throw NonFiniteValue("sampled planar function is not finite");
      f(i, j) = v;
      f.set_valid(i, j, true);
    }
  return f;
}

SymMatrixField2D sample_matrix_field(const Grid2D& grid, const PlanarMatrixFunction& fn) {
  SymMatrixField2D f(grid);
  const int n = grid.nodes_per_side();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!grid.in_mask(i, j)) continue;
      const Sym2 a = fn(grid.coord(i), grid.coord(j));
      if (!std::isfinite(a.a11) || !std::isfinite(a.a12) || !std::isfinite(a.a22))
        throw NonFiniteValue("sampled matrix function is not finite");
      f.set(i, j, a);
      f.set_valid(i, j, true);
    }
  return f;
}

ScalarField2D lift_radial(const RadialProfile& v, const Grid2D& grid) {
  return sample_field(grid, [&](double x, double y) { return v.value(std::hypot(x, y)); });
}

ScalarField2D lift_radial(const RadialProfile& v, double spacing, double margin) {
  return lift_radial(v, Grid2D(spacing, margin));
}

SymMatrixField2D lift_radial_hessian(const RadialProfile& v, const Grid2D& grid) {
  return sample_matrix_field(grid, [&](double x, double y) {
    const double r = std::hypot(x, y);
    const double radial = v.curvature(r);
    if (r == 0.0) return Sym2{radial, 0.0, radial};
    const double tangential = v.slope(r) / r;
    const double nx = x / r, ny = y / r;
    return Sym2{radial * nx * nx + tangential * ny * ny, (radial - tangential) * nx * ny,
                radial * ny * ny + tangential * nx * nx};
  });
}

// -------------------------------------------------------------- operators

SymMatrixField2D hessian_fd(const ScalarField2D& f) {
  const Grid2D& g = f.grid();
  SymMatrixField2D out(g);
  const int n = g.nodes_per_side();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  for (int j = 1; j + 1 < n; ++j)
    for (int i = 1; i + 1 < n; ++i) {
      bool ok = true;
      for (int b = -1; b <= 1 && ok; ++b)
        for (int a = -1; a <= 1 && ok; ++a) ok = f.valid(i + a, j + b);
      if (!ok) continue;
      const double c = f(i, j);
      const double fxx = (f(i + 1, j) - 2.0 * c + f(i - 1, j)) * inv_h2;
      const double fyy = (f(i, j + 1) - 2.0 * c + f(i, j - 1)) * inv_h2;
      const double fxy =
          (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) * 0.25 * inv_h2;
      out.set(i, j, {fxx, fxy, fyy});
      out.set_valid(i, j, true);
    }
  return out;
}

ScalarField2D rotate_pullback_scalar(const ScalarField2D& f, RotationAngle phi,
                                     Interpolation interp) {
  const std::vector<Rotation> rot{{std::cos(phi.radians()), std::sin(phi.radians())}};
  return rotate_scalar(f, rot, interp);
}

SymMatrixField2D rotate_pullback_matrix(const SymMatrixField2D& f, RotationAngle phi,
                                        Interpolation interp) {
  const std::vector<Rotation> rot{{std::cos(phi.radians()), std::sin(phi.radians())}};
  return rotate_matrix(f, rot, interp);
}

// When 4 | M the rotations split into quarter-turn cosets: the pullback by
// phi + pi/2 at x is the pullback by phi at Q x, and the quarter turn Q maps
// nodes onto nodes exactly. Only M/4 interpolation sweeps are needed.
namespace {

// Q(i, j) = (cells - j, i) about the centre node.
std::size_t quarter_turn(const Grid2D& g, std::size_t idx) {
  const int n = g.nodes_per_side();
  const int i = static_cast<int>(idx % n), j = static_cast<int>(idx / n);
  return g.index(g.cells() - j, i);
}

std::vector<Rotation> first_quarter(int samples) {
  auto rots = uniform_rotations(samples);
  rots.resize(static_cast<std::size_t>(samples / 4));
  return rots;
}

}  // namespace

ScalarField2D angular_average_scalar(const ScalarField2D& f, int samples, Interpolation interp) {
  if (samples % 4 != 0) {
    ScalarField2D out = rotate_scalar(f, uniform_rotations(samples), interp);
    for (double& x : out.values()) x /= samples;
    return out;
  }
  const ScalarField2D part = rotate_scalar(f, first_quarter(samples), interp);
  const Grid2D& g = f.grid();
  ScalarField2D out(g);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    double sum = 0.0;
    bool ok = true;
    std::size_t q = k;
    for (int turn = 0; turn < 4 && ok; ++turn, q = quarter_turn(g, q)) {
      ok = part.mask()[q] != 0;
      sum += part.values()[q];
    }
    if (!ok) continue;
    out.values()[k] = sum / samples;
    out.mask()[k] = 1;
  }
  return out;
}

SymMatrixField2D angular_average_matrix(const SymMatrixField2D& f, int samples,
                                        Interpolation interp) {
  if (samples % 4 != 0) {
    SymMatrixField2D out = rotate_matrix(f, uniform_rotations(samples), interp);
    for (auto* comp : {&out.a11(), &out.a12(), &out.a22()})
      for (double& x : *comp) x /= samples;
    return out;
  }
  const SymMatrixField2D part = rotate_matrix(f, first_quarter(samples), interp);
  const Grid2D& g = f.grid();
  SymMatrixField2D out(g);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    Sym2 sum;
    bool ok = true;
    std::size_t q = k;
    for (int turn = 0; turn < 4 && ok; ++turn, q = quarter_turn(g, q)) {
      ok = part.mask()[q] != 0;
      // Q^T A Q cycles with the turn count: identity, swap, identity, swap.
      const Sym2 a{part.a11()[q], part.a12()[q], part.a22()[q]};
      const Sym2 c = turn % 2 == 0 ? a : Sym2{a.a22, -a.a12, a.a11};
      sum.a11 += c.a11;
      sum.a12 += c.a12;
      sum.a22 += c.a22;
    }
    if (!ok) continue;
    out.a11()[k] = sum.a11 / samples;
    out.a12()[k] = sum.a12 / samples;
    out.a22()[k] = sum.a22 / samples;
    out.mask()[k] = 1;
  }
  return out;
}

ScalarField2D pairing_2d(const SymMatrixField2D& a, const SymMatrixField2D& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField2D out(a.grid());
  for (std::size_t k = 0; k < a.grid().node_count(); ++k) {
    if (!a.mask()[k] || !b.mask()[k]) continue;
    out.values()[k] = a.a11()[k] * b.a11()[k] + 2.0 * a.a12()[k] * b.a12()[k] + a.a22()[k] * b.a22()[k];
    out.mask()[k] = 1;
  }
  return out;
}

SymMatrixField2D cof_2d(const SymMatrixField2D& a) {
  SymMatrixField2D out(a.grid());
  out.a11() = a.a22();
  out.a22() = a.a11();
  out.a12() = a.a12();
  for (double& x : out.a12()) x = -x;
  out.mask() = a.mask();
  return out;
}

ScalarField2D det_2d(const SymMatrixField2D& a) {
  ScalarField2D out(a.grid());
  for (std::size_t k = 0; k < a.grid().node_count(); ++k) {
    if (!a.mask()[k]) continue;
    out.values()[k] = a.a11()[k] * a.a22()[k] - a.a12()[k] * a.a12()[k];
    out.mask()[k] = 1;
  }
  return out;
}

ScalarField2D combine(double a, const ScalarField2D& f, double b, const ScalarField2D& g) {
  require_same_grid(f.grid(), g.grid());
  ScalarField2D out(f.grid());
  for (std::size_t k = 0; k < f.grid().node_count(); ++k) {
    if (!f.mask()[k] || !g.mask()[k]) continue;
    out.values()[k] = a * f.values()[k] + b * g.values()[k];
    out.mask()[k] = 1;
  }
  return out;
}

ScalarField2D pointwise_product(const ScalarField2D& f, const ScalarField2D& g) {
  require_same_grid(f.grid(), g.grid());
  ScalarField2D out(f.grid());
  for (std::size_t k = 0; k < f.grid().node_count(); ++k) {
    if (!f.mask()[k] || !g.mask()[k]) continue;
    out.values()[k] = f.values()[k] * g.values()[k];
    out.mask()[k] = 1;
  }
  return out;
}

SymMatrixField2D scale(double a, const SymMatrixField2D& f) {
  SymMatrixField2D out = f;
  for (auto* comp : {&out.a11(), &out.a12(), &out.a22()})
    for (double& x : *comp) x *= a;
  return out;
}

AreaIntegral integral_2d(const ScalarField2D& g) {
  return integral_2d_weighted(g, [](double) { return 1.0; });
}

AreaIntegral integral_2d_weighted(const ScalarField2D& g, const std::function<double(double)>& w) {
  const Grid2D& grid = g.grid();
  const int n = grid.nodes_per_side();
  const double cell = grid.spacing() * grid.spacing();
  double total = 0.0;
  std::size_t count = 0;
  for (int j = 0; j < n; ++j) {
    double row = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!g.valid(i, j)) continue;
      ++count;
      row += w(std::hypot(grid.coord(i), grid.coord(j))) * g(i, j);
    }
    total += row;
  }
  return {total * cell, static_cast<double>(count) * cell / std::numbers::pi};
}

double l2_norm_2d(const ScalarField2D& g) {
  const double cell = g.grid().spacing() * g.grid().spacing();
  double acc = 0.0;
  for (std::size_t k = 0; k < g.grid().node_count(); ++k)
    if (g.mask()[k]) acc += g.values()[k] * g.values()[k];
  return std::sqrt(acc * cell);
}

double l2_norm_2d(const SymMatrixField2D& g) {
  const double cell = g.grid().spacing() * g.grid().spacing();
  double acc = 0.0;
  for (std::size_t k = 0; k < g.grid().node_count(); ++k)
    if (g.mask()[k])
      acc += g.a11()[k] * g.a11()[k] + 2.0 * g.a12()[k] * g.a12()[k] + g.a22()[k] * g.a22()[k];
  return std::sqrt(acc * cell);
}

namespace {

template <class Diff>
FieldDifference compare(const Grid2D& grid, const std::vector<std::uint8_t>& ma,
                        const std::vector<std::uint8_t>& mb, double min_radius, Diff diff) {
  FieldDifference out;
  const int n = grid.nodes_per_side();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const std::size_t k = grid.index(i, j);
      if (!ma[k] || !mb[k]) continue;
      if (min_radius > 0.0 && std::hypot(grid.coord(i), grid.coord(j)) < min_radius) continue;
      out.max_abs = std::max(out.max_abs, diff(k));
      ++out.nodes;
    }
  return out;
}

}  // namespace

FieldDifference max_abs_difference(const ScalarField2D& f, const ScalarField2D& g,
                                   double min_radius) {
  require_same_grid(f.grid(), g.grid());
  return compare(f.grid(), f.mask(), g.mask(), min_radius,
                 [&](std::size_t k) { return std::abs(f.values()[k] - g.values()[k]); });
}

FieldDifference max_abs_difference(const SymMatrixField2D& f, const SymMatrixField2D& g,
                                   double min_radius) {
  require_same_grid(f.grid(), g.grid());
  return compare(f.grid(), f.mask(), g.mask(), min_radius, [&](std::size_t k) {
    return std::max({std::abs(f.a11()[k] - g.a11()[k]), std::abs(f.a12()[k] - g.a12()[k]),
                     std::abs(f.a22()[k] - g.a22()[k])});
  });
}

double max_abs(const ScalarField2D& f) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.grid().node_count(); ++k)
    if (f.mask()[k]) m = std::max(m, std::abs(f.values()[k]));
  return m;
}

double max_abs(const SymMatrixField2D& f) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.grid().node_count(); ++k)
    if (f.mask()[k])
      m = std::max({m, std::abs(f.a11()[k]), std::abs(f.a12()[k]), std::abs(f.a22()[k])});
  return m;
}

// ---------------------------------------------------------------------- IO

void write_field_csv(const ScalarField2D& f, std::ostream& out) {
  const Grid2D& g = f.grid();
  out << "x,y,value\n" << std::setprecision(17);
  const int n = g.nodes_per_side();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (f.valid(i, j)) out << g.coord(i) << ',' << g.coord(j) << ',' << f(i, j) << '\n';
}

namespace {

template <class T>
void put_le(std::ostream& out, T bits) {
  for (std::size_t b = 0; b < sizeof(T); ++b)
    out.put(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

template <class T>
T get_le(std::istream& in) {
  T bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw InvalidInput("truncated binary field");
    bits |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return bits;
}

}  // namespace

void write_field_binary(const ScalarField2D& f, std::ostream& out) {
  const auto n = static_cast<std::uint32_t>(f.grid().nodes_per_side());
  put_le<std::uint32_t>(out, n);
  put_le<std::uint32_t>(out, n);
  for (std::size_t k = 0; k < f.grid().node_count(); ++k) {
    const double v = f.mask()[k] ? f.values()[k] : std::numeric_limits<double>::quiet_NaN();
    put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
}

ScalarField2D read_field_binary(std::istream& in, double margin) {
  const auto nx = get_le<std::uint32_t>(in);
  const auto ny = get_le<std::uint32_t>(in);
  if (nx != ny || nx < 2) throw InvalidInput("binary field must be square");
  ScalarField2D f(Grid2D::with_cells(static_cast<int>(nx) - 1, margin));
  for (std::size_t k = 0; k < f.grid().node_count(); ++k) {
    const double v = std::bit_cast<double>(get_le<std::uint64_t>(in));
    if (std::isnan(v)) continue;
    f.values()[k] = v;
    f.mask()[k] = 1;
  }
  return f;
}

}  // namespace vklab
