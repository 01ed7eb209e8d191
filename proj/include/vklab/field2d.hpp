#pragma once

// Disk-masked fields on a uniform Cartesian grid over [-1,1]^2, finite
// difference Hessians, rotation pullbacks and angular averaging.
//
// Storage is row-major with the row index running along y: node (i, j) sits
// at (x, y) = (-1 + i h, -1 + j h) and lives at offset j * n + i.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vklab/radial.hpp"

namespace vklab {

inline constexpr double kDefaultMargin = 0.05;
inline constexpr int kDefaultCells2D = 512;
inline constexpr int kDefaultAngles = 256;
inline constexpr int kMinNodesAcross = 64;

class Grid2D {
 public:
  /// Spacing h must divide 2 (to 1e-9); margin >= 2h.
  explicit Grid2D(double spacing = 2.0 / kDefaultCells2D, double margin = kDefaultMargin);
  static Grid2D with_cells(int cells, double margin = kDefaultMargin);

  int cells() const { return cells_; }
  int nodes_per_side() const { return cells_ + 1; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(nodes_per_side()) * static_cast<std::size_t>(nodes_per_side());
  }
  double spacing() const { return h_; }
  double margin() const { return margin_; }
  double mask_radius() const { return 1.0 - margin_; }

  double coord(int i) const { return -1.0 + i * h_; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nodes_per_side()) +
           static_cast<std::size_t>(i);
  }
  /// Node inside the disk |x| <= 1 - margin.
  bool in_mask(int i, int j) const;
  /// Grid node coinciding with (x, y), if any.
  std::optional<std::pair<int, int>> node_at(double x, double y) const;

  /// Same grid with half the spacing and the same margin.
  Grid2D refined() const { return with_cells(2 * cells_, margin_); }

  friend bool operator==(const Grid2D& a, const Grid2D& b) {
    return a.cells_ == b.cells_ && a.margin_ == b.margin_;
  }

 private:
  int cells_;
  double h_;
  double margin_;
};

/// Components of a symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
};

inline Sym2 cof(const Sym2& a) { return {a.a22, -a.a12, a.a11}; }
inline double det(const Sym2& a) { return a.a11 * a.a22 - a.a12 * a.a12; }
inline double frobenius(const Sym2& a, const Sym2& b) {
  return a.a11 * b.a11 + 2.0 * a.a12 * b.a12 + a.a22 * b.a22;
}
/// R^T A R for the counter-clockwise rotation R by the angle with cosine c and sine s.
inline Sym2 conjugate(const Sym2& a, double c, double s) {
  return {a.a11 * c * c + 2.0 * a.a12 * c * s + a.a22 * s * s,
          -a.a11 * c * s + a.a12 * (c * c - s * s) + a.a22 * c * s,
          a.a11 * s * s - 2.0 * a.a12 * c * s + a.a22 * c * c};
}

class ScalarField2D {
 public:
  explicit ScalarField2D(Grid2D grid);

  const Grid2D& grid() const { return grid_; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  bool valid(int i, int j) const { return valid_[grid_.index(i, j)] != 0; }
  void set_valid(int i, int j, bool v) { valid_[grid_.index(i, j)] = v ? 1 : 0; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<std::uint8_t>& mask() { return valid_; }
  const std::vector<std::uint8_t>& mask() const { return valid_; }

  /// Value at the node coinciding with (x, y) when that node is valid.
  std::optional<double> value_at(double x, double y) const;
  std::size_t valid_count() const;

 private:
  Grid2D grid_;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

class SymMatrixField2D {
 public:
  explicit SymMatrixField2D(Grid2D grid);

  const Grid2D& grid() const { return grid_; }
  Sym2 at(int i, int j) const {
    const auto k = grid_.index(i, j);
    return {a11_[k], a12_[k], a22_[k]};
  }
  void set(int i, int j, const Sym2& a) {
    const auto k = grid_.index(i, j);
    a11_[k] = a.a11;
    a12_[k] = a.a12;
    a22_[k] = a.a22;
  }
  bool valid(int i, int j) const { return valid_[grid_.index(i, j)] != 0; }
  void set_valid(int i, int j, bool v) { valid_[grid_.index(i, j)] = v ? 1 : 0; }

  const std::vector<double>& a11() const { return a11_; }
  const std::vector<double>& a12() const { return a12_; }
  const std::vector<double>& a22() const { return a22_; }
  std::vector<double>& a11() { return a11_; }
  std::vector<double>& a12() { return a12_; }
  std::vector<double>& a22() { return a22_; }
  const std::vector<std::uint8_t>& mask() const { return valid_; }
  std::vector<std::uint8_t>& mask() { return valid_; }

  std::optional<Sym2> value_at(double x, double y) const;
  std::size_t valid_count() const;

 private:
  Grid2D grid_;
  std::vector<double> a11_, a12_, a22_;
  std::vector<std::uint8_t> valid_;
};

/// Angle of a rotation, reduced to [0, 2 pi).
class RotationAngle {
 public:
  explicit RotationAngle(double radians);
  double radians() const { return phi_; }

 private:
  double phi_;
};

enum class Interpolation {
  bilinear,  ///< 2x2 stencil
  cubic,     ///< tensor-product 4-point Lagrange, 4x4 stencil (default)
};

using PlanarFunction = std::function<double(double, double)>;
using PlanarMatrixFunction = std::function<Sym2(double, double)>;

/// Evaluates fn at every node inside the mask.
ScalarField2D sample_field(const Grid2D& grid, const PlanarFunction& fn);
SymMatrixField2D sample_matrix_field(const Grid2D& grid, const PlanarMatrixFunction& fn);

/// V(x) = v(|x|) at every node inside the mask.
ScalarField2D lift_radial(const RadialProfile& v, const Grid2D& grid);
ScalarField2D lift_radial(const RadialProfile& v, double spacing, double margin = kDefaultMargin);

/// Exact Hessian of V(x) = v(|x|): v'' n n^T + (v'/r)(I - n n^T), n = x/|x|.
SymMatrixField2D lift_radial_hessian(const RadialProfile& v, const Grid2D& grid);

/// Second-order central differences; nodes whose 3x3 stencil leaves the
/// valid set are marked invalid.
SymMatrixField2D hessian_fd(const ScalarField2D& f);

/// (f o rho_phi)(x) = f(R_phi x) by interpolation on the source grid.
ScalarField2D rotate_pullback_scalar(const ScalarField2D& f, RotationAngle phi,
                                     Interpolation interp = Interpolation::cubic);
/// (rho_phi^* F)(x) = R^T F(R x) R.
SymMatrixField2D rotate_pullback_matrix(const SymMatrixField2D& f, RotationAngle phi,
                                        Interpolation interp = Interpolation::cubic);

/// Trapezoidal average of the pullbacks over phi_m = 2 pi m / M. A node is
/// valid when every rotated image can be interpolated.
ScalarField2D angular_average_scalar(const ScalarField2D& f, int samples = kDefaultAngles,
                                     Interpolation interp = Interpolation::cubic);
SymMatrixField2D angular_average_matrix(const SymMatrixField2D& f, int samples = kDefaultAngles,
                                        Interpolation interp = Interpolation::cubic);

/// Pointwise A : B = a11 b11 + 2 a12 b12 + a22 b22.
ScalarField2D pairing_2d(const SymMatrixField2D& a, const SymMatrixField2D& b);
SymMatrixField2D cof_2d(const SymMatrixField2D& a);
ScalarField2D det_2d(const SymMatrixField2D& a);

/// a f + b g on the common valid set.
ScalarField2D combine(double a, const ScalarField2D& f, double b, const ScalarField2D& g);
ScalarField2D pointwise_product(const ScalarField2D& f, const ScalarField2D& g);
SymMatrixField2D scale(double a, const SymMatrixField2D& f);

struct AreaIntegral {
  double value = 0.0;
  double covered_fraction = 0.0;  ///< valid-node area divided by pi
};

/// Sum over valid nodes of g h^2.
AreaIntegral integral_2d(const ScalarField2D& g);
/// Sum over valid nodes of w(|x|) g h^2.
AreaIntegral integral_2d_weighted(const ScalarField2D& g, const std::function<double(double)>& w);

double l2_norm_2d(const ScalarField2D& g);
/// Frobenius L^2 norm.
double l2_norm_2d(const SymMatrixField2D& g);

struct FieldDifference {
  double max_abs = 0.0;
  std::size_t nodes = 0;  ///< common valid nodes compared
};

/// Max |f - g| over common valid nodes, optionally restricted to |x| >= min_radius.
FieldDifference max_abs_difference(const ScalarField2D& f, const ScalarField2D& g,
                                   double min_radius = 0.0);
/// Max entrywise difference of two matrix fields.
FieldDifference max_abs_difference(const SymMatrixField2D& f, const SymMatrixField2D& g,
                                   double min_radius = 0.0);
double max_abs(const ScalarField2D& f);
double max_abs(const SymMatrixField2D& f);

/// CSV `x,y,value`, valid nodes only.
void write_field_csv(const ScalarField2D& f, std::ostream& out);
/// Two little-endian uint32 dims (nx, ny), then nx*ny little-endian float64
/// values in row-major order (rows along y); invalid nodes are NaN.
void write_field_binary(const ScalarField2D& f, std::ostream& out);
ScalarField2D read_field_binary(std::istream& in, double margin = kDefaultMargin);

}  // namespace vklab
