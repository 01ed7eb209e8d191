#pragma once

// Radial profiles v(t), t in [0,1), of radially symmetric functions V(x) = v(|x|)
// on the unit disk, together with the closed-form radial Hessian operators.
//
// For V(x) = v(|x|) the Hessian has eigenvalues v'' (radial direction) and
// v'/t (tangential direction). Every operator below works with these two
// numbers on a quadrature grid that never touches t = 0.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vklab {

inline constexpr std::size_t kDefaultRadialCells = 4096;
inline constexpr double kTolOrigin = 1e-6;

/// Strictly increasing sample points in (0,1). Each point owns the cell
/// between the midpoints to its neighbours (the first cell starts at 0, the
/// last ends at 1), so on a cell-centered grid the quadrature is the midpoint rule.
class RadialGrid {
 public:
  /// t_j = (j + 1/2) / cells.
  static RadialGrid cell_centered(std::size_t cells = kDefaultRadialCells);

  explicit RadialGrid(std::vector<double> points);

  std::size_t size() const { return data_->points.size(); }
  double operator[](std::size_t j) const { return data_->points[j]; }
  std::span<const double> points() const { return data_->points; }
  std::span<const double> weights() const { return data_->weights; }
  bool is_cell_centered() const { return data_->cell_centered; }

  friend bool operator==(const RadialGrid& a, const RadialGrid& b);

 private:
  struct Data {
    std::vector<double> points;
    std::vector<double> weights;
    bool cell_centered = false;
  };
  explicit RadialGrid(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

enum class ProfileKind { analytic, sampled };

using Evaluator = std::function<double(double)>;

/// Scalar profile with first and second derivatives.
///
/// Analytic profiles carry evaluators for v, v', v''; sampled profiles carry
/// values on their grid and obtain derivatives by second-order finite
/// differences (or take them from a table). Samples on the grid are computed
/// once at construction; a profile is immutable afterwards.
class RadialProfile {
 public:
  static RadialProfile analytic(std::string name, Evaluator v, Evaluator d1, Evaluator d2,
                                RadialGrid grid = RadialGrid::cell_centered());
  static RadialProfile sampled(std::string name, RadialGrid grid, std::vector<double> values);
  /// Sampled profile whose derivatives are supplied rather than differenced.
  static RadialProfile tabulated(std::string name, RadialGrid grid, std::vector<double> values,
                                 std::vector<double> first, std::vector<double> second);

  ProfileKind kind() const { return data_->kind; }
  const std::string& name() const { return data_->name; }
  const RadialGrid& grid() const { return data_->grid; }

  std::span<const double> values() const { return data_->v; }
  std::span<const double> first() const { return data_->d1; }
  std::span<const double> second() const { return data_->d2; }

  /// Off-grid evaluation. Exact for analytic profiles; sampled profiles use
  /// cubic Hermite interpolation of (v, v') and linear interpolation of v''.
  double value(double t) const;
  double slope(double t) const;
  double curvature(double t) const;

  /// Re-evaluates an analytic profile on another grid.
  RadialProfile on_grid(RadialGrid grid) const;
  RadialProfile renamed(std::string name) const;

  /// Estimate of v'(0+): the evaluator at 0 for analytic profiles, quadratic
  /// extrapolation of the first three slope samples otherwise.
  double origin_slope() const;

  /// Throws InvalidInput if v'(0+) != 0 or the energy is not finite.
  void check_invariants(double tol_origin = kTolOrigin) const;

  /// Access to the evaluators of an analytic profile (throws for sampled).
  const Evaluator& eval0() const;
  const Evaluator& eval1() const;
  const Evaluator& eval2() const;

  /// Same underlying object (copies share their data).
  bool same_object(const RadialProfile& other) const { return data_ == other.data_; }

 private:
  struct Data {
    ProfileKind kind = ProfileKind::sampled;
    std::string name;
    RadialGrid grid;
    Evaluator e0, e1, e2;
    std::vector<double> v, d1, d2;
  };
  explicit RadialProfile(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

/// a*f + b*g, analytic when both operands are.
RadialProfile combine(double a, const RadialProfile& f, double b, const RadialProfile& g,
                      std::string name = {});

/// Samples of a scalar function of the radius on a profile's grid.
struct RadialField {
  RadialGrid grid;
  std::vector<double> values;

  double max_abs() const;
};

/// Second-order finite-difference derivative (order 1 or 2) of samples on a
/// grid: central three-point stencils inside, one-sided stencils at the ends.
std::vector<double> differentiate(const RadialGrid& grid, std::span<const double> values, int order);

/// k(t) = v''(t) v'(t) / t.
RadialField det_hessian_radial(const RadialProfile& v);
/// k(t) = (2t)^{-1} d/dt[(v')^2], the derivative taken by finite differences.
RadialField det_hessian_radial_product_form(const RadialProfile& v);

/// cof(Hess V) : Hess f = v'' f'/t + f'' v'/t.
RadialField cof_pairing_radial(const RadialProfile& v, const RadialProfile& f);
/// (v' f')'(t) / t, the derivative taken by finite differences.
RadialField cof_pairing_radial_product_form(const RadialProfile& v, const RadialProfile& f);

/// Hess V : Hess f = v'' f'' + v' f' / t^2.
RadialField frobenius_pairing_radial(const RadialProfile& v, const RadialProfile& f);

/// |Hess V|^2 = (v'')^2 + (v'/t)^2.
RadialField energy_density_radial(const RadialProfile& v);

/// 2*pi * sum_j g_j t_j w_j, i.e. the integral over the unit disk of g(|x|).
double disk_integral(const RadialField& g);
/// L^2(B) norm of g(|x|).
double disk_l2_norm(const RadialField& g);

/// Integral of |Hess V|^2 over the disk.
double energy(const RadialProfile& v);

/// CSV with header `t,v,v1,v2`, 17 significant digits.
void write_profile_csv(const RadialProfile& v, std::ostream& out);
void write_profile_csv(const RadialProfile& v, const std::string& path);

enum class CsvDerivatives { from_columns, recompute };

RadialProfile read_profile_csv(std::istream& in, std::string name,
                               CsvDerivatives mode = CsvDerivatives::from_columns);
RadialProfile read_profile_csv(const std::string& path,
                               CsvDerivatives mode = CsvDerivatives::from_columns);

}  // namespace vklab
