#pragma once

#include <array>
#include <vector>

namespace vklab {

/// Smooth bump eta(s) = exp(1 - 1/(1 - (s/a)^2)) for |s| < a, 0 otherwise.
/// Nonnegative, maximum 1 at s = 0, every derivative vanishes at |s| = a.
/// Derivatives are closed form.
class Mollifier {
 public:
  explicit Mollifier(double half_width = 1.0);

  double half_width() const { return a_; }
  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;
  static constexpr double max_value() { return 1.0; }

 private:
  double a_;
};

/// Psi(s) = integral of the unit mollifier over [-1, s]; Psi(1) is total().
/// Cumulative Gauss-Legendre table, accurate to rounding.
class MollifierIntegral {
 public:
  MollifierIntegral();
  double operator()(double s) const;
  double total() const { return cumulative_.back(); }

 private:
  static constexpr int kPanels = 512;
  double panel_integral(double lo, double hi) const;
  Mollifier eta_{1.0};
  std::vector<double> cumulative_;
};

/// Shared instance (immutable after construction).
const MollifierIntegral& unit_mollifier_integral();

}  // namespace vklab
