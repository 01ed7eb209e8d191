#include "vklab/bump.hpp"

#include <algorithm>
#include <cmath>

#include "vklab/errors.hpp"

namespace vklab {

namespace {

// Past this 1/q the bump is below exp(-599) and is treated as zero, which
// also keeps the 1/q^4 factors of the derivatives finite.
constexpr double kMaxInverseGap = 600.0;

constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace

Mollifier::Mollifier(double half_width) : a_(half_width) {
  if (!(half_width > 0.0)) throw InvalidInput("mollifier half-width must be positive");
}

double Mollifier::value(double s) const {
  const double u = s / a_;
  const double q = 1.0 - u * u;
  if (q <= 0.0 || 1.0 / q > kMaxInverseGap) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

double Mollifier::d1(double s) const {
  const double u = s / a_;
  const double q = 1.0 - u * u;
  if (q <= 0.0 || 1.0 / q > kMaxInverseGap) return 0.0;
  const double e = std::exp(1.0 - 1.0 / q);
  return e * (-2.0 * s / (a_ * a_)) / (q * q);
}

double Mollifier::d2(double s) const {
  const double u = s / a_;
  const double q = 1.0 - u * u;
  if (q <= 0.0 || 1.0 / q > kMaxInverseGap) return 0.0;
  const double e = std::exp(1.0 - 1.0 / q);
  const double a2 = a_ * a_, a4 = a2 * a2;
  const double q2 = q * q;
  return e * (4.0 * s * s / (a4 * q2 * q2) - 2.0 / (a2 * q2) - 8.0 * s * s / (a4 * q2 * q));
}

MollifierIntegral::MollifierIntegral() {
  cumulative_.resize(kPanels + 1);
  cumulative_[0] = 0.0;
  const double step = 2.0 / kPanels;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = -1.0 + i * step;
    cumulative_[i + 1] = cumulative_[i] + panel_integral(lo, lo + step);
  }
}

double MollifierIntegral::panel_integral(double lo, double hi) const {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k)
    acc += kGaussWeights[k] * eta_.value(mid + half * kGaussNodes[k]);
  return acc * half;
}

double MollifierIntegral::operator()(double s) const {
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return total();
  const double step = 2.0 / kPanels;
  const int i = std::clamp(static_cast<int>((s + 1.0) / step), 0, kPanels - 1);
  const double lo = -1.0 + i * step;
  return cumulative_[i] + panel_integral(lo, s);
}

const MollifierIntegral& unit_mollifier_integral() {
  static const MollifierIntegral instance;
  return instance;
}

}  // namespace vklab
