#pragma once

// Smooth planar test functions with closed-form Hessians and closed-form
// angular averages (as functions of r = |x|).

#include <functional>
#include <string>
#include <vector>

#include "vklab/field2d.hpp"

namespace vklab {

struct PlanarTestFunction {
  std::string name;
  PlanarFunction f;
  PlanarMatrixFunction hessian;
  std::function<double(double)> average;  ///< r -> mean of f over the circle |x| = r
};

/// x^2, x, x^3 - 3xy^2, exp(x + y/2), cos(2x + 0.3) cos(3y - 0.2),
/// an off-centre gaussian, a centred gaussian and x^4 - xy^3.
const std::vector<PlanarTestFunction>& planar_corpus();

const PlanarTestFunction& corpus_function(const std::string& name);

}  // namespace vklab
