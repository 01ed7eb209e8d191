#pragma once

#include <string>
#include <vector>

#include "vklab/radial.hpp"

namespace vklab {

/// paraboloid (t^2/2), quartic (t^4/4), constant (1), family-default.
const std::vector<std::string>& builtin_profile_names();
bool is_builtin_profile(const std::string& name);
/// Throws InvalidInput for an unknown name.
RadialProfile builtin_profile(const std::string& name,
                              RadialGrid grid = RadialGrid::cell_centered());

}  // namespace vklab
