#include "vklab/profiles.hpp"

#include <algorithm>

#include "vklab/errors.hpp"
#include "vklab/multiplicity.hpp"

namespace vklab {

const std::vector<std::string>& builtin_profile_names() {
  static const std::vector<std::string> names{"paraboloid", "quartic", "constant",
                                              "family-default"};
  return names;
}

bool is_builtin_profile(const std::string& name) {
  const auto& names = builtin_profile_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

RadialProfile builtin_profile(const std::string& name, RadialGrid grid) {
  if (name == "paraboloid")
    return RadialProfile::analytic(
        name, [](double t) { return 0.5 * t * t; }, [](double t) { return t; },
        [](double) { return 1.0; }, std::move(grid));
  if (name == "quartic")
    return RadialProfile::analytic(
        name, [](double t) { return 0.25 * t * t * t * t; }, [](double t) { return t * t * t; },
        [](double t) { return 3.0 * t * t; }, std::move(grid));
  if (name == "constant")
    return RadialProfile::analytic(
        name, [](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
        std::move(grid));
  if (name == "family-default")
    return build_base_profile(FamilySpec{}, std::move(grid)).renamed(name);
  throw InvalidInput("unknown profile '" + name + "'");
}

}  // namespace vklab
