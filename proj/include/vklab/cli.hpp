#pragma once

// Command implementations behind the `vklab` executable. Each returns the
// process exit code: 0 pass, 1 FAIL verdict, 2 configuration error,
// 3 numerical failure. Progress and errors go to `log`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "vklab/errors.hpp"
#include "vklab/radial.hpp"

namespace vklab {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitNumeric = 3 };

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  /// Built-in name, profile CSV path, or family spec path. Empty: the family
  /// given by `config`, else family-default.
  std::string profile;
  std::optional<std::string> config;  ///< family spec file
  std::filesystem::path out_dir;      ///< --out, else $VKLAB_OUT, else "."
  std::optional<std::size_t> grid_j;
  std::optional<double> grid_h;
  std::optional<int> angles;
  double margin = 0.05;
  std::optional<double> tol_adm;
  std::optional<double> tol_stat;
  std::uint64_t seed = 1;
  std::optional<int> members;
  int levels = 3;

  /// Throws ConfigError.
  void validate() const;
};

/// "2/512" or a decimal. Throws ConfigError.
double parse_spacing(const std::string& text);

/// --out if set, else $VKLAB_OUT, else the current directory.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag);

/// Resolves RunConfig::profile / config to a profile on a J-point grid.
RadialProfile load_profile(const RunConfig& config);

int cmd_verify_stationarity(const RunConfig& config, std::ostream& log);
int cmd_verify_averaging(const RunConfig& config, std::ostream& log);
int cmd_multiplicity(const RunConfig& config, std::ostream& log);
int cmd_convergence(const RunConfig& config, std::ostream& log);

/// Dispatches on config.command; an unknown command is a configuration error.
int run_command(const RunConfig& config, std::ostream& log);

}  // namespace vklab
