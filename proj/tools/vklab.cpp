#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "vklab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification lab for the constrained von Karman functional on the unit disk"};
  app.require_subcommand(1);

  vklab::RunConfig cfg;
  std::optional<std::string> config, out, grid_h;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--profile", cfg.profile, "built-in name, profile CSV, or family spec file");
    sub->add_option("--config", config, "family spec file");
    sub->add_option("--out", out, "output directory (default $VKLAB_OUT, else .)");
    sub->add_option("--grid-j", cfg.grid_j, "radial cells J (power of two)");
    sub->add_option("--grid-h", grid_h, "planar spacing, e.g. 2/512");
    sub->add_option("--angles-m", cfg.angles, "rotations per average");
    sub->add_option("--margin", cfg.margin, "planar mask margin");
    sub->add_option("--seed", cfg.seed, "variation seed");
    sub->add_option("--tol-adm", cfg.tol_adm, "admissibility tolerance (radial path)");
    sub->add_option("--tol-stat", cfg.tol_stat, "stationarity tolerance (radial path)");
    sub->add_option("--members", cfg.members, "family members to flip");
    sub->add_option("--levels", cfg.levels, "refinement levels for convergence");
  };
  for (const char* name : {"verify-stationarity", "verify-averaging", "multiplicity", "convergence"})
    add_common(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return vklab::kExitConfig;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.config = config;
  cfg.out_dir = vklab::resolve_out_dir(out);
  if (grid_h) {
    try {
      cfg.grid_h = vklab::parse_spacing(*grid_h);
    } catch (const vklab::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return vklab::kExitConfig;
    }
  }
  return vklab::run_command(cfg, std::cerr);
}
