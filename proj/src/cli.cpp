#include "vklab/cli.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "vklab/averaging.hpp"
#include "vklab/convergence.hpp"
#include "vklab/multiplicity.hpp"
#include "vklab/profiles.hpp"
#include "vklab/stationarity.hpp"

namespace vklab {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (grid_j && (*grid_j < 4 || !std::has_single_bit(*grid_j)))
    throw ConfigError("--grid-j must be a power of two >= 4");
  if (grid_h && !(*grid_h > 0.0 && *grid_h <= 1.0)) throw ConfigError("--grid-h must lie in (0, 1]");
  if (angles && *angles < 1) throw ConfigError("--angles-m must be positive");
  if (!(margin > 0.0 && margin < 1.0)) throw ConfigError("margin must lie in (0, 1)");
  if (tol_adm && !(*tol_adm > 0.0)) throw ConfigError("--tol-adm must be positive");
  if (tol_stat && !(*tol_stat > 0.0)) throw ConfigError("--tol-stat must be positive");
  if (members && *members < 0) throw ConfigError("--members must be non-negative");
  if (levels < 2) throw ConfigError("--levels must be at least 2: a single resolution has no order");
}

double parse_spacing(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("bad grid spacing '" + text + "'");
    return x;
  };
  const auto slash = text.find('/');
  const double h = slash == std::string::npos
                       ? number(text)
                       : number(text.substr(0, slash)) / number(text.substr(slash + 1));
  if (!std::isfinite(h) || !(h > 0.0)) throw ConfigError("bad grid spacing '" + text + "'");
  return h;
}

fs::path resolve_out_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("VKLAB_OUT"); env && *env) return env;
  return ".";
}

namespace {

RadialGrid radial_grid(const RunConfig& cfg) {
  return RadialGrid::cell_centered(cfg.grid_j.value_or(kDefaultRadialCells));
}

int planar_cells(const RunConfig& cfg) {
  if (!cfg.grid_h) return kDefaultCells2D;
  const double cells = 2.0 / *cfg.grid_h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * cells)
    throw ConfigError("--grid-h must divide 2 into a whole number of cells");
  return static_cast<int>(rounded);
}

fs::path prepare_out_dir(const RunConfig& cfg) {
  const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : cfg.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

VerifyConfig verify_config(const RunConfig& cfg) {
  VerifyConfig vc;
  vc.seed = cfg.seed;
  vc.planar_cells = planar_cells(cfg);
  vc.margin = cfg.margin;
  if (cfg.angles) vc.angles = *cfg.angles;
  if (cfg.tol_adm) vc.tol_adm = *cfg.tol_adm;
  if (cfg.tol_stat) vc.tol_stat = *cfg.tol_stat;
  return vc;
}

FamilySpec family_spec(const RunConfig& cfg) {
  FamilySpec spec = cfg.config ? FamilySpec::load(*cfg.config) : FamilySpec{};
  if (cfg.members) {
    spec.members = *cfg.members;
    spec.validate();
  }
  return spec;
}

template <class Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const SpecInvalid& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const IndexOutOfRange& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const InvalidInput& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const ResolutionTooCoarse& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const GridMismatch& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}

void print_stationarity(const StationarityReport& r, std::ostream& log) {
  std::size_t passed = 0, excluded = 0;
  double worst = 0.0;
  for (const auto& v : r.variations) {
    if (!v.admissible) {
      ++excluded;
      continue;
    }
    if (v.pass) ++passed;
    worst = std::max(worst, v.normalized);
  }
  log << r.profile << ": " << r.variations.size() << " variations, " << passed << " pass, "
      << excluded << " inadmissible (excluded); worst normalized defect " << worst << '\n';
  for (const auto& note : r.notes) log << "  note: " << note << '\n';
}

}  // namespace

RadialProfile load_profile(const RunConfig& cfg) {
  RadialProfile v = [&] {
    if (cfg.profile.empty()) {
      if (cfg.config) return build_base_profile(FamilySpec::load(*cfg.config), radial_grid(cfg));
      return builtin_profile("family-default", radial_grid(cfg));
    }
    if (is_builtin_profile(cfg.profile)) return builtin_profile(cfg.profile, radial_grid(cfg));
    const fs::path path(cfg.profile);
    if (!fs::is_regular_file(path))
      throw ConfigError("'" + cfg.profile + "' is neither a built-in profile nor a readable file");
    if (path.extension() == ".csv") return read_profile_csv(path.string());
    return build_base_profile(FamilySpec::load(path.string()), radial_grid(cfg))
        .renamed(path.filename().string());
  }();
  v.check_invariants();
  return v;
}

int cmd_verify_stationarity(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    const RadialProfile v = load_profile(cfg);
    const VerifyConfig vc = verify_config(cfg);
    const StationarityReport report = verify_proposition(v, vc);
    const fs::path dir = prepare_out_dir(cfg);
    write_json(dir / "stationarity.json", to_json(report));
    print_stationarity(report, log);
    log << "verdict " << (report.verdict ? "PASS" : "FAIL") << " -> "
        << (dir / "stationarity.json").string() << '\n';
    return report.verdict ? kExitPass : kExitFail;
  });
}

int cmd_verify_averaging(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    AveragingConfig ac;
    ac.cells = planar_cells(cfg);
    if (cfg.angles) ac.angles = *cfg.angles;
    ac.margin = cfg.margin;
    const AveragingReport report = verify_averaging(ac);
    const fs::path dir = prepare_out_dir(cfg);
    write_json(dir / "averaging.json", to_json(report));
    std::size_t passed = 0;
    for (const auto& c : report.checks) {
      if (c.pass) {
        ++passed;
        continue;
      }
      log << "  FAIL " << c.identity << " on " << c.function << ": fine residual " << c.fine
          << " (bound " << c.bound << "), order " << c.order << '\n';
    }
    log << passed << "/" << report.checks.size() << " identity checks pass; verdict "
        << (report.verdict ? "PASS" : "FAIL") << " -> " << (dir / "averaging.json").string() << '\n';
    return report.verdict ? kExitPass : kExitFail;
  });
}

int cmd_multiplicity(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    const FamilySpec spec = family_spec(cfg);
    const VerifyConfig vc = verify_config(cfg);
    const std::string name =
        cfg.config ? fs::path(*cfg.config).filename().string() : std::string("family-default");
    const MultiplicityReport report =
        run_multiplicity_experiment(spec, spec.members, vc, radial_grid(cfg), name);
    const fs::path dir = prepare_out_dir(cfg);
    write_json(dir / "multiplicity.json", to_json(report));

    const RadialProfile base = build_base_profile(spec, radial_grid(cfg)).renamed(name);
    std::vector<RadialProfile> members;
    write_profile_csv(base, (dir / "member_0.csv").string());
    for (int n = 1; n <= spec.members; ++n) {
      members.push_back(flip(base, spec, n).profile);
      write_profile_csv(members.back(), (dir / ("member_" + std::to_string(n) + ".csv")).string());
    }
    std::ofstream plot(dir / "family_plot.csv", std::ios::binary);
    if (!plot) throw ConfigError("cannot write family_plot.csv");
    plot << "t,v";
    for (int n = 1; n <= spec.members; ++n) plot << ",u_" << n;
    plot << ",k,density\n";
    const RadialField k = det_hessian_radial(base);
    const RadialField density = energy_density_radial(base);
    plot << std::setprecision(17);
    for (std::size_t j = 0; j < base.grid().size(); ++j) {
      plot << base.grid()[j] << ',' << base.values()[j];
      for (const auto& u : members) plot << ',' << u.values()[j];
      plot << ',' << k.values[j] << ',' << density.values[j] << '\n';
    }

    log << "depth N = " << report.depth << ", members = " << spec.members << '\n';
    print_stationarity(report.base, log);
    for (const auto& m : report.members) {
      log << "u_" << m.member.index << " on (" << m.member.lo << ", " << m.member.hi
          << "): det " << (m.det.pass() ? "equal" : "DIFFERENT") << ", energy "
          << (m.energy.pass() ? "equal" : "DIFFERENT") << ", stationarity "
          << (m.stationarity.verdict ? "PASS" : "FAIL") << '\n';
    }
    if (!report.members.empty())
      log << "min separation " << report.separation.min_separation << " (expected "
          << report.expected_separation << ")\n";
    log << "verdict " << (report.verdict ? "PASS" : "FAIL") << " -> "
        << (dir / "multiplicity.json").string() << '\n';
    return report.verdict ? kExitPass : kExitFail;
  });
}

int cmd_convergence(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    RunConfig base_cfg = cfg;
    base_cfg.grid_j.reset();  // the study sets its own levels
    const RadialProfile v = load_profile(base_cfg);
    ConvergenceConfig cc;
    if (cfg.grid_j) cc.radial_cells = *cfg.grid_j;
    cc.planar_cells = planar_cells(cfg);
    cc.margin = cfg.margin;
    cc.levels = cfg.levels;
    const ConvergenceReport report = run_convergence(v, cc);
    const fs::path dir = prepare_out_dir(cfg);
    write_json(dir / "convergence.json", to_json(report));
    for (const auto& c : report.checks) {
      log << "  " << (c.pass ? "ok  " : "FAIL") << ' ' << c.name << ": finest error "
          << c.errors.back();
      if (c.exact)
        log << " (exact)";
      else
        for (double p : c.orders) log << " order " << std::setprecision(3) << p;
      log << std::setprecision(6) << '\n';
    }
    log << "verdict " << (report.verdict ? "PASS" : "FAIL") << " -> "
        << (dir / "convergence.json").string() << '\n';
    return report.verdict ? kExitPass : kExitFail;
  });
}

int run_command(const RunConfig& cfg, std::ostream& log) {
  if (cfg.command == "verify-stationarity") return cmd_verify_stationarity(cfg, log);
  if (cfg.command == "verify-averaging") return cmd_verify_averaging(cfg, log);
  if (cfg.command == "multiplicity") return cmd_multiplicity(cfg, log);
  if (cfg.command == "convergence") return cmd_convergence(cfg, log);
  log << "config error: unknown command '" << cfg.command << "'\n";
  return kExitConfig;
}

}  // namespace vklab
