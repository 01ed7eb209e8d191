#include "vklab/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vklab/bump.hpp"
#include "vklab/errors.hpp"
#include "vklab/rng.hpp"

namespace vklab {

double planar_tolerance(const Grid2D& grid) {
  return 5.0 * kAveragingConstant * grid.spacing() * grid.spacing();
}

const char* to_string(VariationKind kind) {
  switch (kind) {
    case VariationKind::radial_plateau: return "radial-plateau";
    case VariationKind::zero_hessian: return "zero-hessian";
    case VariationKind::rotated: return "rotated";
    case VariationKind::harmonic: return "harmonic";
    case VariationKind::custom: return "custom";
  }
  return "custom";
}

// -------------------------------------------------------------- Background

Background::Background(RadialProfile v) : v_(std::move(v)), norm_(std::sqrt(energy(v_))) {}

Background::Background(RadialProfile v, Grid2D grid) : Background(std::move(v)) {
  grid_ = grid;
  hessian_ = hessian_fd(lift_radial(v_, grid));
  cofactor_ = cof_2d(*hessian_);
  planar_norm_ = l2_norm_2d(*hessian_);
}

const Grid2D& Background::grid() const {
  if (!grid_) throw InvalidInput("background '" + v_.name() + "' has no planar grid");
  return *grid_;
}

const SymMatrixField2D& Background::hessian() const {
  if (!hessian_) throw InvalidInput("background '" + v_.name() + "' has no planar grid");
  return *hessian_;
}

const SymMatrixField2D& Background::cofactor() const {
  if (!cofactor_) throw InvalidInput("background '" + v_.name() + "' has no planar grid");
  return *cofactor_;
}

double Background::planar_norm() const {
  if (!grid_) throw InvalidInput("background '" + v_.name() + "' has no planar grid");
  return planar_norm_;
}

// ------------------------------------------------------------ measurement

namespace {

RadialProfile on_background_grid(const Background& bg, const RadialProfile& f) {
  if (f.grid() == bg.profile().grid()) return f;
  if (f.kind() == ProfileKind::analytic) return f.on_grid(bg.profile().grid());
  throw GridMismatch("variation '" + f.name() + "' is sampled on a different grid than '" +
                     bg.profile().name() + "'");
}

void require_planar_grid(const Background& bg, const ScalarField2D& f) {
  if (!(bg.grid() == f.grid())) throw GridMismatch("variation lives on a different 2D grid");
}

}  // namespace

Admissibility is_admissible(const Background& bg, const RadialProfile& f_in, double tol_adm) {
  const RadialProfile f = on_background_grid(bg, f_in);
  Admissibility out;
  out.defect = disk_l2_norm(cof_pairing_radial(bg.profile(), f));
  out.threshold = tol_adm * bg.norm() * std::sqrt(energy(f));
  out.admissible = out.defect <= out.threshold;
  return out;
}

Admissibility is_admissible(const Background& bg, const ScalarField2D& f, double tol_adm) {
  require_planar_grid(bg, f);
  const SymMatrixField2D hf = hessian_fd(f);
  Admissibility out;
  out.defect = l2_norm_2d(pairing_2d(bg.cofactor(), hf));
  out.threshold = tol_adm * bg.planar_norm() * l2_norm_2d(hf);
  out.admissible = out.defect <= out.threshold;
  return out;
}

double stationarity_defect(const Background& bg, const RadialProfile& f_in) {
  const RadialProfile f = on_background_grid(bg, f_in);
  return disk_integral(frobenius_pairing_radial(bg.profile(), f));
}

double stationarity_defect(const Background& bg, const ScalarField2D& f) {
  require_planar_grid(bg, f);
  return integral_2d(pairing_2d(bg.hessian(), hessian_fd(f))).value;
}

double checked_stationarity_defect(const Background& bg, const RadialProfile& f, double tol_adm) {
  const auto adm = is_admissible(bg, f, tol_adm);
  if (!adm.admissible) {
    std::ostringstream msg;
    msg << "variation '" << f.name() << "' is not admissible (defect " << adm.defect << " > "
        << adm.threshold << ")";
    throw NotAdmissible(msg.str());
  }
  return stationarity_defect(bg, f);
}

double checked_stationarity_defect(const Background& bg, const ScalarField2D& f, double tol_adm) {
  const auto adm = is_admissible(bg, f, tol_adm);
  if (!adm.admissible) {
    std::ostringstream msg;
    msg << "planar variation is not admissible (defect " << adm.defect << " > " << adm.threshold
        << ")";
    throw NotAdmissible(msg.str());
  }
  return stationarity_defect(bg, f);
}

Variation measure(const Background& bg, VariationKind kind, std::string label,
                  VariationPayload payload) {
  Variation var{kind, std::move(label), std::move(payload)};
  if (auto* f = std::get_if<RadialProfile>(&var.payload)) {
    *f = on_background_grid(bg, *f);
    var.admissibility_defect = disk_l2_norm(cof_pairing_radial(bg.profile(), *f));
    var.stationarity_defect = disk_integral(frobenius_pairing_radial(bg.profile(), *f));
    var.norm_f = std::sqrt(energy(*f));
  } else {
    const auto& f2 = std::get<ScalarField2D>(var.payload);
    require_planar_grid(bg, f2);
    const SymMatrixField2D hf = hessian_fd(f2);
    var.admissibility_defect = l2_norm_2d(pairing_2d(bg.cofactor(), hf));
    var.stationarity_defect = integral_2d(pairing_2d(bg.hessian(), hf)).value;
    var.norm_f = l2_norm_2d(hf);
  }
  return var;
}

// -------------------------------------------------------------- plateaus

double default_plateau_epsilon(const RadialProfile& v) {
  return v.kind() == ProfileKind::analytic ? kPlateauEpsAnalytic : kPlateauEpsSampled;
}

std::vector<Plateau> find_plateaus(const RadialProfile& v, double eps, bool flat_curvature) {
  const auto d1 = v.first();
  const auto d2 = v.second();
  double sup1 = 0.0, sup2 = 0.0;
  for (double x : d1) sup1 = std::max(sup1, std::abs(x));
  for (double x : d2) sup2 = std::max(sup2, std::abs(x));
  const auto& g = v.grid();
  const std::size_t n = g.size();
  auto flat = [&](std::size_t j) {
    if (std::abs(d1[j]) > eps * sup1) return false;
    return !flat_curvature || std::abs(d2[j]) <= eps * sup2;
  };
  std::vector<Plateau> out;
  std::size_t j = 0;
  while (j < n) {
    if (!flat(j)) {
      ++j;
      continue;
    }
    std::size_t k = j;
    while (k + 1 < n && flat(k + 1)) ++k;
    Plateau p;
    p.first = j;
    p.last = k;
    p.lo = j == 0 ? 0.0 : g[j];
    p.hi = k + 1 == n ? 1.0 : g[k];
    out.push_back(p);
    j = k + 1;
  }
  return out;
}

namespace {

constexpr std::size_t kMinPlateauCells = 64;

RadialProfile radial_bump(std::string name, double centre, double half_width, double amplitude,
                          const RadialGrid& grid) {
  const Mollifier eta(1.0);
  const MollifierIntegral& psi = unit_mollifier_integral();
  return RadialProfile::analytic(
      std::move(name),
      [=, &psi](double t) { return amplitude * half_width * psi((t - centre) / half_width); },
      [=](double t) { return amplitude * eta.value((t - centre) / half_width); },
      [=](double t) { return amplitude * eta.d1((t - centre) / half_width) / half_width; }, grid);
}

RadialProfile constant_profile(const RadialGrid& grid) {
  return RadialProfile::analytic(
      "constant", [](double) { return 1.0; }, [](double) { return 0.0; },
      [](double) { return 0.0; }, grid);
}

}  // namespace

PlateauVariations gen_plateau_variations(const Background& bg, std::size_t count,
                                         std::uint64_t seed) {
  const RadialProfile& v = bg.profile();
  PlateauVariations out;
  out.plateaus = find_plateaus(v, default_plateau_epsilon(v));
  std::vector<Plateau> usable;
  for (const auto& p : out.plateaus)
    if (p.last - p.first + 1 >= kMinPlateauCells) usable.push_back(p);

  if (usable.empty() || count == 0) {
    out.variations.push_back(
        measure(bg, VariationKind::radial_plateau, "constant", constant_profile(v.grid())));
    return out;
  }
  out.nontrivial = true;
  for (std::size_t k = 0; k < count; ++k) {
    const Plateau& p = usable[k % usable.size()];
    auto rng = SplitMix64::split(seed, "radial-plateau", k);
    const double pad = 0.1 * p.width();
    const double lo = p.lo + pad, hi = p.hi - pad;
    const double half_width = rng.uniform(0.15, 0.45) * 0.5 * (hi - lo);
    const double centre = rng.uniform(lo + half_width, hi - half_width);
    const double amplitude = rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    std::ostringstream label;
    label << "plateau[" << p.lo << "," << p.hi << "]#" << k;
    out.variations.push_back(measure(bg, VariationKind::radial_plateau, label.str(),
                                     radial_bump(label.str(), centre, half_width, amplitude,
                                                 v.grid())));
  }
  return out;
}

std::vector<Variation> gen_zero_hessian_variations(const Background& bg, std::size_t count,
                                                   std::uint64_t seed) {
  const RadialProfile& v = bg.profile();
  const Grid2D& grid = bg.grid();
  const double h = grid.spacing();
  // Room for the FD stencil plus the cubic interpolation stencil of a later
  // angular average, so neither reaches where Hess V != 0.
  const double room = 5.0 * h;
  const double min_half = 6.0 * h, max_half = 0.1;

  struct Annulus {
    double inner;  // smallest admissible centre radius
    double outer;  // largest admissible centre radius + sqrt(2) w
    bool disk;
  };
  std::vector<Annulus> usable;
  for (const auto& p : find_plateaus(v, default_plateau_epsilon(v), true)) {
    const bool disk = p.lo == 0.0;
    const double inner = disk ? 0.0 : p.lo + room;
    const double outer = std::min(p.hi, grid.mask_radius()) - room;
    const double need = disk ? std::numbers::sqrt2 * min_half : 2.0 * std::numbers::sqrt2 * min_half;
    if (outer - inner >= need) usable.push_back({inner, outer, disk});
  }
  if (usable.empty())
    throw NoPlateau("profile '" + v.name() + "' has no annulus with vanishing Hessian");

  std::vector<Variation> out;
  const Mollifier eta(1.0);
  for (std::size_t k = 0; k < count; ++k) {
    const Annulus& a = usable[k % usable.size()];
    auto rng = SplitMix64::split(seed, "zero-hessian", k);
    const double span = a.outer - a.inner;
    const double w_cap = std::min(max_half, a.disk ? span / std::numbers::sqrt2
                                                   : span / (2.0 * std::numbers::sqrt2));
    const double w = rng.uniform(min_half, std::max(min_half, w_cap));
    const double r_lo = a.disk ? 0.0 : a.inner + std::numbers::sqrt2 * w;
    const double r_hi = a.outer - std::numbers::sqrt2 * w;
    const double r = rng.uniform(r_lo, std::max(r_lo, r_hi));
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double cx = r * std::cos(theta), cy = r * std::sin(theta);
    const double amplitude = rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    auto f = sample_field(grid, [=](double x, double y) {
      return amplitude * eta.value((x - cx) / w) * eta.value((y - cy) / w);
    });
    std::ostringstream label;
    label << "bump(" << cx << "," << cy << ";" << w << ")#" << k;
    out.push_back(measure(bg, VariationKind::zero_hessian, label.str(), std::move(f)));
  }
  return out;
}

bool hessian_is_isotropic(const RadialProfile& v) {
  const auto& g = v.grid();
  double sup2 = 0.0, gap = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    sup2 = std::max(sup2, std::abs(v.second()[j]));
    gap = std::max(gap, std::abs(v.second()[j] - v.first()[j] / g[j]));
  }
  return gap <= 1e-9 * (1.0 + sup2);
}

std::vector<Variation> gen_harmonic_variations(const Background& bg, int max_degree) {
  std::vector<Variation> out;
  for (int m = 2; m <= max_degree; ++m) {
    for (int part = 0; part < 2; ++part) {
      auto f = sample_field(bg.grid(), [=](double x, double y) {
        const double r = std::hypot(x, y), th = std::atan2(y, x);
        const double rm = std::pow(r, m);
        return part == 0 ? rm * std::cos(m * th) : rm * std::sin(m * th);
      });
      std::string label = std::string(part == 0 ? "Re" : "Im") + " z^" + std::to_string(m);
      out.push_back(measure(bg, VariationKind::harmonic, label, std::move(f)));
    }
  }
  return out;
}

Variation symmetrize_variation(const Background& bg, const ScalarField2D& f, int samples) {
  return measure(bg, VariationKind::rotated, "average", angular_average_scalar(f, samples));
}

// ----------------------------------------------------------- verification

std::size_t StationarityReport::admissible_count() const {
  return static_cast<std::size_t>(
      std::count_if(variations.begin(), variations.end(), [](const auto& r) { return r.admissible; }));
}

namespace {

VariationRecord judge(const Variation& var, double norm_v, double tol_adm, double tol_stat) {
  VariationRecord rec;
  rec.kind = var.kind;
  rec.label = var.label;
  rec.planar = !var.radial();
  rec.adm_defect = var.admissibility_defect;
  rec.stat_defect = var.stationarity_defect;
  rec.norm_f = var.norm_f;
  const double scale = norm_v * var.norm_f;
  rec.normalized = scale > 0.0 ? std::abs(var.stationarity_defect) / scale
                               : std::abs(var.stationarity_defect);
  rec.admissible = var.admissibility_defect <= tol_adm * scale;
  rec.pass = rec.admissible && rec.normalized <= tol_stat;
  return rec;
}

}  // namespace

StationarityReport verify_proposition(const RadialProfile& v, const VerifyConfig& cfg) {
  std::optional<Background> bg_storage;
  if (cfg.planar)
    bg_storage.emplace(v, Grid2D::with_cells(cfg.planar_cells, cfg.margin));
  else
    bg_storage.emplace(v);
  const Background& bg = *bg_storage;

  StationarityReport report;
  report.profile = v.name();
  report.seed = cfg.seed;
  report.tolerances.adm_radial = cfg.tol_adm;
  report.tolerances.stat_radial = cfg.tol_stat;
  if (cfg.planar) {
    const double tp = cfg.tol_planar.value_or(planar_tolerance(bg.grid()));
    report.tolerances.adm_planar = tp;
    report.tolerances.stat_planar = tp;
  }

  auto add = [&](const Variation& var) {
    if (var.radial())
      report.variations.push_back(judge(var, bg.norm(), report.tolerances.adm_radial,
                                        report.tolerances.stat_radial));
    else
      report.variations.push_back(judge(var, bg.planar_norm(), report.tolerances.adm_planar,
                                        report.tolerances.stat_planar));
  };

  const auto plateau = gen_plateau_variations(bg, cfg.radial_count, cfg.seed);
  for (const auto& var : plateau.variations) add(var);
  if (!plateau.nontrivial) report.notes.push_back("no nontrivial radial admissible directions");

  bool planar_nontrivial = false;
  if (cfg.planar) {
    try {
      const auto zero = gen_zero_hessian_variations(bg, cfg.planar_count, cfg.seed);
      for (const auto& var : zero) add(var);
      for (std::size_t k = 0; k < std::min(cfg.symmetrized_count, zero.size()); ++k)
        add(symmetrize_variation(bg, std::get<ScalarField2D>(zero[k].payload), cfg.angles));
      planar_nontrivial = !zero.empty();
    } catch (const NoPlateau&) {
      report.notes.push_back(
          "no annulus with vanishing Hessian: zero-hessian and rotated classes skipped");
    }
    if (hessian_is_isotropic(v))
      for (const auto& var : gen_harmonic_variations(bg)) add(var);
  }
  if (!plateau.nontrivial && !planar_nontrivial)
    report.notes.push_back("only trivial/harmonic variation classes available");

  for (const auto& c : cfg.custom) {
    if (std::holds_alternative<ScalarField2D>(c.payload) && !cfg.planar)
      throw InvalidInput("planar custom variation needs the planar path enabled");
    add(measure(bg, VariationKind::custom, c.label, c.payload));
  }

  std::size_t excluded = 0;
  report.verdict = true;
  for (const auto& rec : report.variations) {
    if (!rec.admissible) {
      ++excluded;
      continue;
    }
    report.verdict = report.verdict && rec.pass;
  }
  if (excluded > 0)
    report.notes.push_back(std::to_string(excluded) +
                           " inadmissible variation(s) reported and excluded from the verdict");
  return report;
}

nlohmann::ordered_json to_json(const StationarityReport& report) {
  nlohmann::ordered_json j;
  j["profile"] = report.profile;
  j["seed"] = report.seed;
  j["tolerances"] = {
      {"adm", {{"radial", report.tolerances.adm_radial}, {"planar", report.tolerances.adm_planar}}},
      {"stat",
       {{"radial", report.tolerances.stat_radial}, {"planar", report.tolerances.stat_planar}}}};
  auto vars = nlohmann::ordered_json::array();
  for (const auto& rec : report.variations) {
    nlohmann::ordered_json r;
    r["kind"] = to_string(rec.kind);
    r["adm_defect"] = rec.adm_defect;
    r["stat_defect"] = rec.stat_defect;
    r["norm_f"] = rec.norm_f;
    r["normalized"] = rec.normalized;
    if (rec.admissible)
      r["pass"] = rec.pass;
    else
      r["pass"] = nullptr;
    vars.push_back(std::move(r));
  }
  j["variations"] = std::move(vars);
  j["notes"] = report.notes;
  j["verdict"] = report.verdict ? "PASS" : "FAIL";
  return j;
}

}  // namespace vklab
