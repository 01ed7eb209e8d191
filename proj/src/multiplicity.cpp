#include "vklab/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "vklab/bump.hpp"
#include "vklab/errors.hpp"

namespace vklab {

// ------------------------------------------------------------- FamilySpec

int FamilySpec::depth() const {
  if (N) return *N;
  if (sequence == SequenceRule::custom) {
    const bool leading_zero = !t.empty() && t.front() == 0.0;
    return static_cast<int>(t.size()) - (leading_zero ? 1 : 0);
  }
  for (int n = 3; n < kMaxDepth; ++n) {
    const double gap = R * std::ldexp(1.0, -(n + 1));
    if (std::pow(gap, n - 2) < kTruncationFloor) return n;
  }
  return kMaxDepth;
}

std::vector<double> FamilySpec::breakpoints() const {
  const int n_max = depth();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  if (sequence == SequenceRule::geometric) {
    for (int n = 0; n <= n_max; ++n) out.push_back(R * (1.0 - std::ldexp(1.0, -n)));
    return out;
  }
  out.push_back(0.0);
  for (double x : t)
    if (!(out.size() == 1 && x == 0.0)) out.push_back(x);
  if (static_cast<int>(out.size()) > n_max + 1) out.resize(static_cast<std::size_t>(n_max) + 1);
  return out;
}

double FamilySpec::amplitude(int n) const {
  const auto bp = breakpoints();
  if (n < 0 || n + 1 >= static_cast<int>(bp.size()))
    throw IndexOutOfRange("bump index " + std::to_string(n) + " outside 0.." +
                          std::to_string(static_cast<int>(bp.size()) - 2));
  return std::pow(bp[n + 1] - bp[n], n) * Mollifier::max_value();
}

void FamilySpec::validate() const {
  if (!(R > 0.0 && R <= 1.0)) throw SpecInvalid("R must lie in (0, 1]");
  if (!(eta_half_width > 0.0 && eta_half_width <= 0.5))
    throw SpecInvalid("eta_half_width must lie in (0, 1/2]");
  if (sequence == SequenceRule::geometric && !t.empty())
    throw SpecInvalid("t is only used with sequence = custom");
  if (sequence == SequenceRule::custom) {
    if (t.empty()) throw SpecInvalid("sequence = custom needs t = [...]");
    double prev = 0.0;
    bool first = true;
    for (double x : t) {
      if (!std::isfinite(x)) throw SpecInvalid("t contains a non-finite value");
      if (first && x == 0.0) {
        first = false;
        continue;
      }
      if (!(x > prev)) throw SpecInvalid("t must be strictly increasing and positive");
      if (!(x < R)) throw SpecInvalid("every t_n must be smaller than R");
      prev = x;
      first = false;
    }
  }
  const int n_max = depth();
  if (n_max < 2) throw SpecInvalid("truncation depth N must be at least 2");
  if (n_max > kMaxDepth) throw SpecInvalid("truncation depth N is capped at 24");
  if (sequence == SequenceRule::custom && static_cast<int>(breakpoints().size()) < n_max + 1)
    throw SpecInvalid("N exceeds the number of custom intervals");
  if (members < 0 || members > n_max - 1)
    throw SpecInvalid("members must lie in 0.." + std::to_string(n_max - 1));

  // The bump must vanish with its first two derivatives at s = +-1/2.
  const Mollifier eta(eta_half_width);
  for (double s : {-0.5, 0.5})
    if (std::abs(eta.value(s)) > 1e-12 || std::abs(eta.d1(s)) > 1e-12 ||
        std::abs(eta.d2(s)) > 1e-12)
      throw SpecInvalid("bump does not vanish to second order at +-1/2");
  if (!(eta.value(0.0) > 0.0)) throw SpecInvalid("bump is identically zero");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return x;
  } catch (const std::exception&) {
    throw SpecInvalid("bad number for " + key + ": '" + text + "'");
  }
}

int parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return x;
  } catch (const std::exception&) {
    throw SpecInvalid("bad integer for " + key + ": '" + text + "'");
  }
}

std::vector<double> parse_list(const std::string& text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw SpecInvalid("t must be written as [t1, t2, ...]");
  std::vector<double> out;
  std::stringstream body(text.substr(1, text.size() - 2));
  std::string item;
  while (std::getline(body, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double("t", item));
  }
  return out;
}

}  // namespace

FamilySpec FamilySpec::parse(std::istream& in) {
  FamilySpec spec;
  std::vector<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecInvalid("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw SpecInvalid("duplicate key '" + key + "'");
    seen.push_back(key);
    if (key == "R") {
      spec.R = parse_double(key, value);
    } else if (key == "sequence") {
      if (value == "geometric")
        spec.sequence = SequenceRule::geometric;
      else if (value == "custom")
        spec.sequence = SequenceRule::custom;
      else
        throw SpecInvalid("sequence must be geometric or custom");
    } else if (key == "t") {
      spec.t = parse_list(value);
    } else if (key == "N") {
      spec.N = parse_int(key, value);
    } else if (key == "members") {
      spec.members = parse_int(key, value);
    } else if (key == "eta_half_width") {
      spec.eta_half_width = parse_double(key, value);
    } else {
      throw SpecInvalid("unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

FamilySpec FamilySpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecInvalid("cannot open family spec '" + path + "'");
  return parse(in);
}

// ------------------------------------------------------------ profiles

RadialProfile build_base_profile(const FamilySpec& spec, RadialGrid grid) {
  spec.validate();
  const auto bp = spec.breakpoints();
  const int depth = spec.depth();
  const Mollifier eta(spec.eta_half_width);

  // Disjoint supports: only the bump of the interval containing t matters.
  auto term = [bp, depth, eta](double t, int order) {
    if (!(t > 0.0) || t >= bp.back()) return 0.0;
    const int n = static_cast<int>(std::upper_bound(bp.begin(), bp.end(), t) - bp.begin()) - 1;
    if (n >= depth) return 0.0;
    const double gap = bp[n + 1] - bp[n];
    const double s = (2.0 * t - bp[n] - bp[n + 1]) / (2.0 * gap);
    const double a = std::pow(gap, n);
    switch (order) {
      case 0: return a * eta.value(s);
      case 1: return a * eta.d1(s) / gap;
      default: return a * eta.d2(s) / (gap * gap);
    }
  };
  return RadialProfile::analytic(
      "family", [term](double t) { return term(t, 0); }, [term](double t) { return term(t, 1); },
      [term](double t) { return term(t, 2); }, std::move(grid));
}

FamilyMember base_member(const RadialProfile& base) { return {0, base, 0.0, 0.0}; }

namespace {

RadialProfile with_signs(const RadialProfile& base, std::vector<std::pair<double, double>> flips,
                         std::string name) {
  auto sign = [flips](double t) {
    for (const auto& [lo, hi] : flips)
      if (t > lo && t < hi) return -1.0;
    return 1.0;
  };
  const Evaluator e0 = base.eval0(), e1 = base.eval1(), e2 = base.eval2();
  return RadialProfile::analytic(
      std::move(name), [=](double t) { return sign(t) * e0(t); },
      [=](double t) { return sign(t) * e1(t); }, [=](double t) { return sign(t) * e2(t); },
      base.grid());
}

}  // namespace

FamilyMember flip(const RadialProfile& base, const FamilySpec& spec, int n) {
  const int depth = spec.depth();
  if (n < 1 || n >= depth)
    throw IndexOutOfRange("flip index " + std::to_string(n) + " outside 1.." +
                          std::to_string(depth - 1));
  const auto bp = spec.breakpoints();
  const double lo = bp[n], hi = bp[n + 1];
  return {n, with_signs(base, {{lo, hi}}, "u_" + std::to_string(n)), lo, hi};
}

RadialProfile flip_pattern(const RadialProfile& base, const FamilySpec& spec,
                           const std::vector<bool>& flips, std::string name) {
  const int depth = spec.depth();
  if (static_cast<int>(flips.size()) > depth)
    throw IndexOutOfRange("flip pattern longer than the truncation depth");
  const auto bp = spec.breakpoints();
  std::vector<std::pair<double, double>> intervals;
  for (std::size_t n = 0; n < flips.size(); ++n)
    if (flips[n]) intervals.emplace_back(bp[n], bp[n + 1]);
  if (name.empty()) name = base.name() + "-flipped";
  return with_signs(base, std::move(intervals), std::move(name));
}

// --------------------------------------------------------------- checks

SameDetCheck check_same_det(const RadialProfile& u, const RadialProfile& v, double det_tol,
                            double slope_tol) {
  if (!(u.grid() == v.grid()))
    throw GridMismatch("'" + u.name() + "' and '" + v.name() + "' live on different grids");
  const RadialField du = det_hessian_radial(u), dv = det_hessian_radial(v);
  SameDetCheck out{0.0, 0.0, false, false, u, v};
  for (std::size_t j = 0; j < du.values.size(); ++j) {
    out.det_discrepancy = std::max(out.det_discrepancy, std::abs(du.values[j] - dv.values[j]));
    out.slope_discrepancy = std::max(
        out.slope_discrepancy, std::abs(std::abs(u.first()[j]) - std::abs(v.first()[j])));
  }
  out.det_equal = out.det_discrepancy <= det_tol;
  out.slopes_equal = out.slope_discrepancy <= slope_tol;
  return out;
}

EnergyCheck check_energy_equality(const RadialProfile& u, const RadialProfile& v,
                                  const SameDetCheck& same_det, double density_tol,
                                  double energy_rel_tol) {
  if (!same_det.u.same_object(u) || !same_det.v.same_object(v))
    throw PreconditionNotVerified("the |u'| = |v'| check was not run for '" + u.name() + "' and '" +
                                  v.name() + "'");
  const RadialField eu = energy_density_radial(u), ev = energy_density_radial(v);
  EnergyCheck out;
  for (std::size_t j = 0; j < eu.values.size(); ++j)
    out.density_discrepancy = std::max(out.density_discrepancy, std::abs(eu.values[j] - ev.values[j]));
  out.energy_u = disk_integral(eu);
  out.energy_v = disk_integral(ev);
  const double scale = std::max(std::abs(out.energy_u), std::abs(out.energy_v));
  const double diff = std::abs(out.energy_u - out.energy_v);
  out.energy_rel_discrepancy = scale > 0.0 ? diff / scale : diff;
  out.density_equal = out.density_discrepancy <= density_tol;
  out.energy_equal = out.energy_rel_discrepancy <= energy_rel_tol;
  return out;
}

double sup_distance(const RadialProfile& u, const RadialProfile& w) {
  const auto& g = u.grid();
  auto gap = [&](double t) { return std::abs(u.value(t) - w.value(t)); };
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double d = gap(g[j]);
    if (d > best_value) {
      best_value = d;
      best = j;
    }
  }
  double a = best == 0 ? 0.0 : g[best - 1];
  double b = best + 1 == g.size() ? 1.0 : g[best + 1];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = gap(c), fd = gap(d);
  for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = gap(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = gap(d);
    }
  }
  return std::max({best_value, fc, fd});
}

Separation pairwise_distinct(const std::vector<FamilyMember>& members, double threshold) {
  Separation out;
  out.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const double d = sup_distance(members[i].profile, members[j].profile);
      if (d < out.min_separation) {
        out.min_separation = d;
        out.first = members[i].index;
        out.second = members[j].index;
      }
    }
  out.distinct = members.size() < 2 || out.min_separation > threshold;
  return out;
}

double expected_separation(const FamilySpec& spec, const std::vector<FamilyMember>& members) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const int n = members[i].index, m = members[j].index;
      double sep;
      if (n == m)
        sep = 0.0;
      else if (n == 0 || m == 0)
        sep = 2.0 * spec.amplitude(std::max(n, m));
      else
        sep = 2.0 * std::max(spec.amplitude(n), spec.amplitude(m));
      best = std::min(best, sep);
    }
  return best;
}

// ----------------------------------------------------------- experiment

MultiplicityReport run_multiplicity_experiment(const FamilySpec& spec, int n_members,
                                               const VerifyConfig& config, RadialGrid grid,
                                               const std::string& name) {
  spec.validate();
  MultiplicityReport report;
  report.spec = spec;
  report.depth = spec.depth();
  if (n_members < 0 || n_members > report.depth - 1)
    throw IndexOutOfRange("members must lie in 0.." + std::to_string(report.depth - 1));

  const RadialProfile base = build_base_profile(spec, std::move(grid)).renamed(name);
  report.base = verify_proposition(base, config);
  report.base_energy = energy(base);

  std::vector<FamilyMember> all{base_member(base)};
  for (int n = 1; n <= n_members; ++n) {
    FamilyMember m = flip(base, spec, n);
    SameDetCheck det = check_same_det(m.profile, base);
    EnergyCheck en = check_energy_equality(m.profile, base, det);
    StationarityReport st = verify_proposition(m.profile, config);
    all.push_back(m);
    report.members.push_back({std::move(m), std::move(det), en, std::move(st)});
  }

  report.separation = pairwise_distinct(all);
  if (all.size() >= 2) {
    report.expected_separation = expected_separation(spec, all);
    report.separation_matches =
        std::abs(report.separation.min_separation - report.expected_separation) <=
        kSeparationTolerance;
  }

  report.verdict = report.base.verdict && report.separation.distinct && report.separation_matches;
  for (const auto& m : report.members)
    report.verdict = report.verdict && m.det.pass() && m.energy.pass() && m.stationarity.verdict;
  return report;
}

nlohmann::ordered_json to_json(const MultiplicityReport& report) {
  using json = nlohmann::ordered_json;
  json j = to_json(report.base);
  const json base_verdict = j["verdict"];
  j.erase("verdict");

  double det_max = 0.0, slope_max = 0.0, density_max = 0.0, energy_max = 0.0;
  bool det_ok = true, energy_ok = true;
  auto members = json::array();
  for (const auto& m : report.members) {
    det_max = std::max(det_max, m.det.det_discrepancy);
    slope_max = std::max(slope_max, m.det.slope_discrepancy);
    density_max = std::max(density_max, m.energy.density_discrepancy);
    energy_max = std::max(energy_max, m.energy.energy_rel_discrepancy);
    det_ok = det_ok && m.det.pass();
    energy_ok = energy_ok && m.energy.pass();

    json entry;
    entry["index"] = m.member.index;
    entry["interval"] = {m.member.lo, m.member.hi};
    entry["det_check"] = {{"det_discrepancy", m.det.det_discrepancy},
                          {"slope_discrepancy", m.det.slope_discrepancy},
                          {"det_equal", m.det.det_equal},
                          {"slopes_equal", m.det.slopes_equal}};
    entry["energy_check"] = {{"density_discrepancy", m.energy.density_discrepancy},
                             {"energy", m.energy.energy_u},
                             {"energy_rel_discrepancy", m.energy.energy_rel_discrepancy},
                             {"pass", m.energy.pass()}};
    json st = to_json(m.stationarity);
    st.erase("profile");
    st.erase("seed");
    st.erase("tolerances");
    entry["stationarity"] = std::move(st);
    members.push_back(std::move(entry));
  }
  j["base_verdict"] = base_verdict;
  j["depth"] = report.depth;
  j["det_check"] = {{"det_discrepancy", det_max},
                    {"slope_discrepancy", slope_max},
                    {"tolerances", {{"det", kDetTolerance}, {"slope", kSlopeTolerance}}},
                    {"pass", det_ok}};
  j["energy_check"] = {
      {"density_discrepancy", density_max},
      {"energy_rel_discrepancy", energy_max},
      {"base_energy", report.base_energy},
      {"tolerances", {{"density", kDensityTolerance}, {"energy_rel", kEnergyRelTolerance}}},
      {"pass", energy_ok}};
  json sep;
  if (report.members.empty()) {
    sep["value"] = nullptr;
    sep["expected"] = nullptr;
  } else {
    sep["value"] = report.separation.min_separation;
    sep["expected"] = report.expected_separation;
    sep["pair"] = {report.separation.first, report.separation.second};
  }
  sep["distinct"] = report.separation.distinct;
  sep["matches_expected"] = report.separation_matches;
  j["min_separation"] = std::move(sep);
  j["members"] = std::move(members);
  j["verdict"] = report.verdict ? "PASS" : "FAIL";
  return j;
}

}  // namespace vklab
