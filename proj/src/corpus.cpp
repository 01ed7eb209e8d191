#include "vklab/corpus.hpp"

#include <cmath>

#include "vklab/errors.hpp"

namespace vklab {

namespace {

// Circle means used below: mean of exp(a.x) is I0(|a| r), mean of
// cos(k.x + c) is J0(|k| r) cos c, mean of cos^4 is 3/8.
std::vector<PlanarTestFunction> make_corpus() {
  std::vector<PlanarTestFunction> c;

  c.push_back({"x^2", [](double x, double) { return x * x; },
               [](double, double) { return Sym2{2.0, 0.0, 0.0}; },
               [](double r) { return 0.5 * r * r; }});

  c.push_back({"x", [](double x, double) { return x; },
               [](double, double) { return Sym2{0.0, 0.0, 0.0}; }, [](double) { return 0.0; }});

  c.push_back({"x^3-3xy^2", [](double x, double y) { return x * x * x - 3.0 * x * y * y; },
               [](double x, double y) { return Sym2{6.0 * x, -6.0 * y, -6.0 * x}; },
               [](double) { return 0.0; }});

  c.push_back({"exp(x+y/2)", [](double x, double y) { return std::exp(x + 0.5 * y); },
               [](double x, double y) {
                 const double e = std::exp(x + 0.5 * y);
                 return Sym2{e, 0.5 * e, 0.25 * e};
               },
               [](double r) { return std::cyl_bessel_i(0.0, std::sqrt(1.25) * r); }});

  c.push_back({"cos(2x+0.3)cos(3y-0.2)",
               [](double x, double y) { return std::cos(2.0 * x + 0.3) * std::cos(3.0 * y - 0.2); },
               [](double x, double y) {
                 const double cx = std::cos(2.0 * x + 0.3), sx = std::sin(2.0 * x + 0.3);
                 const double cy = std::cos(3.0 * y - 0.2), sy = std::sin(3.0 * y - 0.2);
                 return Sym2{-4.0 * cx * cy, 6.0 * sx * sy, -9.0 * cx * cy};
               },
               [](double r) {
                 return 0.5 * std::cyl_bessel_j(0.0, std::sqrt(13.0) * r) *
                        (std::cos(0.1) + std::cos(0.5));
               }});

  // exp(-4 |x - p|^2), p = (0.3, 0.1).
  c.push_back({"gaussian-offset",
               [](double x, double y) {
                 const double dx = x - 0.3, dy = y - 0.1;
                 return std::exp(-4.0 * (dx * dx + dy * dy));
               },
               [](double x, double y) {
                 const double dx = x - 0.3, dy = y - 0.1;
                 const double g = std::exp(-4.0 * (dx * dx + dy * dy));
                 return Sym2{g * (64.0 * dx * dx - 8.0), g * 64.0 * dx * dy,
                             g * (64.0 * dy * dy - 8.0)};
               },
               [](double r) {
                 const double p2 = 0.1, p = std::sqrt(p2);
                 return std::exp(-4.0 * r * r - 4.0 * p2) * std::cyl_bessel_i(0.0, 8.0 * p * r);
               }});

  c.push_back({"gaussian", [](double x, double y) { return std::exp(-2.0 * (x * x + y * y)); },
               [](double x, double y) {
                 const double g = std::exp(-2.0 * (x * x + y * y));
                 return Sym2{g * (16.0 * x * x - 4.0), g * 16.0 * x * y, g * (16.0 * y * y - 4.0)};
               },
               [](double r) { return std::exp(-2.0 * r * r); }});

  c.push_back({"x^4-xy^3", [](double x, double y) { return x * x * x * x - x * y * y * y; },
               [](double x, double y) {
                 return Sym2{12.0 * x * x, -3.0 * y * y, -6.0 * x * y};
               },
               [](double r) { return 0.375 * r * r * r * r; }});
  return c;
}

}  // namespace

const std::vector<PlanarTestFunction>& planar_corpus() {
  static const std::vector<PlanarTestFunction> corpus = make_corpus();
  return corpus;
}

const PlanarTestFunction& corpus_function(const std::string& name) {
  for (const auto& f : planar_corpus())
    if (f.name == name) return f;
  throw InvalidInput("unknown corpus function '" + name + "'");
}

}  // namespace vklab
