#include "apinn/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace apinn {

namespace {
constexpr double kPi = std::numbers::pi;
}

ScaledCoefficients scale_physical(const PhysicalBeam& beam,
                                  std::function<double(double, double)> load) {
  const double rho_a = beam.density * beam.area;
  if (!(rho_a > 0.0)) throw std::invalid_argument("rho * A must be positive");
  ScaledCoefficients s;
  s.c_sq = beam.youngs_modulus * beam.second_moment / rho_a;
  s.kappa = beam.winkler_k / rho_a;
  s.forcing = [load = std::move(load), rho_a](double x, double t) { return load(x, t) / rho_a; };
  return s;
}

ProblemSpec p1() {
  ProblemSpec p;
  p.id = "p1";
  p.x_min = 0.0;
  p.x_max = 1.0;
  p.t_max = 1.0;
  p.c_sq = 1.0;
  p.kappa = 0.0;
  p.forcing = [](double, double) { return 0.0; };
  p.ic_phi = [](double x) { return std::sin(kPi * x); };
  p.ic_phi_t = [](double) { return 0.0; };
  const double w = kPi * kPi;
  p.exact = [w](double x, double t) { return std::sin(kPi * x) * std::cos(w * t); };
  p.exact_tt = [w](double x, double t) { return -w * w * std::sin(kPi * x) * std::cos(w * t); };
  p.exact_xx = [w](double x, double t) { return -kPi * kPi * std::sin(kPi * x) * std::cos(w * t); };
  p.exact_xxxx = [w](double x, double t) {
    return kPi * kPi * kPi * kPi * std::sin(kPi * x) * std::cos(w * t);
  };
  p.phi_jet = [](const Jet& x) { return sin(x * kPi); };
  return p;
}

ProblemSpec p2() {
  ProblemSpec p;
  p.id = "p2";
  p.x_min = 0.0;
  p.x_max = kPi;
  p.t_max = 1.0;
  p.c_sq = 1.0;
  p.kappa = 0.0;
  const double w = 4.0 * kPi;
  p.forcing = [w](double x, double t) {
    return (1.0 - 16.0 * kPi * kPi) * std::sin(x) * std::cos(w * t);
  };
  p.ic_phi = [](double x) { return std::sin(x); };
  p.ic_phi_t = [](double) { return 0.0; };
  p.exact = [w](double x, double t) { return std::sin(x) * std::cos(w * t); };
  p.exact_tt = [w](double x, double t) { return -w * w * std::sin(x) * std::cos(w * t); };
  p.exact_xx = [w](double x, double t) { return -std::sin(x) * std::cos(w * t); };
  p.exact_xxxx = [w](double x, double t) { return std::sin(x) * std::cos(w * t); };
  p.phi_jet = [](const Jet& x) { return sin(x); };
  return p;
}

ProblemSpec p3() {
  ProblemSpec p;
  p.id = "p3";
  p.x_min = 0.0;
  p.x_max = 3.0 * kPi;
  p.t_max = 1.0;
  p.c_sq = 1.0;
  p.kappa = 1.0;
  p.forcing = [](double x, double t) {
    return (2.0 - kPi * kPi) * std::sin(x) * std::cos(kPi * t);
  };
  p.ic_phi = [](double x) { return std::sin(x); };
  p.ic_phi_t = [](double) { return 0.0; };
  p.exact = [](double x, double t) { return std::sin(x) * std::cos(kPi * t); };
  p.exact_tt = [](double x, double t) {
    return -kPi * kPi * std::sin(x) * std::cos(kPi * t);
  };
  p.exact_xx = [](double x, double t) { return -std::sin(x) * std::cos(kPi * t); };
  p.exact_xxxx = [](double x, double t) { return std::sin(x) * std::cos(kPi * t); };
  p.phi_jet = [](const Jet& x) { return sin(x); };
  return p;
}

ProblemSpec problem_by_id(const std::string& id) {
  if (id == "p1") return p1();
  if (id == "p2") return p2();
  if (id == "p3") return p3();
  throw std::invalid_argument("unknown problem id: " + id + " (expected p1|p2|p3)");
}

double residual_of_exact(const ProblemSpec& problem, double x, double t) {
  return problem.c_sq * problem.exact_xxxx(x, t) + problem.exact_tt(x, t) +
         problem.kappa * problem.exact(x, t) - problem.forcing(x, t);
}

}  // namespace apinn
