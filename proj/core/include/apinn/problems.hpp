#pragma once

#include <functional>
#include <string>

#include "apinn/jet.hpp"

namespace apinn {

// Physical beam constants for the undamped transverse-vibration equation
//   EI u_xxxx + rho A u_tt + k u = F(x, t)
// on a Winkler-type elastic foundation of stiffness k.
struct PhysicalBeam {
  double youngs_modulus = 1.0;  // E  [Pa]
  double second_moment = 1.0;   // I  [m^4]
  double density = 1.0;         // rho [kg/m^3]
  double area = 1.0;            // A  [m^2]
  double winkler_k = 0.0;       // k  [N/m^2]
};

struct ScaledCoefficients {
  double c_sq = 1.0;   // EI / (rho A)
  double kappa = 0.0;  // k / (rho A)
  std::function<double(double, double)> forcing;  // F / (rho A)
};

// Divides the physical equation through by rho A:
//   c^2 u_xxxx + u_tt + kappa u = f(x, t).
ScaledCoefficients scale_physical(const PhysicalBeam& beam,
                                  std::function<double(double, double)> load);

// One scaled benchmark case on [x_min, x_max] x [0, t_max] with simply
// supported ends (u = 0 and u_xx = 0 at both ends for all t) and initial data
// u(x,0) = ic_phi, u_t(x,0) = ic_phi_t.
//
// The exact_* closures are symbolically coded derivatives of the closed-form
// solution; they double as an oracle that is independent of any AD path.
struct ProblemSpec {
  std::string id;
  double x_min = 0.0;
  double x_max = 1.0;
  double t_max = 1.0;
  double c_sq = 1.0;
  double kappa = 0.0;

  std::function<double(double, double)> forcing;
  std::function<double(double)> ic_phi;
  std::function<double(double)> ic_phi_t;

  std::function<double(double, double)> exact;
  std::function<double(double, double)> exact_tt;
  std::function<double(double, double)> exact_xx;
  std::function<double(double, double)> exact_xxxx;

  // Initial deflection lifted to jet arithmetic (constraint-embedding trial
  // functions differentiate through it).
  std::function<Jet(const Jet&)> phi_jet;

  double x_span() const { return x_max - x_min; }
};

// Free vibration: u_tt + u_xxxx = 0 on [0,1]x[0,1], u(x,0) = sin(pi x),
// exact solution sin(pi x) cos(pi^2 t).
ProblemSpec p1();

// Forced vibration: u_tt + u_xxxx = (1 - 16 pi^2) sin(x) cos(4 pi t) on
// [0,pi]x[0,1], u(x,0) = sin(x), exact solution sin(x) cos(4 pi t).
ProblemSpec p2();

// Forced vibration on a Winkler foundation (kappa = 1):
// u_tt + u_xxxx + u = (2 - pi^2) sin(x) cos(pi t) on [0,3pi]x[0,1],
// u(x,0) = sin(x), exact solution sin(x) cos(pi t).
ProblemSpec p3();

ProblemSpec problem_by_id(const std::string& id);

// c^2 u_xxxx + u_tt + kappa u - f evaluated on the coded exact solution via
// its symbolic derivatives. Vanishes (to rounding) when the forcing/exact
// pair is self-consistent.
double residual_of_exact(const ProblemSpec& problem, double x, double t);

}  // namespace apinn
