#pragma once

#include <functional>
#include <stdexcept>

#include "apinn/network.hpp"

namespace apinn::testing {

// Closed-form stand-in for the network: the loss assembly consumes the same
// DerivBundle interface, so exact solutions (and deliberately inconsistent
// pairs) can be injected to validate the loss terms against closed forms.
struct AnalyticField final : FieldEval {
  using Fn = std::function<double(double, double)>;
  Fn u, u_t, u_tt, u_xx, u_xxxx;  // primary field
  Fn v, v_xx;                     // auxiliary field (A-PINN only)

  DerivBundle derivs(double x, double t, ModelKind kind) const override {
    DerivBundle b;
    b.u = u(x, t);
    b.u_t = u_t(x, t);
    b.u_tt = u_tt(x, t);
    b.u_xx = u_xx(x, t);
    if (kind == ModelKind::Pinn) {
      b.u_xxxx = u_xxxx(x, t);
    } else if (kind == ModelKind::Apinn) {
      b.v = v(x, t);
      b.v_xx = v_xx(x, t);
    } else {
      throw std::invalid_argument("analytic field supports PINN/A-PINN kinds");
    }
    return b;
  }
};

// The exact solution of problem `id` (p1|p2|p3) with hand-differentiated
// closures, written independently of the problems module. The auxiliary pair
// is consistent: v = u_xx.
AnalyticField exact_field(const std::string& id);

}  // namespace apinn::testing
