#pragma once

#include <cmath>

// Low-level truncated-Taylor kernels shared by the scalar Jet type and the
// batched trainer. Every argument is a coefficient array of length order+1;
// entry k holds the normalized coefficient (1/k!) d^k w / d s^k.
//
// Keeping a single implementation here means the per-point and batched code
// paths produce bit-identical coefficients.

namespace apinn::detail {

inline void jet_mul(const double* a, const double* b, double* out, int order) {
  for (int k = order; k >= 0; --k) {
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) acc += a[i] * b[k - i];
    out[k] = acc;  // out may alias a or b; descending k keeps reads valid
  }
}

// Adjoint of a truncated product: given the adjoint `cbar` of c = q * a and
// the cofactor q, accumulates the contribution to abar:
//   abar[i] += sum_{j>=i} cbar[j] * q[j-i].
inline void jet_adjoint_mul_acc(const double* cbar, const double* q, double* abar, int order) {
  for (int i = 0; i <= order; ++i) {
    double acc = 0.0;
    for (int j = i; j <= order; ++j) acc += cbar[j] * q[j - i];
    abar[i] += acc;
  }
}

// y = tanh(a) via the ODE-style recurrence y' = (1 - y^2) a'. The cofactor
// u = 1 - y^2 is produced as a side effect; it is both the next recurrence
// ingredient and the local derivative needed by reverse mode.
inline void jet_tanh(const double* a, double* y, double* u, int order) {
  y[0] = std::tanh(a[0]);
  u[0] = 1.0 - y[0] * y[0];
  for (int k = 0; k < order; ++k) {
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) acc += u[i] * static_cast<double>(k + 1 - i) * a[k + 1 - i];
    y[k + 1] = acc / static_cast<double>(k + 1);
    // u_{k+1} = -(y^2)_{k+1}
    double sq = 0.0;
    for (int i = 0; i <= k + 1; ++i) sq += y[i] * y[k + 1 - i];
    u[k + 1] = -sq;
  }
}

// s = sin(a), c = cos(a), coupled recurrences s' = c a', c' = -s a'.
inline void jet_sincos(const double* a, double* s, double* c, int order) {
  s[0] = std::sin(a[0]);
  c[0] = std::cos(a[0]);
  for (int k = 0; k < order; ++k) {
    double sa = 0.0;
    double ca = 0.0;
    for (int i = 0; i <= k; ++i) {
      const double da = static_cast<double>(k + 1 - i) * a[k + 1 - i];
      sa += c[i] * da;
      ca -= s[i] * da;
    }
    s[k + 1] = sa / static_cast<double>(k + 1);
    c[k + 1] = ca / static_cast<double>(k + 1);
  }
}

// c = a / b, leading-coefficient recurrence. Requires b[0] != 0.
inline void jet_div(const double* a, const double* b, double* out, int order) {
  for (int k = 0; k <= order; ++k) {
    double acc = a[k];
    for (int i = 0; i < k; ++i) acc -= out[i] * b[k - i];
    out[k] = acc / b[0];
  }
}

}  // namespace apinn::detail
