#pragma once

#include <array>
#include <cstdint>

namespace apinn {

// Truncated univariate Taylor series ("jet") of degree at most 4.
//
// A Jet carries the value and the input-derivatives of a quantity w along one
// seeded scalar direction s: coeff(k) = (1/k!) d^k w / d s^k. The k-th plain
// derivative is derivative(k) = k! * coeff(k). Arithmetic is exact truncated
// polynomial algebra in R[s]/(s^{order+1}):
//
//   (a * b).coeff(k) = sum_{i=0..k} a.coeff(i) * b.coeff(k-i)
//
// Constants lift to (c, 0, ..., 0); a seeded variable lifts to (s0, 1, 0, ...).
// Binary operations require both operands to share the same order.
class Jet {
 public:
  static constexpr int kMaxOrder = 4;

  Jet() = default;

  static Jet constant(double value, int order = 0);
  // Seeded variable: coeff(1) = 1.
  static Jet variable(double value, int order);

  int order() const { return order_; }
  double value() const { return c_[0]; }
  double coeff(int k) const;
  void set_coeff(int k, double v);
  // k! * coeff(k), the plain k-th derivative along the seeded direction.
  double derivative(int k) const;

  const double* data() const { return c_.data(); }
  double* data() { return c_.data(); }

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator-(double a, const Jet& b) { return (-b) += a; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double a, Jet b) { return b *= a; }

  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  friend Jet tanh(const Jet& a);
  // tanh with the reverse-mode cofactor 1 - tanh(a)^2 returned alongside.
  friend Jet tanh_with_cofactor(const Jet& a, Jet* cofactor);
  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);

  friend bool operator==(const Jet& a, const Jet& b);

 private:
  int order_ = 0;
  std::array<double, kMaxOrder + 1> c_{};
};

Jet tanh(const Jet& a);
Jet tanh_with_cofactor(const Jet& a, Jet* cofactor);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

// abar += corr(cbar, q): adjoint accumulation for c = q (*) a, see jet_kernels.
void accumulate_adjoint_product(const Jet& cbar, const Jet& q, Jet* abar);

}  // namespace apinn
