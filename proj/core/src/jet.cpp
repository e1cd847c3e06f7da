#include "apinn/jet.hpp"

#include <cmath>
#include <stdexcept>

#include "apinn/jet_kernels.hpp"

namespace apinn {

namespace {

void check_order(int order) {
  if (order < 0 || order > Jet::kMaxOrder) {
    throw std::invalid_argument("jet order must be in [0, 4]");
  }
}

void check_same_order(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) {
    throw std::invalid_argument("jet operands must share the same order");
  }
}

}  // namespace

Jet Jet::constant(double value, int order) {
  check_order(order);
  Jet j;
  j.order_ = order;
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(double value, int order) {
  check_order(order);
  if (order < 1) throw std::invalid_argument("a seeded variable needs order >= 1");
  Jet j;
  j.order_ = order;
  j.c_[0] = value;
  j.c_[1] = 1.0;
  return j;
}

double Jet::coeff(int k) const {
  if (k < 0 || k > order_) throw std::out_of_range("jet coefficient index");
  return c_[k];
}

void Jet::set_coeff(int k, double v) {
  if (k < 0 || k > order_) throw std::out_of_range("jet coefficient index");
  c_[k] = v;
}

double Jet::derivative(int k) const {
  static constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0, 24.0};
  return coeff(k) * kFactorial[k];
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (int k = 0; k <= order_; ++k) r.c_[k] = -r.c_[k];
  return r;
}

Jet& Jet::operator+=(const Jet& rhs) {
  check_same_order(*this, rhs);
  for (int k = 0; k <= order_; ++k) c_[k] += rhs.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  check_same_order(*this, rhs);
  for (int k = 0; k <= order_; ++k) c_[k] -= rhs.c_[k];
  return *this;
}

Jet& Jet::operator+=(double rhs) {
  c_[0] += rhs;
  return *this;
}

Jet& Jet::operator-=(double rhs) {
  c_[0] -= rhs;
  return *this;
}

Jet& Jet::operator*=(double rhs) {
  for (int k = 0; k <= order_; ++k) c_[k] *= rhs;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  check_same_order(a, b);
  Jet r;
  r.order_ = a.order_;
  detail::jet_mul(a.c_.data(), b.c_.data(), r.c_.data(), a.order_);
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  check_same_order(a, b);
  if (b.c_[0] == 0.0) throw std::domain_error("jet division by zero constant term");
  Jet r;
  r.order_ = a.order_;
  detail::jet_div(a.c_.data(), b.c_.data(), r.c_.data(), a.order_);
  return r;
}

Jet tanh(const Jet& a) {
  Jet u;
  return tanh_with_cofactor(a, &u);
}

Jet tanh_with_cofactor(const Jet& a, Jet* cofactor) {
  Jet y;
  y.order_ = a.order_;
  cofactor->order_ = a.order_;
  detail::jet_tanh(a.c_.data(), y.c_.data(), cofactor->c_.data(), a.order_);
  return y;
}

Jet sin(const Jet& a) {
  Jet s, c;
  s.order_ = c.order_ = a.order_;
  detail::jet_sincos(a.c_.data(), s.c_.data(), c.c_.data(), a.order_);
  return s;
}

Jet cos(const Jet& a) {
  Jet s, c;
  s.order_ = c.order_ = a.order_;
  detail::jet_sincos(a.c_.data(), s.c_.data(), c.c_.data(), a.order_);
  return c;
}

bool operator==(const Jet& a, const Jet& b) {
  if (a.order_ != b.order_) return false;
  for (int k = 0; k <= a.order_; ++k) {
    if (a.c_[k] != b.c_[k]) return false;
  }
  return true;
}

void accumulate_adjoint_product(const Jet& cbar, const Jet& q, Jet* abar) {
  check_same_order(cbar, *abar);
  detail::jet_adjoint_mul_acc(cbar.data(), q.data(), abar->data(), cbar.order());
}

}  // namespace apinn
