#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "apinn/network.hpp"

// Batched jet propagation: one region of collocation points, seeded along one
// input axis at a fixed Taylor order, flows through all layers as a single
// (width) x (npts * (order + 1)) matrix per layer. Affine layers act
// coefficient-wise (one GEMM); tanh composes per (neuron, point) block via the
// shared jet kernels. The reverse sweep mirrors the forward structure, so the
// parameter gradient is again a handful of GEMMs.

namespace apinn::detail {

class PassBatch {
 public:
  void init(const MlpConfig& config, std::span<const double> xs, std::span<const double> ts,
            Axis axis, int order);

  void forward(std::span<const double> theta);

  // Accumulates d(loss)/d(theta) into `grad` from the seeds in out_bar.
  void backward(std::span<const double> theta, std::span<double> grad);

  int npts() const { return npts_; }
  int order() const { return order_; }

  // k-th derivative of `row`-th output at point `pt` along the seeded axis.
  double deriv(int row, int pt, int k) const { return out_(row, pt * (order_ + 1) + k) * fact(k); }

  void clear_seeds() { out_bar_.setZero(); }
  // Accumulates d(loss)/d(derivative) — converted internally to the
  // normalized-coefficient adjoint.
  void seed_deriv(int row, int pt, int k, double bar) {
    out_bar_(row, pt * (order_ + 1) + k) += bar * fact(k);
  }

 private:
  static double fact(int k) {
    constexpr double table[] = {1.0, 1.0, 2.0, 6.0, 24.0};
    return table[k];
  }

  MlpConfig config_;
  std::vector<LayerView> views_;
  Axis axis_ = Axis::X;
  int order_ = 0;
  int npts_ = 0;
  int cols_ = 0;

  std::vector<Eigen::MatrixXd> acts_;  // acts_[l] = input to layer l
  std::vector<Eigen::MatrixXd> cofs_;  // tanh cofactors per hidden layer
  Eigen::MatrixXd out_;
  Eigen::MatrixXd out_bar_;
  Eigen::MatrixXd bar_a_, bar_b_;  // backward scratch
  Eigen::MatrixXd scratch_;        // one point-block of coefficients
};

}  // namespace apinn::detail
