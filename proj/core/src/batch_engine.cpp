#include "batch_engine.hpp"

#include <cmath>
#include <stdexcept>

#include "apinn/jet_kernels.hpp"

namespace apinn::detail {

namespace {

using RowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

ConstRowMajorMap weight_map(std::span<const double> theta, const LayerView& v) {
  return ConstRowMajorMap(theta.data() + v.weight_offset, v.rows, v.cols);
}

Eigen::Map<const Eigen::VectorXd> bias_map(std::span<const double> theta, const LayerView& v) {
  return Eigen::Map<const Eigen::VectorXd>(theta.data() + v.bias_offset, v.rows);
}

}  // namespace

void PassBatch::init(const MlpConfig& config, std::span<const double> xs,
                     std::span<const double> ts, Axis axis, int order) {
  if (xs.size() != ts.size()) throw std::invalid_argument("xs/ts size mismatch");
  config_ = config;
  views_ = layer_views(config);
  axis_ = axis;
  order_ = order;
  npts_ = static_cast<int>(xs.size());
  cols_ = npts_ * (order_ + 1);

  const int hidden = config.hidden_layers;
  acts_.assign(static_cast<std::size_t>(hidden) + 1, Eigen::MatrixXd());
  cofs_.assign(static_cast<std::size_t>(hidden), Eigen::MatrixXd());

  acts_[0].setZero(config.input_dim, cols_);
  for (int p = 0; p < npts_; ++p) {
    const int c0 = p * (order_ + 1);
    acts_[0](0, c0) = xs[static_cast<std::size_t>(p)];
    acts_[0](1, c0) = ts[static_cast<std::size_t>(p)];
    if (order_ >= 1) {
      acts_[0](axis == Axis::X ? 0 : 1, c0 + 1) = 1.0;
    }
  }
  for (int l = 0; l < hidden; ++l) {
    acts_[static_cast<std::size_t>(l) + 1].setZero(config.width, cols_);
    cofs_[static_cast<std::size_t>(l)].setZero(config.width, cols_);
  }
  out_.setZero(config.outputs, cols_);
  out_bar_.setZero(config.outputs, cols_);
  bar_a_.setZero(config.width, cols_);
  bar_b_.setZero(config.width, cols_);
  scratch_.setZero(config.width, Jet::kMaxOrder + 1);
}

void PassBatch::forward(std::span<const double> theta) {
  const int hidden = config_.hidden_layers;
  const bool use_tanh = config_.activation == Activation::Tanh;
  const int stride = order_ + 1;

  for (int l = 0; l <= hidden; ++l) {
    const auto& v = views_[static_cast<std::size_t>(l)];
    Eigen::MatrixXd& dst = (l == hidden) ? out_ : acts_[static_cast<std::size_t>(l) + 1];
    dst.noalias() = weight_map(theta, v) * acts_[static_cast<std::size_t>(l)];
    const auto bias = bias_map(theta, v);
    for (int p = 0; p < npts_; ++p) dst.col(p * stride) += bias;

    if (l < hidden && use_tanh) {
      Eigen::MatrixXd& cof = cofs_[static_cast<std::size_t>(l)];
      for (int p = 0; p < npts_; ++p) {
        const int c0 = p * stride;
        // stash the pre-activation block; dst is rewritten in place
        scratch_.leftCols(stride) = dst.middleCols(c0, stride);
        // tanh(a) = 1 - 2 / (exp(2a) + 1); the argument is clamped where
        // tanh has saturated to 1.0 in double precision anyway
        dst.col(c0) = 1.0 - 2.0 / ((2.0 * scratch_.col(0).array().min(20.0).max(-20.0)).exp() + 1.0);
        cof.col(c0) = 1.0 - dst.col(c0).array().square();
        for (int k = 0; k < order_; ++k) {
          // (k+1) y_{k+1} = sum_{i<=k} u_i * (k+1-i) a_{k+1-i}
          auto y_next = dst.col(c0 + k + 1);
          y_next = cof.col(c0).cwiseProduct(scratch_.col(k + 1)) * static_cast<double>(k + 1);
          for (int i = 1; i <= k; ++i) {
            y_next += static_cast<double>(k + 1 - i) *
                      cof.col(c0 + i).cwiseProduct(scratch_.col(k + 1 - i));
          }
          y_next /= static_cast<double>(k + 1);
          // u_{k+1} = -(y^2)_{k+1}
          auto u_next = cof.col(c0 + k + 1);
          u_next = -2.0 * dst.col(c0).cwiseProduct(dst.col(c0 + k + 1));
          for (int i = 1; i <= k; ++i) {
            u_next -= dst.col(c0 + i).cwiseProduct(dst.col(c0 + k + 1 - i));
          }
        }
      }
    }
  }
}

void PassBatch::backward(std::span<const double> theta, std::span<double> grad) {
  const int hidden = config_.hidden_layers;
  const bool use_tanh = config_.activation == Activation::Tanh;
  const int stride = order_ + 1;

  Eigen::MatrixXd* up = &bar_a_;
  Eigen::MatrixXd* down = &bar_b_;

  {
    const auto& v = views_[static_cast<std::size_t>(hidden)];
    RowMajorMap gw(grad.data() + v.weight_offset, v.rows, v.cols);
    gw.noalias() += out_bar_ * acts_[static_cast<std::size_t>(hidden)].transpose();
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + v.bias_offset, v.rows);
    for (int p = 0; p < npts_; ++p) gb += out_bar_.col(p * stride);
    if (hidden > 0) {
      up->noalias() = weight_map(theta, v).transpose() * out_bar_;
    }
  }

  for (int l = hidden - 1; l >= 0; --l) {
    if (use_tanh) {
      const Eigen::MatrixXd& cof = cofs_[static_cast<std::size_t>(l)];
      for (int p = 0; p < npts_; ++p) {
        const int c0 = p * stride;
        scratch_.leftCols(stride) = up->middleCols(c0, stride);
        // abar_i = sum_{j >= i} xbar_j * u_{j-i}
        for (int i = 0; i <= order_; ++i) {
          auto abar = up->col(c0 + i);
          abar = scratch_.col(i).cwiseProduct(cof.col(c0));
          for (int j = i + 1; j <= order_; ++j) {
            abar += scratch_.col(j).cwiseProduct(cof.col(c0 + j - i));
          }
        }
      }
    }

    const auto& v = views_[static_cast<std::size_t>(l)];
    RowMajorMap gw(grad.data() + v.weight_offset, v.rows, v.cols);
    gw.noalias() += (*up) * acts_[static_cast<std::size_t>(l)].transpose();
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + v.bias_offset, v.rows);
    for (int p = 0; p < npts_; ++p) gb += up->col(p * stride);
    if (l > 0) {
      down->noalias() = weight_map(theta, v).transpose() * (*up);
      std::swap(up, down);
    }
  }
}

}  // namespace apinn::detail
