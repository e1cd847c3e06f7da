#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "analytic_field.hpp"
#include "apinn/loss.hpp"
#include "apinn/optim.hpp"
#include "apinn/problems.hpp"
#include "apinn/sampler.hpp"
#include "apinn/tape.hpp"

using namespace apinn;
using apinn::testing::AnalyticField;

namespace {
constexpr double kPi = std::numbers::pi;
}

namespace apinn::testing {

AnalyticField exact_field(const std::string& id) {
  AnalyticField f;
  double freq = 0.0;   // temporal angular frequency
  double wave = 0.0;   // spatial wavenumber
  if (id == "p1") {
    freq = kPi * kPi;
    wave = kPi;
  } else if (id == "p2") {
    freq = 4.0 * kPi;
    wave = 1.0;
  } else if (id == "p3") {
    freq = kPi;
    wave = 1.0;
  } else {
    throw std::invalid_argument("unknown problem id");
  }
  const double k2 = wave * wave;
  const double k4 = k2 * k2;
  f.u = [=](double x, double t) { return std::sin(wave * x) * std::cos(freq * t); };
  f.u_t = [=](double x, double t) { return -freq * std::sin(wave * x) * std::sin(freq * t); };
  f.u_tt = [=](double x, double t) {
    return -freq * freq * std::sin(wave * x) * std::cos(freq * t);
  };
  f.u_xx = [=](double x, double t) { return -k2 * std::sin(wave * x) * std::cos(freq * t); };
  f.u_xxxx = [=](double x, double t) { return k4 * std::sin(wave * x) * std::cos(freq * t); };
  f.v = f.u_xx;
  f.v_xx = [=](double x, double t) { return k4 * std::sin(wave * x) * std::cos(freq * t); };
  return f;
}

}  // namespace apinn::testing

TEST_CASE("exact solutions zero out every loss term") {
  for (const auto& prob : {p1(), p2(), p3()}) {
    CAPTURE(prob.id);
    const auto colloc = sample_collocation(prob, {60, 20, 20, 40}, 5,
                                           SampleStrategy::UniformRandom);
    const AnalyticField field = apinn::testing::exact_field(prob.id);
    const LossWeights w;
    const LossBreakdown bp = pinn_loss(field, prob, colloc, w);
    CHECK(bp.l_f < 1e-18);
    CHECK(bp.l_0 < 1e-18);
    CHECK(bp.l_b < 1e-18);
    const LossBreakdown ba = apinn_loss(field, prob, colloc, w);
    CHECK(ba.l_f < 1e-18);
    CHECK(ba.l_a < 1e-18);
    CHECK(ba.l_0 < 1e-18);
    CHECK(ba.l_b < 1e-18);
  }
}

TEST_CASE("zero network on p1 gives the closed-form initial loss and zero boundary loss") {
  const ProblemSpec prob = p1();
  const auto colloc = sample_collocation(prob, {16, 4, 11, 16}, 0, SampleStrategy::Grid);
  MlpConfig config{2, 4, 1};
  Params zero = init_params(config, 0);
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  const LossBreakdown b = pinn_loss(zero, prob, colloc, LossWeights{});
  // mean of sin^2(pi x) over the 11-point grid including endpoints = 5/11
  CHECK(b.l_0 == doctest::Approx(5.0 / 11.0).epsilon(1e-12));
  CHECK(b.l_b == 0.0);
}

TEST_CASE("zero network on p3 reduces the residual loss to the mean squared forcing") {
  const ProblemSpec prob = p3();
  const auto colloc = sample_collocation(prob, {40, 5, 5, 40}, 9, SampleStrategy::UniformRandom);
  MlpConfig config{2, 4, 2};
  Params zero = init_params(config, 0);
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  const LossBreakdown b = apinn_loss(zero, prob, colloc, LossWeights{});
  double expect = 0.0;
  for (const auto& [x, t] : colloc.interior) {
    expect += prob.forcing(x, t) * prob.forcing(x, t);
  }
  expect /= static_cast<double>(colloc.interior.size());
  CHECK(b.l_f == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("inconsistent auxiliary pair shows up in the auxiliary loss alone") {
  const ProblemSpec prob = p1();
  const auto colloc = sample_collocation(prob, {30, 10, 10, 30}, 3,
                                         SampleStrategy::UniformRandom);
  AnalyticField field = apinn::testing::exact_field("p1");
  field.v = [](double, double) { return 0.0; };
  field.v_xx = [](double, double) { return 0.0; };
  const LossBreakdown b = apinn_loss(field, prob, colloc, LossWeights{});
  double expect = 0.0;
  for (const auto& [x, t] : colloc.auxiliary) {
    const double uxx = -kPi * kPi * std::sin(kPi * x) * std::cos(kPi * kPi * t);
    expect += uxx * uxx;
  }
  expect /= static_cast<double>(colloc.auxiliary.size());
  CHECK(b.l_a == doctest::Approx(expect).epsilon(1e-12));
  CHECK(b.l_a > 0.0);
}

TEST_CASE("data loss") {
  const Params params = init_params(MlpConfig{1, 3, 1}, 3);
  CHECK(data_loss(params, {}) == 0.0);

  // samples drawn from the network itself have zero misfit
  std::vector<DataPoint> self;
  for (double x : {0.1, 0.4, 0.9}) self.push_back({x, 0.3, forward(params, x, 0.3)[0]});
  CHECK(data_loss(params, self) < 1e-18);

  // a single sample with misfit 0.1 scores 0.01
  std::vector<DataPoint> one = {{0.2, 0.2, forward(params, 0.2, 0.2)[0] + 0.1}};
  CHECK(data_loss(params, one) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("adaptive reweighting follows the gradient-norm balancing rule") {
  const LossBreakdown bd{};
  SUBCASE("equal norms are a fixed point") {
    const LossWeights w = adaptive_reweight(bd, {2.0, 2.0, 2.0, 2.0, 2.0}, LossWeights{1, 1, 1, 1, 1});
    CHECK(w.w_f == doctest::Approx(1.0));
    CHECK(w.w_b == doctest::Approx(1.0));
    CHECK(w.w_a == doctest::Approx(1.0));
  }
  SUBCASE("one step of the stated update") {
    // ||g_f|| = 10, ||g_b|| = 1, weights start at 1 -> w_b = 0.9 + 0.1*10
    const LossWeights w = adaptive_reweight(bd, {10.0, 1.0, 10.0, 0.0, 10.0}, LossWeights{1, 1, 1, 1, 1});
    CHECK(w.w_b == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(w.w_f == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("ratios clamp to [1e-2, 1e2]") {
    const LossWeights w = adaptive_reweight(bd, {1e5, 1.0, 1e5, 0.0, 1e5}, LossWeights{1, 1, 1, 1, 1});
    CHECK(w.w_b == doctest::Approx(1e2));
  }
  SUBCASE("zero-gradient terms keep their weight") {
    const LossWeights w = adaptive_reweight(bd, {5.0, 5.0, 5.0, 0.0, 5.0}, LossWeights{1, 1, 1, 0.25, 1});
    CHECK(w.w_d == 0.25);
  }
  SUBCASE("all-zero norms are an error") {
    CHECK_THROWS(adaptive_reweight(bd, {0, 0, 0, 0, 0}, LossWeights{}));
  }
}

TEST_CASE("total is linear in the weights") {
  const ProblemSpec prob = p2();
  const auto colloc = sample_collocation(prob, {20, 6, 6, 15}, 2, SampleStrategy::UniformRandom);
  const Params params = init_params(MlpConfig{2, 5, 2}, 13);
  const LossWeights w1{0.5, 2.0, 1.5, 0.0, 3.0};
  const LossWeights w2{1.0, 4.0, 3.0, 0.0, 6.0};
  const LossBreakdown b1 = apinn_loss(params, prob, colloc, w1);
  const LossBreakdown b2 = apinn_loss(params, prob, colloc, w2);
  CHECK(b2.total == doctest::Approx(2.0 * b1.total).epsilon(1e-12));
  CHECK(b1.total == doctest::Approx(w1.w_f * b1.l_f + w1.w_b * b1.l_b + w1.w_0 * b1.l_0 +
                                    w1.w_d * b1.l_d + w1.w_a * b1.l_a)
                        .epsilon(1e-12));
}

TEST_CASE("batched objective matches the field-eval loss values") {
  for (const auto& prob : {p1(), p3()}) {
    CAPTURE(prob.id);
    const auto colloc = sample_collocation(prob, {25, 8, 9, 14}, 4, SampleStrategy::UniformRandom);
    const LossWeights w{1.3, 0.7, 2.0, 0.0, 0.9};
    for (ModelKind kind : {ModelKind::Pinn, ModelKind::Apinn}) {
      MlpConfig config{2, 6, kind == ModelKind::Apinn ? 2 : 1};
      const Params params = init_params(config, 31);
      BeamLossObjective obj(prob, colloc, kind, config);
      const LossBreakdown batched = obj.value(params.values, w);
      const LossBreakdown reference = (kind == ModelKind::Apinn)
                                          ? apinn_loss(params, prob, colloc, w)
                                          : pinn_loss(params, prob, colloc, w);
      CHECK(batched.l_f == doctest::Approx(reference.l_f).epsilon(1e-12));
      CHECK(batched.l_b == doctest::Approx(reference.l_b).epsilon(1e-12));
      CHECK(batched.l_0 == doctest::Approx(reference.l_0).epsilon(1e-12));
      CHECK(batched.l_a == doctest::Approx(reference.l_a).epsilon(1e-12));
      CHECK(batched.total == doctest::Approx(reference.total).epsilon(1e-12));
    }
  }
}

TEST_CASE("batched gradient agrees with the tape gradient") {
  const ProblemSpec prob = p3();
  const auto colloc = sample_collocation(prob, {15, 5, 6, 10}, 8, SampleStrategy::UniformRandom);
  const LossWeights w{1.0, 1.5, 0.5, 0.0, 2.0};
  for (ModelKind kind : {ModelKind::Pinn, ModelKind::Apinn}) {
    MlpConfig config{2, 5, kind == ModelKind::Apinn ? 2 : 1};
    const Params params = init_params(config, 17);

    BeamLossObjective obj(prob, colloc, kind, config);
    std::vector<double> grad(static_cast<std::size_t>(obj.dim()));
    obj.eval(params.values, w, grad);

    Tape tape(params);
    const auto nodes = build_loss_tape(tape, prob, colloc, w, kind);
    const auto tape_grad = tape.backward(nodes.total);

    double max_abs = 0.0;
    for (double g : tape_grad) max_abs = std::max(max_abs, std::abs(g));
    REQUIRE(max_abs > 0.0);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      CHECK(std::abs(grad[i] - tape_grad[i]) <= 1e-10 * max_abs);
    }
  }
}

TEST_CASE("objective gradient matches central finite differences") {
  const ProblemSpec prob = p1();
  const auto colloc = sample_collocation(prob, {20, 6, 8, 12}, 6, SampleStrategy::UniformRandom);
  const LossWeights w;
  for (ModelKind kind : {ModelKind::Pinn, ModelKind::Apinn}) {
    CAPTURE(to_string(kind));
    MlpConfig config{2, 5, kind == ModelKind::Apinn ? 2 : 1};
    Params params = init_params(config, 23);
    BeamLossObjective obj(prob, colloc, kind, config);

    std::vector<double> grad(static_cast<std::size_t>(obj.dim()));
    obj.eval(params.values, w, grad);
    double max_abs = 0.0;
    for (double g : grad) max_abs = std::max(max_abs, std::abs(g));

    const double h = 1e-6;
    for (std::size_t i = 0; i < params.values.size(); ++i) {
      std::vector<double> theta = params.values;
      theta[i] += h;
      const double fp = obj.value(theta, w).total;
      theta[i] -= 2 * h;
      const double fm = obj.value(theta, w).total;
      const double fd = (fp - fm) / (2 * h);
      const double denom = std::max(std::abs(fd), 1e-2 * max_abs);
      CHECK(std::abs(grad[i] - fd) / denom < 1e-4);
    }
  }
}

TEST_CASE("gradient of the total is the weighted sum of term gradients") {
  const ProblemSpec prob = p2();
  const auto colloc = sample_collocation(prob, {12, 4, 5, 8}, 14, SampleStrategy::UniformRandom);
  MlpConfig config{2, 5, 2};
  const Params params = init_params(config, 3);
  BeamLossObjective obj(prob, colloc, ModelKind::Apinn, config);
  const LossWeights w{1.2, 0.4, 2.5, 0.0, 0.8};

  const int dim = obj.dim();
  std::vector<double> total_grad(static_cast<std::size_t>(dim));
  obj.eval(params.values, w, total_grad);

  std::vector<double> sum(static_cast<std::size_t>(dim), 0.0);
  const double unit[5][5] = {{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0},
                             {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}};
  const double weights_vec[5] = {w.w_f, w.w_b, w.w_0, w.w_d, w.w_a};
  std::vector<double> term(static_cast<std::size_t>(dim));
  for (int k = 0; k < 5; ++k) {
    const LossWeights wk{unit[k][0], unit[k][1], unit[k][2], unit[k][3], unit[k][4]};
    obj.eval(params.values, wk, term);
    for (int i = 0; i < dim; ++i) sum[static_cast<std::size_t>(i)] += weights_vec[k] * term[static_cast<std::size_t>(i)];
  }
  double max_abs = 0.0;
  for (double g : total_grad) max_abs = std::max(max_abs, std::abs(g));
  for (int i = 0; i < dim; ++i) {
    CHECK(std::abs(total_grad[static_cast<std::size_t>(i)] - sum[static_cast<std::size_t>(i)]) <=
          1e-10 * std::max(1.0, max_abs));
  }
}

TEST_CASE("degenerate collocation sets and wrong arity are rejected") {
  const ProblemSpec prob = p1();
  auto colloc = sample_collocation(prob, {5, 2, 2, 3}, 0, SampleStrategy::UniformRandom);
  MlpConfig one{1, 3, 1};
  MlpConfig two{1, 3, 2};
  CHECK_THROWS(BeamLossObjective(prob, colloc, ModelKind::Pinn, two));
  CHECK_THROWS(BeamLossObjective(prob, colloc, ModelKind::Apinn, one));
  CHECK_THROWS(pinn_loss(init_params(two, 0), prob, colloc, LossWeights{}));
  CHECK_THROWS(apinn_loss(init_params(one, 0), prob, colloc, LossWeights{}));

  auto empty = colloc;
  empty.interior.clear();
  CHECK_THROWS(BeamLossObjective(prob, empty, ModelKind::Pinn, one));
  auto no_aux = colloc;
  no_aux.auxiliary.clear();
  CHECK_THROWS(BeamLossObjective(prob, no_aux, ModelKind::Apinn, two));
  CHECK_NOTHROW(BeamLossObjective(prob, no_aux, ModelKind::Pinn, one));
}

TEST_CASE("small trained A-PINN ties the auxiliary loss to the pointwise constraint") {
  const ProblemSpec prob = p1();
  const auto colloc = sample_collocation(prob, {200, 30, 30, 100}, 0, SampleStrategy::Grid);
  MlpConfig config{2, 8, 2};
  TrainSchedule schedule;
  schedule.total_epochs = 3000;
  schedule.reweight_interval = 100;
  auto [params, report] = train(prob, ModelKind::Apinn, config, schedule, colloc, 0);

  const double l_a = report.final_loss.l_a;
  CHECK(l_a <= 1e-3);
  double worst = 0.0;
  for (int j = 0; j < 21; ++j) {
    for (int i = 0; i < 21; ++i) {
      const double x = i / 20.0;
      const double t = j / 20.0;
      const auto d = derivatives(params, x, t, ModelKind::Apinn);
      worst = std::max(worst, std::abs(*d.v - *d.u_xx));
    }
  }
  CHECK(worst <= 0.2);
}
