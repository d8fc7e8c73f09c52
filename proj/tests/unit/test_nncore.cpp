#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "aoicache/checks/oracles.hpp"
#include "aoicache/errors.hpp"
#include "aoicache/nncore/checkpoint.hpp"
#include "aoicache/nncore/mlp.hpp"
#include "aoicache/nncore/ops.hpp"
#include "aoicache/nncore/optim.hpp"

using namespace aoicache;
using nn::Matrix;
using nn::Vector;

namespace {

// Straight-line forward pass with explicit loops, no Eigen products.
std::vector<double> loop_forward(const nn::Mlp& net, std::vector<double> x) {
  const auto& p = net.params();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const Matrix& w = p.weights[l];
    std::vector<double> y(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double s = p.biases[l][i];
      for (Eigen::Index j = 0; j < w.cols(); ++j) s += w(i, j) * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = (l + 1 < p.weights.size()) ? std::max(0.0, s) : s;
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace

TEST_CASE("zero parameters give a zero output") {
  nn::Mlp net({3, 4, 4, 4, 2});
  const Vector out = net.forward(Vector(Vector::Ones(3)));
  CHECK(out.size() == 2);
  CHECK(out.isZero(0.0));
}

TEST_CASE("single-path net passes one coordinate through") {
  nn::Mlp net({2, 2, 2, 2, 1});
  for (std::size_t l = 0; l < 3; ++l) net.params().weights[l](0, 0) = 1.0;
  net.params().weights[3](0, 0) = 1.0;
  Vector x(2);
  x << 0.7, 5.0;
  CHECK(net.forward(x)[0] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("forward matches an independent loop implementation") {
  Rng rng(42);
  const nn::Mlp net = nn::Mlp::make_random({4, 2, 2, 2, 1}, rng);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x = Vector::Random(4);
    const auto expected = loop_forward(net, std::vector<double>(x.data(), x.data() + 4));
    CHECK(net.forward(x)[0] == doctest::Approx(expected[0]).epsilon(1e-13));
  }
}

TEST_CASE("forward rejects wrong input length") {
  nn::Mlp net({3, 4, 4, 4, 2});
  CHECK_THROWS_AS(net.forward(Vector(Vector::Ones(2))), ConfigError);
}

TEST_CASE("standard nets have five layers and bounded initial weights") {
  Rng rng(1);
  const nn::Mlp net = nn::Mlp::make_standard(10, 128, 6, rng);
  CHECK(net.layer_sizes().size() == 5);
  CHECK(net.num_layers() == 4);
  const double bound = 1.0 / std::sqrt(10.0);
  CHECK(net.params().weights[0].cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("backward without a forward pass is a usage error") {
  nn::Mlp net({2, 2, 2, 2, 1});
  nn::Tape empty;
  CHECK_THROWS_AS(nn::backward(net, empty, Matrix::Ones(1, 1)), UsageError);
}

TEST_CASE("constant loss has zero gradients") {
  Rng rng(3);
  const nn::Mlp net = nn::Mlp::make_random({3, 4, 4, 4, 2}, rng);
  const nn::Tape tape = nn::record_forward(net, Matrix::Random(3, 5));
  const nn::Backprop bp = nn::backward(net, tape, Matrix::Zero(2, 5));
  for (const auto& w : bp.grads.weights) CHECK(w.isZero(0.0));
  for (const auto& b : bp.grads.biases) CHECK(b.isZero(0.0));
}

TEST_CASE("linear layer gradient of the output sum is the input") {
  Rng rng(4);
  const nn::Mlp net = nn::Mlp::make_random({3, 2}, rng);
  Matrix x(3, 1);
  x << 0.5, -1.5, 2.0;
  const nn::Tape tape = nn::record_forward(net, x);
  const nn::Backprop bp = nn::backward(net, tape, Matrix::Ones(2, 1));
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(bp.grads.weights[0](i, j) == doctest::Approx(x(j, 0)));
  CHECK(bp.grads.biases[0].isOnes());
}

TEST_CASE("squared-output gradient matches central differences") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const nn::Mlp net = nn::Mlp::make_random({3, 5, 5, 5, 1}, rng);
    const Matrix x = Matrix::Random(3, 4);
    const nn::Tape tape = nn::record_forward(net, x);
    const nn::Backprop bp = nn::backward(net, tape, 2.0 * tape.output);
    auto loss = [&](const std::vector<double>& flat) {
      nn::Mlp n = net;
      n.params().unflatten(flat);
      return n.forward(x).squaredNorm();
    };
    const auto g = checks::check_gradient(loss, net.params().flatten(), bp.grads.flatten());
    CHECK(g.passed);
  }
}

TEST_CASE("input gradient matches central differences") {
  Rng rng(6);
  const nn::Mlp net = nn::Mlp::make_random({3, 6, 6, 6, 1}, rng);
  const Matrix x = Matrix::Random(3, 1);
  const nn::Tape tape = nn::record_forward(net, x);
  const nn::Backprop bp = nn::backward(net, tape, Matrix::Ones(1, 1), true);
  auto f = [&](const std::vector<double>& v) { return net.forward(Vector(Eigen::Map<const Vector>(v.data(), 3)))[0]; };
  const auto g = checks::check_gradient(f, {x(0, 0), x(1, 0), x(2, 0)},
                                        {bp.input_grad(0, 0), bp.input_grad(1, 0), bp.input_grad(2, 0)});
  CHECK(g.passed);
}

TEST_CASE("forward and backward leave parameters unchanged") {
  Rng rng(7);
  const nn::Mlp net = nn::Mlp::make_random({3, 4, 4, 4, 2}, rng);
  const auto before = net.params().flatten();
  const nn::Tape tape = nn::record_forward(net, Matrix::Random(3, 3));
  (void)nn::backward(net, tape, Matrix::Ones(2, 3));
  CHECK(net.params().flatten() == before);
}

TEST_CASE("mse value and adjoint") {
  Matrix pred(1, 3), target(1, 3);
  pred << 1.0, 2.0, 3.0;
  target << 0.0, 2.0, 5.0;
  const nn::LossGrad lg = nn::mse(pred, target);
  CHECK(lg.value == doctest::Approx((1.0 + 0.0 + 4.0) / 3.0));
  CHECK(lg.adjoint(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(lg.adjoint(0, 2) == doctest::Approx(-4.0 / 3.0));
}

TEST_CASE("adam with zero gradient keeps parameters and decays moments") {
  Rng rng(8);
  nn::Mlp net = nn::Mlp::make_random({2, 3, 1}, rng);
  const auto before = net.params().flatten();
  nn::AdamState state(net.params());
  state.first_moment.weights[0].setConstant(1.0);
  state.second_moment.weights[0].setConstant(1.0);
  nn::adam_step(net.params(), nn::ParamSet::zeros_like(net.params()), state, 0.01);
  // Bias correction makes m_hat = 0.1 / 0.1 = 1 on entries with a stored moment,
  // so only compare the entries whose moments started at zero.
  const auto after = net.params().flatten();
  CHECK(after[after.size() - 1] == before[before.size() - 1]);
  CHECK(state.first_moment.weights[0](0, 0) == doctest::Approx(0.9));
  CHECK(state.second_moment.weights[0](0, 0) == doctest::Approx(0.999));
  CHECK(state.step_count == 1);
}

TEST_CASE("adam moves a scalar against the gradient sign") {
  nn::ScalarAdam opt;
  double x = 1.0;
  for (int i = 0; i < 100; ++i) opt.step(x, 3.0, 0.01);
  CHECK(x < 1.0);
  double y = 1.0;
  nn::ScalarAdam opt2;
  for (int i = 0; i < 100; ++i) opt2.step(y, -0.5, 0.01);
  CHECK(y > 1.0);
}

TEST_CASE("first adam step has magnitude equal to the rate") {
  // m_hat = g, v_hat = g^2, so the step is rate * g / (|g| + eps).
  for (double g : {1e-3, 0.5, 20.0, -7.0}) {
    nn::ScalarAdam opt;
    double x = 0.0;
    opt.step(x, g, 0.01);
    CHECK(x == doctest::Approx(-0.01 * g / (std::abs(g) + 1e-8)).epsilon(1e-12));
  }
}

TEST_CASE("adam rejects non-finite gradients without mutating") {
  Rng rng(9);
  nn::Mlp net = nn::Mlp::make_random({2, 2, 1}, rng);
  nn::AdamState state(net.params());
  nn::ParamSet g = nn::ParamSet::zeros_like(net.params());
  g.weights[1](0, 0) = std::nan("");
  const auto before = net.params().flatten();
  CHECK_THROWS_AS(nn::adam_step(net.params(), g, state, 0.01), DivergenceError);
  CHECK(net.params().flatten() == before);
  CHECK(state.step_count == 0);
}

TEST_CASE("adam is deterministic") {
  Rng rng(10);
  nn::Mlp a = nn::Mlp::make_random({3, 4, 2}, rng);
  nn::Mlp b = a;
  nn::AdamState sa(a.params()), sb(b.params());
  Rng g1(11);
  const nn::Mlp gnet = nn::Mlp::make_random({3, 4, 2}, g1);
  for (int i = 0; i < 5; ++i) {
    nn::adam_step(a.params(), gnet.params(), sa, 0.01);
    nn::adam_step(b.params(), gnet.params(), sb, 0.01);
  }
  CHECK(a.params().flatten() == b.params().flatten());
}

TEST_CASE("polynomial schedule") {
  const nn::LrSchedule s(0.01, 1000, 0.9, 1e-5);
  CHECK(s.rate(0) == 0.01);
  CHECK(s.rate(500) == doctest::Approx(0.01 * std::pow(0.5, 0.9)));
  double prev = s.rate(0);
  for (std::uint64_t t = 1; t <= 1200; ++t) {
    const double r = s.rate(t);
    CHECK(r <= prev);
    CHECK(r >= 1e-5);
    prev = r;
  }
  CHECK(s.rate(1000) == 1e-5);
}

TEST_CASE("softmax with log per block") {
  const nn::BlockSizes blocks{3, 2};
  Matrix logits(5, 1);
  logits << 0.0, 0.0, 0.0, 1000.0, 0.0;
  const auto r = nn::softmax_with_log(logits, blocks);
  for (int i = 0; i < 3; ++i) CHECK(r.probs(i, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(r.probs(3, 0) - 1.0) <= 1e-12);
  CHECK(std::isfinite(r.log_probs(4, 0)));
}

TEST_CASE("softmax matches an extended-precision computation") {
  const nn::BlockSizes blocks{3};
  Matrix logits(3, 1);
  logits << 1.0, 2.0, 3.0;
  const auto r = nn::softmax_with_log(logits, blocks);
  long double z = 0;
  for (int i = 1; i <= 3; ++i) z += std::exp(static_cast<long double>(i));
  for (int i = 0; i < 3; ++i) {
    const long double p = std::exp(static_cast<long double>(i + 1)) / z;
    CHECK(std::abs(r.probs(i, 0) - static_cast<double>(p)) <= 1e-15);
    CHECK(std::abs(std::exp(r.log_probs(i, 0)) - r.probs(i, 0)) <= 1e-12);
  }
}

TEST_CASE("softmax sums and log consistency on random blocks") {
  Rng rng(12);
  const nn::BlockSizes blocks{4, 7, 1, 3};
  std::normal_distribution<double> n(0.0, 10.0);
  Matrix logits(15, 20);
  for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = n(rng);
  const auto r = nn::softmax_with_log(logits, blocks);
  const Matrix sums = nn::block_sums_broadcast(r.probs, blocks);
  CHECK((sums.array() - 1.0).abs().maxCoeff() <= 1e-9);
  CHECK((r.log_probs.array().exp() - r.probs.array()).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("softmax backward matches central differences") {
  const nn::BlockSizes blocks{3, 2};
  Matrix x(5, 1);
  x << 0.3, -0.2, 1.1, 0.5, 0.4;
  Matrix w(5, 1);
  w << 1.0, -2.0, 0.5, 3.0, 0.1;
  const auto r = nn::softmax_with_log(x, blocks);
  const Matrix dx = nn::block_softmax_backward(r.probs, w, blocks);
  const Matrix dlx = nn::block_log_softmax_backward(r.probs, w, blocks);
  auto f = [&](const std::vector<double>& v, bool use_log) {
    Matrix m = Eigen::Map<const Matrix>(v.data(), 5, 1);
    const auto s = nn::softmax_with_log(m, blocks);
    return ((use_log ? s.log_probs : s.probs).array() * w.array()).sum();
  };
  const std::vector<double> x0(x.data(), x.data() + 5);
  CHECK(checks::check_gradient([&](const auto& v) { return f(v, false); }, x0,
                               std::vector<double>(dx.data(), dx.data() + 5))
            .passed);
  CHECK(checks::check_gradient([&](const auto& v) { return f(v, true); }, x0,
                               std::vector<double>(dlx.data(), dlx.data() + 5))
            .passed);
}

TEST_CASE("gumbel transform at u = 1/e is zero") {
  CHECK(nn::gumbel_from_uniform(std::exp(-1.0)) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gumbel noise mean and variance") {
  Rng rng(13);
  const Matrix g = nn::gumbel_noise(1000, 1000, rng);
  const double mean = g.mean();
  const double var = (g.array() - mean).square().mean();
  CHECK(std::abs(mean - 0.5772156649) <= 0.01);
  CHECK(std::abs(var - M_PI * M_PI / 6.0) <= 0.05);
  CHECK(g.allFinite());
}

TEST_CASE("soft update") {
  nn::Mlp src({1, 1}), dst({1, 1});
  src.params().weights[0](0, 0) = 2.0;
  dst.params().weights[0](0, 0) = 0.0;
  nn::soft_update(dst.params(), src.params(), 0.5);
  CHECK(dst.params().weights[0](0, 0) == 1.0);
  nn::soft_update(dst.params(), src.params(), 1.0);
  CHECK(dst.params().weights[0](0, 0) == 2.0);

  nn::Mlp t({1, 1});
  double gap = 2.0;
  for (int i = 0; i < 10; ++i) {
    nn::soft_update(t.params(), src.params(), 0.001);
    const double new_gap = 2.0 - t.params().weights[0](0, 0);
    CHECK(new_gap == doctest::Approx(0.999 * gap).epsilon(1e-12));
    gap = new_gap;
  }
  CHECK_THROWS(nn::soft_update(t.params(), src.params(), 0.0));
}

TEST_CASE("mlp checkpoint round trip") {
  Rng rng(14);
  const nn::Mlp net = nn::Mlp::make_random({3, 5, 5, 5, 2}, rng);
  const auto path = std::filesystem::temp_directory_path() / "aoicache_mlp_roundtrip.json";
  nn::save_json(path, nn::mlp_to_json(net));
  const nn::Mlp back = nn::mlp_from_json(nn::load_json(path));
  CHECK(back.layer_sizes() == net.layer_sizes());
  CHECK(back.params().flatten() == net.params().flatten());
  std::filesystem::remove(path);

  auto j = nn::mlp_to_json(net);
  j["version"] = 99;
  CHECK_THROWS_AS(nn::mlp_from_json(j), ConfigError);
  j = nn::mlp_to_json(net);
  j["params"].erase(0);
  CHECK_THROWS_AS(nn::mlp_from_json(j), ConfigError);
}

TEST_CASE("adam moments of idle parameters decay to exact zero, never subnormal") {
  Rng rng(1);
  nn::Mlp net = nn::Mlp::make_random({2, 3, 1}, rng);
  nn::AdamState state(net.params());
  nn::ParamSet grads = nn::ParamSet::zeros_like(net.params());
  grads.weights[0](0, 0) = 1.0;
  nn::adam_step(net.params(), grads, state, 1e-3);
  grads.weights[0](0, 0) = 0.0;
  for (int t = 0; t < 8000; ++t) nn::adam_step(net.params(), grads, state, 1e-3);
  const double m = state.first_moment.weights[0](0, 0);
  CHECK(m == 0.0);
  CHECK(std::fpclassify(state.second_moment.weights[0](0, 0)) == FP_NORMAL);
}
