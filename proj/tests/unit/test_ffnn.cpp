#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mktlab/error.hpp"
#include "mktlab/ffnn.hpp"
#include "mktlab/random.hpp"

using namespace mktlab;
using namespace mktlab::ffnn;

namespace {

TrainingBatch random_batch(std::size_t samples, std::size_t inputs, std::uint64_t seed) {
  auto rng = make_rng(seed, 77);
  std::normal_distribution<double> z(0.0, 1.0);
  TrainingBatch b{Eigen::MatrixXd(samples, inputs), Eigen::VectorXd(samples)};
  for (Eigen::Index r = 0; r < b.inputs.rows(); ++r) {
    for (Eigen::Index c = 0; c < b.inputs.cols(); ++c) b.inputs(r, c) = z(rng);
    b.targets(r) = z(rng);
  }
  return b;
}

// Independent evaluation: per sample, per neuron, no matrices.
double naive_output(const Network& net, const std::vector<double>& input) {
  std::vector<double> y = input;
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    const auto& w = net.weights()[l];
    std::vector<double> next(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      double z = w(w.rows() - 1, j);
      for (std::size_t k = 0; k < y.size(); ++k) z += w(static_cast<Eigen::Index>(k), j) * y[k];
      const auto& act = net.activations()[l];
      switch (act.kind) {
        case ActivationKind::logistic: z = 1.0 / (1.0 + std::exp(-z)); break;
        case ActivationKind::tanh: z = act.a * std::tanh(act.b * z); break;
        case ActivationKind::linear: break;
      }
      next[static_cast<std::size_t>(j)] = z;
    }
    y = next;
  }
  return y.front();
}

double naive_loss(const Network& net, const TrainingBatch& b) {
  double s = 0.0;
  for (Eigen::Index r = 0; r < b.inputs.rows(); ++r) {
    std::vector<double> in;
    for (Eigen::Index c = 0; c < b.inputs.cols(); ++c) in.push_back(b.inputs(r, c));
    const double e = naive_output(net, in) - b.targets(r);
    s += e * e;
  }
  return s / static_cast<double>(b.inputs.rows());
}

double max_relative_gradient_error(Network net, const TrainingBatch& batch) {
  const auto g = gradients(net, batch);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    auto& w = net.weights()[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        const double keep = w(r, c);
        w(r, c) = keep + h;
        const double up = loss(net, batch);
        w(r, c) = keep - h;
        const double down = loss(net, batch);
        w(r, c) = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double exact = g[l](r, c);
        const double rel = std::abs(numeric - exact) / std::max(1e-6, std::abs(numeric) + std::abs(exact));
        worst = std::max(worst, rel);
      }
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("ffnn") {

TEST_CASE("activations") {
  const auto t = Activation::tanh();
  CHECK(t(0.0) == 0.0);
  CHECK(t.a == 1.7159);
  CHECK(t.b == doctest::Approx(2.0 / 3.0));
  for (double z : {-50.0, -3.0, -0.1, 0.1, 3.0, 50.0}) {
    CHECK(std::abs(t(z)) <= t.a);
    CHECK(t(-z) == -t(z));
    CHECK(t(z) == doctest::Approx(1.7159 * std::tanh(2.0 / 3.0 * z)).epsilon(1e-14));
    const double h = 1e-6;
    for (const auto& act : {t, Activation::logistic(), Activation::linear()}) {
      CHECK(act.derivative(z) ==
            doctest::Approx((act(z + h) - act(z - h)) / (2 * h)).epsilon(1e-6).scale(1e-9));
    }
  }
  CHECK(Activation::logistic()(0.0) == 0.5);
  CHECK(Activation::linear()(4.25) == 4.25);
}

TEST_CASE("forward closed forms") {
  SUBCASE("zero weights, logistic hidden") {
    Network net({3, 4, 1}, {Activation::logistic(), Activation::linear()});
    auto& out = net.weights()[1];
    out << 1.0, -2.0, 0.5, 3.0, 0.25;  // four hidden weights then bias
    const std::vector<double> x{0.3, -7.0, 2.0};
    CHECK(forward(net, x) == doctest::Approx(0.5 * (1.0 - 2.0 + 0.5 + 3.0) + 0.25));
  }
  SUBCASE("identity net") {
    Network net({1, 1, 1}, {Activation::linear(), Activation::linear()});
    net.weights()[0](0, 0) = 1.0;
    net.weights()[1](0, 0) = 1.0;
    for (double x : {-3.0, 0.0, 2.5}) CHECK(forward(net, std::vector<double>{x}) == x);
  }
  SUBCASE("matches an independent evaluation") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto net = Network::initialized({4, 7, 3, 1},
                                      {Activation::tanh(), Activation::logistic(), Activation::linear()},
                                      seed);
      const auto b = random_batch(6, 4, seed);
      const auto y = forward(net, b.inputs);
      for (Eigen::Index r = 0; r < 6; ++r) {
        std::vector<double> in;
        for (Eigen::Index c = 0; c < 4; ++c) in.push_back(b.inputs(r, c));
        CHECK(y(r) == doctest::Approx(naive_output(net, in)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("shape errors") {
    Network net({2, 3, 1}, {Activation::tanh(), Activation::linear()});
    CHECK_THROWS_AS((void)forward(net, std::vector<double>{1.0}), Error);
    CHECK_THROWS_AS(Network({2}, {}), Error);
    CHECK_THROWS_AS(Network({2, 0, 1}, {Activation::tanh(), Activation::linear()}), Error);
    CHECK_THROWS_AS(Network({2, 3, 1}, {Activation::tanh()}), Error);
    CHECK_THROWS_AS(Network({2, 1}, {Activation::tanh(-1.0, 1.0)}), Error);
  }
}

TEST_CASE("loss") {
  auto net = Network::initialized({3, 5, 1}, {Activation::tanh(), Activation::linear()}, 4);
  auto b = random_batch(20, 3, 4);
  CHECK(loss(net, b) == doctest::Approx(naive_loss(net, b)).epsilon(1e-12));

  b.targets = forward(net, b.inputs);
  CHECK(loss(net, b) == 0.0);

  Network zero({3, 5, 1}, {Activation::tanh(), Activation::linear()});
  b.targets.setOnes();
  CHECK(loss(zero, b) == 1.0);

  TrainingBatch bad{Eigen::MatrixXd(3, 3), Eigen::VectorXd(2)};
  CHECK_THROWS_AS((void)loss(net, bad), Error);
}

TEST_CASE("gradients") {
  SUBCASE("zero error gives zero gradient") {
    auto net = Network::initialized({3, 5, 1}, {Activation::tanh(), Activation::linear()}, 5);
    auto b = random_batch(10, 3, 5);
    b.targets = forward(net, b.inputs);
    for (const auto& g : gradients(net, b)) CHECK(g.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("closed form on a linear chain") {
    Network net({1, 1, 1}, {Activation::linear(), Activation::linear()});
    net.weights()[0](0, 0) = 1.0;
    const double w = 0.8;
    net.weights()[1](0, 0) = w;
    TrainingBatch b{Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)};
    CHECK(gradients(net, b)[1](0, 0) == doctest::Approx(2.0 * w));
  }
  SUBCASE("finite differences, every activation") {
    for (const auto& act : {Activation::tanh(), Activation::logistic(), Activation::linear()}) {
      CAPTURE(act.tag());
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto net = Network::initialized({3, 5, 1}, {act, Activation::linear()}, seed);
        CHECK(max_relative_gradient_error(net, random_batch(8, 3, seed)) < 1e-5);
      }
    }
  }
}

TEST_CASE("adam") {
  SUBCASE("zero gradient leaves weights") {
    auto net = Network::initialized({2, 3, 1}, {Activation::tanh(), Activation::linear()}, 1);
    const auto before = net;
    AdamState st(net, {});
    Gradients zero;
    for (const auto& w : net.weights()) zero.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    adam_step(net, st, zero);
    CHECK(net == before);
    CHECK(st.step == 1);
  }
  SUBCASE("first step moves by the learning rate") {
    auto net = Network::initialized({2, 3, 1}, {Activation::tanh(), Activation::linear()}, 2);
    const auto before = net;
    AdamState st(net, {});
    const auto g = gradients(net, random_batch(5, 2, 2));
    adam_step(net, st, g);
    for (std::size_t l = 0; l < g.size(); ++l) {
      for (Eigen::Index i = 0; i < g[l].size(); ++i) {
        const double step = net.weights()[l](i) - before.weights()[l](i);
        if (std::abs(g[l](i)) > 1e-6) {
          CHECK(step == doctest::Approx(-1e-3 * (g[l](i) > 0 ? 1.0 : -1.0)).epsilon(1e-3));
        }
      }
    }
  }
  SUBCASE("converges on a quadratic") {
    // zero input: the output is the bias weight w and the loss (w - 3)^2
    Network net({1, 1}, {Activation::linear()});
    AdamState st(net, {0.05, 0.9, 0.999, 1e-8});
    TrainingBatch b{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, 3.0)};
    for (int i = 0; i < 500; ++i) adam_step(net, st, gradients(net, b));
    CHECK(std::abs(net.weights()[0](1, 0) - 3.0) < 1e-2);
  }
  SUBCASE("shape mismatch") {
    auto net = Network::initialized({2, 3, 1}, {Activation::tanh(), Activation::linear()}, 3);
    AdamState st(net, {});
    CHECK_THROWS_AS(adam_step(net, st, Gradients{}), Error);
  }
}

TEST_CASE("training") {
  SUBCASE("zero epochs") {
    auto net = Network::initialized({3, 5, 1}, {Activation::tanh(), Activation::linear()}, 6);
    const auto before = net;
    AdamState st(net, {});
    const auto h = train(net, st, random_batch(20, 3, 6), 0);
    CHECK(net == before);
    CHECK(h.size() == 1);
  }
  SUBCASE("loss falls monotonically in nearly every seeded run") {
    int monotone = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      auto net = Network::initialized({5, 30, 1}, {Activation::tanh(), Activation::linear()}, seed);
      AdamState st(net, {});
      const auto h = train(net, st, random_batch(20, 5, 1000 + seed), 200);
      bool ok = true;
      for (std::size_t i = 1; i < h.size(); ++i) ok = ok && h[i] <= h[i - 1];
      monotone += ok;
    }
    CHECK(monotone >= 90);
  }
  SUBCASE("deterministic") {
    auto run = [] {
      auto net = Network::initialized({5, 30, 1}, {Activation::tanh(), Activation::linear()}, 9);
      AdamState st(net, {});
      (void)train(net, st, random_batch(20, 5, 9), 50);
      return net;
    };
    CHECK(run() == run());
  }
  SUBCASE("fits a sine") {
    TrainingBatch b{Eigen::MatrixXd(20, 1), Eigen::VectorXd(20)};
    for (int i = 0; i < 20; ++i) {
      const double x = -std::numbers::pi + 2.0 * std::numbers::pi * i / 19.0;
      b.inputs(i, 0) = x;
      b.targets(i) = std::sin(x);
    }
    auto net = Network::initialized({1, 30, 1}, {Activation::tanh(), Activation::linear()}, 1);
    AdamState st(net, {});
    (void)train(net, st, b, 5000);
    CHECK((forward(net, b.inputs) - b.targets).cwiseAbs().maxCoeff() < 0.05);
  }
}

TEST_CASE("checkpoint round trip is bit exact") {
  auto net = Network::initialized({5, 30, 1}, {Activation::tanh(1.3, 0.7), Activation::linear()}, 10);
  AdamState st(net, {});
  (void)train(net, st, random_batch(20, 5, 10), 20);
  std::stringstream ss;
  save_checkpoint(net, ss);
  const auto text = ss.str();
  CHECK(text.rfind("mktlab-ffnn 1\n", 0) == 0);
  const auto back = load_checkpoint(ss);
  CHECK(back == net);
  std::stringstream again;
  save_checkpoint(back, again);
  CHECK(again.str() == text);

  auto logistic = Network::initialized({2, 2, 1}, {Activation::logistic(), Activation::linear()}, 3);
  std::stringstream s2;
  save_checkpoint(logistic, s2);
  CHECK(load_checkpoint(s2) == logistic);

  for (const std::string& bad : std::vector<std::string>{"", "mktlab-ffnn 2\n", "mktlab-ffnn 1\nlayers 2\nsizes 1 1\nactivation 1 cosine\n",
                                text.substr(0, text.size() / 2)}) {
    std::stringstream in(bad);
    try {
      (void)load_checkpoint(in);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse);
    }
  }
}

}  // TEST_SUITE
