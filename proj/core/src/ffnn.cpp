#include "mktlab/ffnn.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "mktlab/error.hpp"
#include "mktlab/random.hpp"

namespace mktlab::ffnn {

namespace {

// exp-based tanh; cheaper than libm tanh and accurate to a few ulp in absolute terms.
double fast_tanh(double x) {
  const double t = std::exp(-2.0 * std::fabs(x));
  return std::copysign((1.0 - t) / (1.0 + t), x);
}

}  // namespace

double Activation::operator()(double z) const {
  switch (kind) {
    case ActivationKind::logistic: return 1.0 / (1.0 + std::exp(-z));
    case ActivationKind::tanh: return a * fast_tanh(b * z);
    case ActivationKind::linear: return z;
  }
  return z;
}

double Activation::derivative(double z) const {
  switch (kind) {
    case ActivationKind::logistic: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case ActivationKind::tanh: {
      const double t = fast_tanh(b * z);
      return a * b * (1.0 - t * t);
    }
    case ActivationKind::linear: return 1.0;
  }
  return 1.0;
}

std::string Activation::tag() const {
  switch (kind) {
    case ActivationKind::logistic: return "logistic";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::linear: return "linear";
  }
  return "linear";
}

Network::Network(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations)
    : sizes_(std::move(layer_sizes)), activations_(std::move(activations)) {
  if (sizes_.size() < 2) throw Error(ErrorKind::shape, "network needs input and output layers");
  for (std::size_t s : sizes_) {
    if (s == 0) throw Error(ErrorKind::shape, "layer sizes must be positive");
  }
  if (activations_.size() != sizes_.size() - 1) {
    throw Error(ErrorKind::shape, fmt::format("{} layers need {} activations, got {}", sizes_.size(),
                                              sizes_.size() - 1, activations_.size()));
  }
  for (const auto& act : activations_) {
    if (act.kind == ActivationKind::tanh && !(act.a > 0.0 && act.b > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "tanh activation needs a > 0 and b > 0");
    }
  }
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    weights_.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sizes_[i] + 1),
                                             static_cast<Eigen::Index>(sizes_[i + 1])));
  }
}

Network Network::initialized(std::vector<std::size_t> layer_sizes,
                             std::vector<Activation> activations, std::uint64_t seed) {
  Network net(std::move(layer_sizes), std::move(activations));
  auto rng = make_rng(seed);
  for (std::size_t i = 0; i < net.weights_.size(); ++i) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(net.sizes_[i] + net.sizes_[i + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto& w = net.weights_[i];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
  }
  return net;
}

bool operator==(const Network& lhs, const Network& rhs) {
  if (lhs.sizes_ != rhs.sizes_ || lhs.activations_ != rhs.activations_) return false;
  for (std::size_t i = 0; i < lhs.weights_.size(); ++i) {
    if (lhs.weights_[i] != rhs.weights_[i]) return false;
  }
  return true;
}

namespace {

Eigen::MatrixXd apply(const Activation& act, const Eigen::MatrixXd& z) {
  if (act.kind == ActivationKind::linear) return z;
  return z.unaryExpr([&act](double v) { return act(v); });
}

// Derivative expressed through the layer output y = f(z), avoiding a second
// transcendental call per unit.
Eigen::MatrixXd derivative_from_output(const Activation& act, const Eigen::MatrixXd& y) {
  switch (act.kind) {
    case ActivationKind::logistic: return y.array() * (1.0 - y.array());
    case ActivationKind::tanh: {
      const double ab = act.a * act.b;
      const double inv_a2 = 1.0 / (act.a * act.a);
      return ab * (1.0 - y.array().square() * inv_a2);
    }
    case ActivationKind::linear: break;
  }
  return Eigen::MatrixXd::Ones(y.rows(), y.cols());
}

// Pre-activations z and outputs y of every layer for a batch.
struct Trace {
  std::vector<Eigen::MatrixXd> pre;   // pre[i]: layer i+1
  std::vector<Eigen::MatrixXd> post;  // post[0]: inputs, post[i]: layer i
};

// Affine map: bias is the last row of w.
Eigen::MatrixXd affine(const Eigen::MatrixXd& in, const Eigen::MatrixXd& w) {
  const Eigen::Index n = in.cols();
  Eigen::MatrixXd out(in.rows(), w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index s = 0; s < in.rows(); ++s) {
      double acc = w(n, j);
      for (Eigen::Index k = 0; k < n; ++k) acc += in(s, k) * w(k, j);
      out(s, j) = acc;
    }
  }
  return out;
}

Trace run(const Network& net, const Eigen::MatrixXd& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != net.inputs()) {
    throw Error(ErrorKind::shape, fmt::format("network expects {} inputs, got {}", net.inputs(),
                                              inputs.cols()));
  }
  Trace t;
  t.pre.reserve(net.weights().size());
  t.post.reserve(net.weights().size() + 1);
  t.post.push_back(inputs);
  for (std::size_t i = 0; i < net.weights().size(); ++i) {
    t.pre.push_back(affine(t.post.back(), net.weights()[i]));
    t.post.push_back(apply(net.activations()[i], t.pre.back()));
  }
  return t;
}

void check_batch(const Network& net, const TrainingBatch& batch) {
  if (batch.inputs.rows() != batch.targets.size() || batch.targets.size() == 0) {
    throw Error(ErrorKind::shape, "batch inputs and targets must be non-empty and equally long");
  }
  if (net.outputs() != 1) throw Error(ErrorKind::shape, "loss is defined for single-output networks");
}

}  // namespace

Eigen::VectorXd forward(const Network& net, const Eigen::MatrixXd& inputs) {
  return run(net, inputs).post.back().col(0);
}

double forward(const Network& net, std::span<const double> input) {
  if (input.size() != net.inputs()) {
    throw Error(ErrorKind::shape, fmt::format("network expects {} inputs, got {}", net.inputs(),
                                              input.size()));
  }
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = input[i];
  return run(net, row).post.back()(0, 0);
}

double loss(const Network& net, const TrainingBatch& batch) {
  check_batch(net, batch);
  const Eigen::VectorXd err = forward(net, batch.inputs) - batch.targets;
  return err.squaredNorm() / static_cast<double>(batch.size());
}

namespace {

Gradients backprop(const Network& net, const TrainingBatch& batch, double* loss_out) {
  const auto t = run(net, batch.inputs);
  const std::size_t layers = net.weights().size();
  Gradients grads(layers);

  const Eigen::VectorXd err = t.post.back().col(0) - batch.targets;
  if (loss_out) *loss_out = err.squaredNorm() / static_cast<double>(batch.size());
  Eigen::MatrixXd delta = (2.0 / static_cast<double>(batch.size())) * err;
  for (std::size_t i = layers; i-- > 0;) {
    delta.array() *= derivative_from_output(net.activations()[i], t.post[i + 1]).array();
    const auto& in = t.post[i];
    const auto& w = net.weights()[i];
    const Eigen::Index n = in.cols();
    auto& g = grads[i];
    g.resize(w.rows(), w.cols());
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        double acc = 0.0;
        for (Eigen::Index s = 0; s < in.rows(); ++s) acc += in(s, k) * delta(s, j);
        g(k, j) = acc;
      }
      g(n, j) = delta.col(j).sum();
    }
    if (i > 0) {
      Eigen::MatrixXd prev(delta.rows(), n);
      for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index s = 0; s < delta.rows(); ++s) {
          double acc = 0.0;
          for (Eigen::Index j = 0; j < w.cols(); ++j) acc += delta(s, j) * w(k, j);
          prev(s, k) = acc;
        }
      }
      delta = std::move(prev);
    }
  }
  return grads;
}

}  // namespace

Gradients gradients(const Network& net, const TrainingBatch& batch) {
  check_batch(net, batch);
  return backprop(net, batch, nullptr);
}

AdamState::AdamState(const Network& net, AdamConfig cfg) : config(cfg) {
  for (const auto& w : net.weights()) {
    first_moment.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    second_moment.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
}

void adam_step(Network& net, AdamState& state, const Gradients& grads) {
  auto& weights = net.weights();
  if (grads.size() != weights.size() || state.first_moment.size() != weights.size()) {
    throw Error(ErrorKind::shape, "adam_step: gradient/state/weight layer counts differ");
  }
  ++state.step;
  const auto& cfg = state.config;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (grads[i].rows() != weights[i].rows() || grads[i].cols() != weights[i].cols()) {
      throw Error(ErrorKind::shape, fmt::format("adam_step: gradient {} has wrong shape", i));
    }
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grads[i];
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grads[i].cwiseAbs2();
    weights[i].array() -= cfg.learning_rate * (m.array() / correction1) /
                          ((v.array() / correction2).sqrt() + cfg.epsilon);
  }
}

std::vector<double> train(Network& net, AdamState& state, const TrainingBatch& batch,
                          std::size_t epochs) {
  std::vector<double> history;
  history.reserve(epochs + 1);
  check_batch(net, batch);
  for (std::size_t e = 0; e < epochs; ++e) {
    double current = 0.0;
    auto grads = backprop(net, batch, &current);
    history.push_back(current);
    adam_step(net, state, grads);
  }
  history.push_back(loss(net, batch));
  return history;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error(ErrorKind::parse, fmt::format("checkpoint: bad number '{}'", token));
  }
  return v;
}

std::string expect_word(std::istream& in, const char* word) {
  std::string token;
  if (!(in >> token) || token != word) {
    throw Error(ErrorKind::parse, fmt::format("checkpoint: expected '{}', got '{}'", word, token));
  }
  return token;
}

std::size_t read_size(std::istream& in) {
  std::size_t v = 0;
  if (!(in >> v)) throw Error(ErrorKind::parse, "checkpoint: expected an integer");
  return v;
}

}  // namespace

void save_checkpoint(const Network& net, std::ostream& out) {
  out << "mktlab-ffnn 1\n";
  out << "layers " << net.layer_sizes().size() << "\n";
  out << "sizes";
  for (std::size_t s : net.layer_sizes()) out << ' ' << s;
  out << "\n";
  for (std::size_t i = 0; i < net.activations().size(); ++i) {
    const auto& act = net.activations()[i];
    out << "activation " << (i + 1) << ' ' << act.tag();
    if (act.kind == ActivationKind::tanh) {
      out << ' ' << format_double(act.a) << ' ' << format_double(act.b);
    }
    out << "\n";
  }
  for (std::size_t i = 0; i < net.weights().size(); ++i) {
    const auto& w = net.weights()[i];
    out << "weights " << i << ' ' << w.rows() << ' ' << w.cols() << "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        if (c > 0) out << ' ';
        out << format_double(w(r, c));
      }
      out << "\n";
    }
  }
}

Network load_checkpoint(std::istream& in) {
  expect_word(in, "mktlab-ffnn");
  if (read_size(in) != 1) throw Error(ErrorKind::parse, "checkpoint: unsupported version");
  expect_word(in, "layers");
  const std::size_t layers = read_size(in);
  if (layers < 2 || layers > 64) throw Error(ErrorKind::parse, "checkpoint: bad layer count");
  expect_word(in, "sizes");
  std::vector<std::size_t> sizes(layers);
  for (auto& s : sizes) s = read_size(in);

  std::vector<Activation> acts;
  for (std::size_t i = 1; i < layers; ++i) {
    expect_word(in, "activation");
    if (read_size(in) != i) throw Error(ErrorKind::parse, "checkpoint: activations out of order");
    std::string tag;
    in >> tag;
    if (tag == "logistic") {
      acts.push_back(Activation::logistic());
    } else if (tag == "linear") {
      acts.push_back(Activation::linear());
    } else if (tag == "tanh") {
      std::string a, b;
      in >> a >> b;
      acts.push_back(Activation::tanh(parse_double(a), parse_double(b)));
    } else {
      throw Error(ErrorKind::parse, fmt::format("checkpoint: unknown activation '{}'", tag));
    }
  }

  Network net(sizes, acts);
  for (std::size_t i = 0; i + 1 < layers; ++i) {
    expect_word(in, "weights");
    auto& w = net.weights()[i];
    if (read_size(in) != i || read_size(in) != static_cast<std::size_t>(w.rows()) ||
        read_size(in) != static_cast<std::size_t>(w.cols())) {
      throw Error(ErrorKind::parse, fmt::format("checkpoint: weight block {} has wrong header", i));
    }
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        std::string token;
        if (!(in >> token)) throw Error(ErrorKind::parse, "checkpoint: truncated weights");
        w(r, c) = parse_double(token);
      }
    }
  }
  return net;
}

}  // namespace mktlab::ffnn
