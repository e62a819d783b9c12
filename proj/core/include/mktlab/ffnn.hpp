#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mktlab::ffnn {

enum class ActivationKind { logistic, tanh, linear };

/// phi(z) = 1/(1+exp(-z)), a*tanh(b*z) or z.
struct Activation {
  ActivationKind kind = ActivationKind::tanh;
  double a = 1.7159;
  double b = 2.0 / 3.0;

  static Activation logistic() { return {ActivationKind::logistic, 1.0, 1.0}; }
  static Activation tanh(double a = 1.7159, double b = 2.0 / 3.0) {
    return {ActivationKind::tanh, a, b};
  }
  static Activation linear() { return {ActivationKind::linear, 1.0, 1.0}; }

  [[nodiscard]] double operator()(double z) const;
  [[nodiscard]] double derivative(double z) const;
  [[nodiscard]] std::string tag() const;

  friend bool operator==(const Activation&, const Activation&) = default;
};

/// Fully connected feed-forward network. Weight matrix i maps layer i to
/// layer i+1 and has sizes[i] + 1 rows: the extra last row holds the weights
/// of the bias neuron, whose output is always 1.
class Network {
 public:
  /// `activations` has one entry per non-input layer. Weights start at zero.
  Network(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations);

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)).
  static Network initialized(std::vector<std::size_t> layer_sizes,
                             std::vector<Activation> activations, std::uint64_t seed);

  [[nodiscard]] const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  [[nodiscard]] const std::vector<Activation>& activations() const noexcept { return activations_; }
  [[nodiscard]] const std::vector<Eigen::MatrixXd>& weights() const noexcept { return weights_; }
  [[nodiscard]] std::vector<Eigen::MatrixXd>& weights() noexcept { return weights_; }
  [[nodiscard]] std::size_t inputs() const noexcept { return sizes_.front(); }
  [[nodiscard]] std::size_t outputs() const noexcept { return sizes_.back(); }

  friend bool operator==(const Network& lhs, const Network& rhs);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Activation> activations_;
  std::vector<Eigen::MatrixXd> weights_;
};

/// Samples in rows.
struct TrainingBatch {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(targets.size()); }
};

using Gradients = std::vector<Eigen::MatrixXd>;

/// First output of the network for one input vector.
[[nodiscard]] double forward(const Network& net, std::span<const double> input);
/// First output for every row of `inputs`.
[[nodiscard]] Eigen::VectorXd forward(const Network& net, const Eigen::MatrixXd& inputs);

/// Mean squared error over the batch (single-output networks).
[[nodiscard]] double loss(const Network& net, const TrainingBatch& batch);

/// Exact gradient of loss() with respect to every weight, bias rows included.
[[nodiscard]] Gradients gradients(const Network& net, const TrainingBatch& batch);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<Eigen::MatrixXd> first_moment;
  std::vector<Eigen::MatrixXd> second_moment;
  AdamConfig config;

  AdamState() = default;
  AdamState(const Network& net, AdamConfig cfg);
};

/// One bias-corrected ADAM update.
void adam_step(Network& net, AdamState& state, const Gradients& grads);

/// `epochs` full-batch gradient + ADAM steps. Returns the loss before each
/// step followed by the final loss (epochs + 1 values).
std::vector<double> train(Network& net, AdamState& state, const TrainingBatch& batch,
                          std::size_t epochs);

/// Plain-text checkpoint:
///
///     mktlab-ffnn 1
///     layers <L>
///     sizes <n0> ... <nL-1>
///     activation <layer> <tag> [<a> <b>]     (one line per non-input layer)
///     weights <i> <rows> <cols>
///     <row-major values, one matrix row per line>
///
/// Values use shortest round-trip formatting, so save/load is bit-exact.
void save_checkpoint(const Network& net, std::ostream& out);
[[nodiscard]] Network load_checkpoint(std::istream& in);

}  // namespace mktlab::ffnn
