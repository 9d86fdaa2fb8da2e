#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "relubits/dataset.hpp"
#include "relubits/matrix.hpp"

namespace relubits::net {

/// Dense feed-forward network. Every hidden layer is ReLU; the last layer
/// emits raw logits.
///
/// layer_dims = [input, hidden_1, ..., hidden_L, classes]; weights[i] has
/// shape (layer_dims[i+1], layer_dims[i]).
struct MlpNetwork {
  std::vector<std::size_t> layer_dims;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t num_classes() const { return layer_dims.back(); }
  std::size_t hidden_layers() const { return layer_dims.size() - 2; }
  std::size_t transitions() const { return weights.size(); }

  /// Throws Status::shape if the shapes disagree with layer_dims.
  void validate() const;

  bool operator==(const MlpNetwork&) const = default;
};

/// Seeded Glorot-uniform weights, zero biases.
MlpNetwork initialize(std::span<const std::size_t> layer_dims, std::uint64_t seed);

struct ForwardTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> layer_outputs;  // post-ReLU, one per hidden layer
  std::vector<double> logits;
};

ForwardTrace forward(const MlpNetwork& net, std::span<const double> x);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d x
};

/// Softmax cross-entropy of the logits against `label` and its gradient
/// with respect to the input. The ReLU derivative at exactly zero is 0.
LossGradient loss_and_input_gradient(const MlpNetwork& net, std::span<const double> x,
                                     int label);

struct SgdConfig {
  std::uint64_t seed = 0;
  std::size_t epochs = 50;
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
};

struct EpochLog {
  std::size_t epoch = 0;  // 0 is the untrained network
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

/// Minibatch SGD on mean cross-entropy. Deterministic for a given seed:
/// the initialization uses `seed`, the per-epoch shuffles use a stream
/// derived from it.
MlpNetwork train_sgd(const Dataset& data, std::span<const std::size_t> layer_dims,
                     const SgdConfig& cfg, std::vector<EpochLog>* log = nullptr);

/// Mean cross-entropy and accuracy of `net` on `data`.
EpochLog evaluate(const MlpNetwork& net, const Dataset& data);

int predict(const MlpNetwork& net, std::span<const double> x);

enum class AttackKind { fgsm, pgd };

struct AttackConfig {
  AttackKind kind = AttackKind::fgsm;
  double epsilon = 0.1;
  std::size_t pgd_steps = 10;
  double pgd_step_size = 0.01;
  double clip_min = 0.0;
  double clip_max = 1.0;

  /// Throws Status::config.
  void validate() const;
};

/// Untargeted L-infinity attack that ascends the cross-entropy of `label`.
/// The result stays inside the epsilon ball around x and the clip range.
std::vector<double> attack(const MlpNetwork& net, std::span<const double> x, int label,
                           const AttackConfig& cfg);

AttackKind parse_attack_kind(const std::string& name);
const char* attack_kind_name(AttackKind kind);

}  // namespace relubits::net
