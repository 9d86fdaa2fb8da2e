#include "relubits/net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relubits/error.hpp"
#include "relubits/rng.hpp"

namespace relubits::net {

void MlpNetwork::validate() const {
  require(layer_dims.size() >= 2, Status::shape, "network needs at least input and output dims");
  for (std::size_t d : layer_dims) require(d > 0, Status::shape, "layer widths must be positive");
  require(weights.size() == layer_dims.size() - 1 && biases.size() == weights.size(),
          Status::shape, "number of weight matrices does not match layer_dims");
  for (std::size_t t = 0; t < weights.size(); ++t) {
    require(weights[t].rows() == layer_dims[t + 1] && weights[t].cols() == layer_dims[t],
            Status::shape, "weight matrix " + std::to_string(t) + " has the wrong shape");
    require(biases[t].size() == layer_dims[t + 1], Status::shape,
            "bias " + std::to_string(t) + " has the wrong length");
  }
}

MlpNetwork initialize(std::span<const std::size_t> layer_dims, std::uint64_t seed) {
  MlpNetwork net;
  net.layer_dims.assign(layer_dims.begin(), layer_dims.end());
  require(net.layer_dims.size() >= 2, Status::shape, "network needs at least input and output dims");
  Rng rng(seed);
  for (std::size_t t = 0; t + 1 < net.layer_dims.size(); ++t) {
    const std::size_t in = net.layer_dims[t];
    const std::size_t out = net.layer_dims[t + 1];
    require(in > 0 && out > 0, Status::shape, "layer widths must be positive");
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    Matrix w(out, in);
    for (double& v : w.data()) v = rng.uniform(-a, a);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(out, 0.0);
  }
  return net;
}

namespace {

// Pre-activations of every layer plus the post-ReLU hidden outputs.
struct Activations {
  std::vector<std::vector<double>> pre;     // one per transition
  std::vector<std::vector<double>> hidden;  // post-ReLU, one per hidden layer
};

Activations run(const MlpNetwork& net, std::span<const double> x) {
  require(x.size() == net.input_dim(), Status::shape,
          "input has length " + std::to_string(x.size()) + ", network expects " +
              std::to_string(net.input_dim()));
  Activations act;
  std::vector<double> prev(x.begin(), x.end());
  for (std::size_t t = 0; t < net.transitions(); ++t) {
    std::vector<double> z = matvec(net.weights[t], prev);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += net.biases[t][i];
    act.pre.push_back(z);
    if (t + 1 < net.transitions()) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;
      act.hidden.push_back(z);
      prev = std::move(z);
    }
  }
  return act;
}

struct ParamGrads {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  explicit ParamGrads(const MlpNetwork& net) {
    for (std::size_t t = 0; t < net.transitions(); ++t) {
      weights.emplace_back(net.weights[t].rows(), net.weights[t].cols());
      biases.emplace_back(net.biases[t].size(), 0.0);
    }
  }
};

// Cross-entropy and d loss / d logits.
double softmax_xent(std::span<const double> logits, int label, std::vector<double>& dlogits) {
  const double m = *std::ranges::max_element(logits);
  double sum = 0.0;
  dlogits.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    dlogits[i] = std::exp(logits[i] - m);
    sum += dlogits[i];
  }
  for (double& p : dlogits) p /= sum;
  const auto y = static_cast<std::size_t>(label);
  dlogits[y] -= 1.0;
  return m + std::log(sum) - logits[y];
}

LossGradient backprop(const MlpNetwork& net, std::span<const double> x, int label,
                      ParamGrads* grads) {
  require(label >= 0 && static_cast<std::size_t>(label) < net.num_classes(), Status::label,
          "label " + std::to_string(label) + " out of range for " +
              std::to_string(net.num_classes()) + " classes");
  const Activations act = run(net, x);

  LossGradient out;
  std::vector<double> delta;
  out.loss = softmax_xent(act.pre.back(), label, delta);

  for (std::size_t t = net.transitions(); t-- > 0;) {
    std::span<const double> input = t == 0 ? x : std::span<const double>(act.hidden[t - 1]);
    const Matrix& w = net.weights[t];
    if (grads != nullptr) {
      for (std::size_t r = 0; r < w.rows(); ++r) {
        if (delta[r] == 0.0) continue;
        auto g = grads->weights[t].row(r);
        for (std::size_t c = 0; c < w.cols(); ++c) g[c] += delta[r] * input[c];
        grads->biases[t][r] += delta[r];
      }
    }
    std::vector<double> back(w.cols(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
      if (delta[r] == 0.0) continue;
      const auto wr = w.row(r);
      for (std::size_t c = 0; c < w.cols(); ++c) back[c] += wr[c] * delta[r];
    }
    if (t > 0) {
      const auto& z = act.pre[t - 1];
      for (std::size_t c = 0; c < back.size(); ++c)
        if (!(z[c] > 0.0)) back[c] = 0.0;
    }
    delta = std::move(back);
  }
  out.grad = std::move(delta);
  return out;
}

}  // namespace

ForwardTrace forward(const MlpNetwork& net, std::span<const double> x) {
  Activations act = run(net, x);
  ForwardTrace trace;
  trace.input.assign(x.begin(), x.end());
  trace.layer_outputs = std::move(act.hidden);
  trace.logits = std::move(act.pre.back());
  return trace;
}

LossGradient loss_and_input_gradient(const MlpNetwork& net, std::span<const double> x,
                                     int label) {
  return backprop(net, x, label, nullptr);
}

int predict(const MlpNetwork& net, std::span<const double> x) {
  const auto logits = forward(net, x).logits;
  return static_cast<int>(std::ranges::max_element(logits) - logits.begin());
}

EpochLog evaluate(const MlpNetwork& net, const Dataset& data) {
  EpochLog log;
  if (data.size() == 0) return log;
  std::size_t correct = 0;
  double total = 0.0;
  std::vector<double> scratch;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto logits = forward(net, data.features.row(i)).logits;
    total += softmax_xent(logits, data.labels[i], scratch);
    const auto arg = static_cast<int>(std::ranges::max_element(logits) - logits.begin());
    if (arg == data.labels[i]) ++correct;
  }
  log.mean_loss = total / static_cast<double>(data.size());
  log.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return log;
}

MlpNetwork train_sgd(const Dataset& data, std::span<const std::size_t> layer_dims,
                     const SgdConfig& cfg, std::vector<EpochLog>* log) {
  require(data.size() > 0, Status::data, "training data is empty");
  require(!layer_dims.empty() && data.dim() == layer_dims.front(), Status::shape,
          "sample dimension does not match the input layer");
  require(cfg.batch_size > 0, Status::config, "batch size must be positive");
  require(std::isfinite(cfg.learning_rate) && cfg.learning_rate > 0.0, Status::config,
          "learning rate must be positive");
  for (int y : data.labels)
    require(y >= 0 && static_cast<std::size_t>(y) < layer_dims.back(), Status::label,
            "training label out of range");

  MlpNetwork net = initialize(layer_dims, cfg.seed);
  if (log != nullptr) {
    log->clear();
    log->push_back(evaluate(net, data));
  }

  Rng shuffle_rng(cfg.seed ^ 0x5DEECE66DULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      ParamGrads grads(net);
      for (std::size_t i = start; i < stop; ++i)
        backprop(net, data.features.row(order[i]), data.labels[order[i]], &grads);
      const double scale = cfg.learning_rate / static_cast<double>(stop - start);
      for (std::size_t t = 0; t < net.transitions(); ++t) {
        auto w = net.weights[t].data();
        auto g = grads.weights[t].data();
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= scale * g[j];
        for (std::size_t j = 0; j < net.biases[t].size(); ++j)
          net.biases[t][j] -= scale * grads.biases[t][j];
      }
    }
    if (log != nullptr) {
      EpochLog e = evaluate(net, data);
      e.epoch = epoch;
      log->push_back(e);
    }
  }
  return net;
}

void AttackConfig::validate() const {
  require(std::isfinite(epsilon) && epsilon >= 0.0, Status::config,
          "epsilon must be finite and non-negative");
  require(clip_min < clip_max, Status::config, "clip_min must be below clip_max");
  if (kind == AttackKind::pgd) {
    require(pgd_steps >= 1, Status::config, "PGD needs at least one step");
    require(std::isfinite(pgd_step_size) && pgd_step_size > 0.0, Status::config,
            "PGD step size must be positive");
    require(epsilon == 0.0 || pgd_step_size <= epsilon, Status::config,
            "PGD step size must not exceed epsilon");
  }
}

namespace {

double sign_of(double g) { return g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::vector<double> attack(const MlpNetwork& net, std::span<const double> x, int label,
                           const AttackConfig& cfg) {
  cfg.validate();
  for (double v : x)
    require(v >= cfg.clip_min && v <= cfg.clip_max, Status::data,
            "attack input lies outside the clip range");
  std::vector<double> adv(x.begin(), x.end());
  if (cfg.epsilon == 0.0) return adv;

  const std::size_t steps = cfg.kind == AttackKind::fgsm ? 1 : cfg.pgd_steps;
  const double step = cfg.kind == AttackKind::fgsm ? cfg.epsilon : cfg.pgd_step_size;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto g = loss_and_input_gradient(net, adv, label).grad;
    for (std::size_t i = 0; i < adv.size(); ++i) {
      double v = adv[i] + step * sign_of(g[i]);
      v = std::clamp(v, x[i] - cfg.epsilon, x[i] + cfg.epsilon);
      adv[i] = std::clamp(v, cfg.clip_min, cfg.clip_max);
    }
  }
  return adv;
}

AttackKind parse_attack_kind(const std::string& name) {
  if (name == "fgsm") return AttackKind::fgsm;
  if (name == "pgd") return AttackKind::pgd;
  fail(Status::config, "unknown attack '" + name + "' (expected fgsm or pgd)");
}

const char* attack_kind_name(AttackKind kind) {
  return kind == AttackKind::fgsm ? "fgsm" : "pgd";
}

}  // namespace relubits::net
