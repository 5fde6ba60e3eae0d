#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dbc/error.hpp"
#include "dbc/model.hpp"
#include "dbc/random.hpp"

namespace dbc {

std::string to_string(Optimizer optimizer) {
  return optimizer == Optimizer::adam ? "adam" : "sgd";
}

Optimizer parse_optimizer(const std::string& name) {
  if (name == "adam") return Optimizer::adam;
  if (name == "sgd") return Optimizer::sgd;
  throw UsageError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// Forward pass that keeps what backprop needs. With `dropout` set, hidden outputs are
// multiplied by an inverted-dropout mask drawn from `engine`.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;  // input to each layer
  std::vector<Eigen::MatrixXd> local_slope;  // d(hidden output)/d(pre-activation), incl. mask
  Eigen::RowVectorXd logits;
};

ForwardCache forward_cached(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                            const std::vector<double>* dropout, random::Engine* engine) {
  const auto& layers = model.layers();
  ForwardCache cache;
  cache.inputs.reserve(layers.size());
  cache.inputs.emplace_back(x);
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    Eigen::MatrixXd z = layers[i].weights * cache.inputs.back();
    z.colwise() += layers[i].biases;
    Eigen::MatrixXd h(z.rows(), z.cols());
    Eigen::MatrixXd slope(z.rows(), z.cols());
    if (model.hidden_activation() == Activation::relu) {
      h = z.cwiseMax(0.0);
      slope = (z.array() > 0.0).cast<double>().matrix();
    } else {
      h = z.array().tanh().matrix();
      slope = (1.0 - h.array().square()).matrix();
    }
    if (dropout != nullptr && (*dropout)[i] > 0.0) {
      const double rate = (*dropout)[i];
      const double keep_scale = 1.0 / (1.0 - rate);
      std::bernoulli_distribution keep(1.0 - rate);
      for (Eigen::Index c = 0; c < h.cols(); ++c)
        for (Eigen::Index r = 0; r < h.rows(); ++r) {
          const double m = keep(*engine) ? keep_scale : 0.0;
          h(r, c) *= m;
          slope(r, c) *= m;
        }
    }
    cache.local_slope.push_back(std::move(slope));
    cache.inputs.push_back(std::move(h));
  }
  cache.logits = layers.back().weights * cache.inputs.back();
  cache.logits.array() += layers.back().biases(0);
  return cache;
}

LossGradient backprop(const MlpModel& model, const ForwardCache& cache,
                      const Eigen::Ref<const Eigen::VectorXd>& targets) {
  const auto& layers = model.layers();
  const double m = static_cast<double>(targets.size());

  LossGradient out;
  Eigen::RowVectorXd delta(cache.logits.size());
  for (Eigen::Index j = 0; j < cache.logits.size(); ++j) {
    const double z = cache.logits(j);
    const double y = targets(j);
    out.loss += softplus(z) - y * z;
    delta(j) = (sigmoid(z) - y) / m;
  }
  out.loss /= m;

  out.gradient.resize(layers.size());
  Eigen::MatrixXd d = delta;
  for (std::size_t li = layers.size(); li-- > 0;) {
    out.gradient[li].weights = d * cache.inputs[li].transpose();
    out.gradient[li].biases = d.rowwise().sum();
    if (li > 0) {
      Eigen::MatrixXd back = layers[li].weights.transpose() * d;
      d = back.cwiseProduct(cache.local_slope[li - 1]);
    }
  }
  return out;
}

class AdamState {
 public:
  explicit AdamState(const MlpModel& model) {
    for (const auto& layer : model.layers()) {
      m_.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                    Eigen::VectorXd::Zero(layer.biases.size())});
      v_.push_back(m_.back());
    }
  }

  void step(MlpModel& model, const std::vector<DenseLayer>& grad, double lr) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    auto& layers = model.mutable_layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      update(layers[i].weights, m_[i].weights, v_[i].weights, grad[i].weights, lr, c1, c2,
             kBeta1, kBeta2, kEps);
      update(layers[i].biases, m_[i].biases, v_[i].biases, grad[i].biases, lr, c1, c2, kBeta1,
             kBeta2, kEps);
    }
  }

 private:
  template <typename P, typename G>
  static void update(P& param, P& m, P& v, const G& g, double lr, double c1, double c2,
                     double b1, double b2, double eps) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }

  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
  long t_ = 0;
};

bool parameters_finite(const MlpModel& model) {
  for (const auto& layer : model.layers())
    if (!layer.weights.allFinite() || !layer.biases.allFinite()) return false;
  return true;
}

}  // namespace

LossGradient loss_and_gradient(const MlpModel& model,
                               const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                               const Eigen::Ref<const Eigen::VectorXd>& targets) {
  if (static_cast<std::size_t>(inputs.rows()) != model.dimension())
    throw DataError("input dimension does not match model");
  if (inputs.cols() != targets.size() || inputs.cols() == 0)
    throw DataError("inputs and targets must be nonempty and of equal count");
  const ForwardCache cache = forward_cached(model, inputs, nullptr, nullptr);
  return backprop(model, cache, targets);
}

TrainResult train(const LabeledDataset& dataset, std::vector<std::size_t> layer_sizes,
                  const TrainConfig& config) {
  if (layer_sizes.size() < 2) throw DataError("architecture needs at least two layer sizes");
  if (layer_sizes.front() != dataset.dimension())
    throw DataError("architecture input size " + std::to_string(layer_sizes.front()) +
                    " does not match dataset dimension " + std::to_string(dataset.dimension()));
  if (layer_sizes.back() != 1) throw DataError("architecture must end in a single output unit");
  if (!(config.learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (config.batch_size < 1) throw UsageError("batch size must be at least 1");

  const std::size_t hidden_layers = layer_sizes.size() - 2;
  std::vector<double> dropout = config.dropout_rates;
  if (!dropout.empty() && dropout.size() != hidden_layers)
    throw UsageError("expected " + std::to_string(hidden_layers) + " dropout rates, got " +
                     std::to_string(dropout.size()));
  for (double r : dropout)
    if (!(r >= 0.0 && r < 1.0)) throw UsageError("dropout rates must lie in [0, 1)");
  const bool use_dropout =
      std::any_of(dropout.begin(), dropout.end(), [](double r) { return r > 0.0; });

  TrainResult result{MlpModel::glorot(std::move(layer_sizes), config.hidden_activation, config.seed),
                     {}};
  MlpModel& model = result.model;

  const std::size_t count = dataset.count();
  Eigen::VectorXd targets(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) targets(static_cast<Eigen::Index>(i)) = dataset.label(i);

  auto shuffle_engine = random::stream(config.seed, random::Stream::shuffle);
  auto dropout_engine = random::stream(config.seed, random::Stream::dropout);
  AdamState adam(model);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::min(config.batch_size, count);
  Eigen::MatrixXd xb(static_cast<Eigen::Index>(dataset.dimension()), static_cast<Eigen::Index>(batch));
  Eigen::VectorXd yb(static_cast<Eigen::Index>(batch));

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_engine);
    for (std::size_t start = 0; start < count; start += batch) {
      const std::size_t size = std::min(batch, count - start);
      xb.resize(Eigen::NoChange, static_cast<Eigen::Index>(size));
      yb.resize(static_cast<Eigen::Index>(size));
      for (std::size_t j = 0; j < size; ++j) {
        xb.col(static_cast<Eigen::Index>(j)) = dataset.point(order[start + j]);
        yb(static_cast<Eigen::Index>(j)) = targets(static_cast<Eigen::Index>(order[start + j]));
      }
      const ForwardCache cache =
          forward_cached(model, xb, use_dropout ? &dropout : nullptr, &dropout_engine);
      const LossGradient g = backprop(model, cache, yb);
      if (!std::isfinite(g.loss))
        throw NumericalError("training diverged at epoch " + std::to_string(epoch) +
                             ": non-finite minibatch loss");
      if (config.optimizer == Optimizer::adam) {
        adam.step(model, g.gradient, config.learning_rate);
      } else {
        auto& layers = model.mutable_layers();
        for (std::size_t i = 0; i < layers.size(); ++i) {
          layers[i].weights -= config.learning_rate * g.gradient[i].weights;
          layers[i].biases -= config.learning_rate * g.gradient[i].biases;
        }
      }
    }
    if (!parameters_finite(model))
      throw NumericalError("training diverged at epoch " + std::to_string(epoch) +
                           ": non-finite parameters");

    const ForwardCache full = forward_cached(model, dataset.points(), nullptr, nullptr);
    EpochRecord record;
    record.epoch = epoch;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const double z = full.logits(static_cast<Eigen::Index>(i));
      const double y = targets(static_cast<Eigen::Index>(i));
      record.loss += softplus(z) - y * z;
      if ((sigmoid(z) >= 0.5) == (y == 1.0)) ++correct;
    }
    record.loss /= static_cast<double>(count);
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(count);
    if (!std::isfinite(record.loss))
      throw NumericalError("training diverged at epoch " + std::to_string(epoch) +
                           ": non-finite loss");
    result.report.history.push_back(record);

    if (config.target_train_accuracy && record.train_accuracy >= *config.target_train_accuracy) {
      result.report.reached_target = true;
      break;
    }
  }

  result.report.final_train_accuracy = accuracy(model, dataset);
  if (config.target_train_accuracy && !result.report.reached_target)
    result.report.reached_target = result.report.final_train_accuracy >= *config.target_train_accuracy;
  return result;
}

}  // namespace dbc
