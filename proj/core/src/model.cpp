#include "dbc/model.hpp"

#include <cmath>
#include <random>

#include "dbc/error.hpp"
#include "dbc/random.hpp"

namespace dbc {

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void check_inputs(const Eigen::Ref<const Eigen::MatrixXd>& inputs, std::size_t dimension) {
  if (static_cast<std::size_t>(inputs.rows()) != dimension)
    throw DataError("input dimension " + std::to_string(inputs.rows()) +
                    " does not match classifier dimension " + std::to_string(dimension));
  if (!inputs.allFinite()) throw DataError("classifier input contains non-finite values");
}

}  // namespace

LinearClassifier::LinearClassifier(Eigen::VectorXd weights, double bias)
    : weights_(std::move(weights)), bias_(bias) {
  if (weights_.size() < 1) throw DataError("linear classifier needs at least one weight");
  if (!weights_.allFinite() || !std::isfinite(bias_))
    throw DataError("linear classifier parameters must be finite");
}

Eigen::VectorXd LinearClassifier::decide_batch(
    const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  check_inputs(inputs, dimension());
  Eigen::VectorXd z = inputs.transpose() * weights_;
  return z.unaryExpr([this](double v) { return sigmoid(v + bias_); });
}

FunctionClassifier::FunctionClassifier(std::size_t dimension, Fn fn)
    : dimension_(dimension), fn_(std::move(fn)) {}

Eigen::VectorXd FunctionClassifier::decide_batch(
    const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  check_inputs(inputs, dimension_);
  Eigen::VectorXd out(inputs.cols());
  for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
    const Eigen::VectorXd column = inputs.col(j);
    out(j) = fn_(column);
  }
  return out;
}

std::string to_string(Activation activation) {
  return activation == Activation::relu ? "relu" : "tanh";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw UsageError("unknown activation '" + name + "' (expected relu or tanh)");
}

std::size_t parameter_count(std::span<const std::size_t> layer_sizes) {
  std::size_t total = 0;
  for (std::size_t i = 1; i < layer_sizes.size(); ++i)
    total += layer_sizes[i - 1] * layer_sizes[i] + layer_sizes[i];
  return total;
}

MlpModel::MlpModel(std::vector<std::size_t> layer_sizes, Activation hidden)
    : layer_sizes_(std::move(layer_sizes)), hidden_(hidden) {
  if (layer_sizes_.size() < 2) throw DataError("architecture needs at least input and output sizes");
  for (std::size_t i = 1; i < layer_sizes_.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(layer_sizes_[i - 1]);
    const auto out = static_cast<Eigen::Index>(layer_sizes_[i]);
    layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
  validate();
}

MlpModel::MlpModel(std::vector<DenseLayer> layers, Activation hidden)
    : hidden_(hidden), layers_(std::move(layers)) {
  if (layers_.empty()) throw DataError("model needs at least one layer");
  layer_sizes_.push_back(static_cast<std::size_t>(layers_.front().weights.cols()));
  for (const auto& layer : layers_)
    layer_sizes_.push_back(static_cast<std::size_t>(layer.weights.rows()));
  validate();
}

void MlpModel::validate() const {
  for (std::size_t s : layer_sizes_)
    if (s == 0) throw DataError("layer sizes must be positive");
  if (layer_sizes_.back() != 1) throw DataError("the output layer must have exactly one unit");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& layer = layers_[i];
    const auto in = static_cast<Eigen::Index>(layer_sizes_[i]);
    const auto out = static_cast<Eigen::Index>(layer_sizes_[i + 1]);
    if (layer.weights.rows() != out || layer.weights.cols() != in || layer.biases.size() != out)
      throw DataError("layer " + std::to_string(i) + " has shape " +
                      std::to_string(layer.weights.rows()) + "x" +
                      std::to_string(layer.weights.cols()) + " with " +
                      std::to_string(layer.biases.size()) + " biases; expected " +
                      std::to_string(out) + "x" + std::to_string(in));
    if (!layer.weights.allFinite() || !layer.biases.allFinite())
      throw DataError("layer " + std::to_string(i) + " has non-finite parameters");
  }
}

MlpModel MlpModel::glorot(std::vector<std::size_t> layer_sizes, Activation hidden,
                          std::uint64_t seed) {
  MlpModel model(std::move(layer_sizes), hidden);
  auto engine = random::stream(seed, random::Stream::init);
  for (auto& layer : model.layers_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    // Row-major fill so the draw order matches the file layout.
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = dist(engine);
  }
  return model;
}

Eigen::VectorXd MlpModel::logits(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  check_inputs(inputs, dimension());
  Eigen::MatrixXd h = inputs;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weights * h;
    z.colwise() += layers_[i].biases;
    if (hidden_ == Activation::relu)
      h = z.cwiseMax(0.0);
    else
      h = z.array().tanh().matrix();
  }
  const auto& out = layers_.back();
  Eigen::VectorXd z = (out.weights * h).transpose();
  return z.array() + out.biases(0);
}

Eigen::VectorXd MlpModel::decide_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  return logits(inputs).unaryExpr([](double z) { return sigmoid(z); });
}

std::size_t MlpModel::parameter_count() const noexcept {
  return dbc::parameter_count(layer_sizes_);
}

std::vector<double> MlpModel::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) out.push_back(layer.weights(r, c));
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) out.push_back(layer.biases(r));
  }
  return out;
}

void MlpModel::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count())
    throw DataError("expected " + std::to_string(parameter_count()) + " parameters, got " +
                    std::to_string(values.size()));
  std::size_t k = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = values[k++];
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) layer.biases(r) = values[k++];
  }
  validate();
}

double forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.decide(x);
}

double accuracy(const ClassifierContract& f, const LabeledDataset& dataset) {
  const Eigen::VectorXd out = f.decide_batch(dataset.points());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < dataset.count(); ++i)
    if ((out(static_cast<Eigen::Index>(i)) >= 0.5) == (dataset.label(i) == 1)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(dataset.count());
}

}  // namespace dbc
