#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dbc/classifier.hpp"
#include "dbc/dataset.hpp"

namespace dbc {

enum class Activation { relu, tanh };

std::string to_string(Activation activation);
Activation parse_activation(const std::string& name);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd biases;   // out
};

/// Fully connected network [n, h1, ..., hL, 1] with a shared hidden activation and a
/// sigmoid output unit. Evaluation never applies dropout.
class MlpModel final : public ClassifierContract {
 public:
  /// All-zero parameters for the given architecture.
  MlpModel(std::vector<std::size_t> layer_sizes, Activation hidden = Activation::relu);

  /// Takes ownership of explicit layers; shapes must chain and end in a single output.
  MlpModel(std::vector<DenseLayer> layers, Activation hidden);

  /// Glorot-uniform weights, zero biases, drawn from the init stream of `seed`.
  static MlpModel glorot(std::vector<std::size_t> layer_sizes, Activation hidden,
                         std::uint64_t seed);

  std::size_t dimension() const override { return layer_sizes_.front(); }
  Eigen::VectorXd decide_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const override;

  /// Output-unit pre-activations (logits) for each column.
  Eigen::VectorXd logits(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;

  const std::vector<std::size_t>& layer_sizes() const noexcept { return layer_sizes_; }
  Activation hidden_activation() const noexcept { return hidden_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& mutable_layers() noexcept { return layers_; }

  std::size_t parameter_count() const noexcept;

  /// Parameters flattened layer by layer: weights row-major, then biases.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);

 private:
  void validate() const;

  std::vector<std::size_t> layer_sizes_;
  Activation hidden_;
  std::vector<DenseLayer> layers_;
};

/// Sum over layers of in*out + out.
std::size_t parameter_count(std::span<const std::size_t> layer_sizes);

double forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Fraction of samples with (f >= 0.5) == label.
double accuracy(const ClassifierContract& f, const LabeledDataset& dataset);

struct LossGradient {
  double loss = 0.0;                    // mean binary cross-entropy
  std::vector<DenseLayer> gradient;     // same shapes as the model layers
};

/// Mean binary cross-entropy of the evaluation-mode model over the columns of
/// `inputs`, together with its analytic gradient.
LossGradient loss_and_gradient(const MlpModel& model,
                               const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                               const Eigen::Ref<const Eigen::VectorXd>& targets);

enum class Optimizer { sgd, adam };

std::string to_string(Optimizer optimizer);
Optimizer parse_optimizer(const std::string& name);

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::adam;
  Activation hidden_activation = Activation::relu;
  /// One rate per hidden layer, or empty for no dropout.
  std::vector<double> dropout_rates;
  /// Stop after the first epoch whose train accuracy reaches this value.
  std::optional<double> target_train_accuracy;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> history;
  double final_train_accuracy = 0.0;
  bool reached_target = false;
};

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

/// Minibatch training on binary cross-entropy. Deterministic for a fixed seed.
/// Throws NumericalError naming the epoch if the loss becomes non-finite.
TrainResult train(const LabeledDataset& dataset, std::vector<std::size_t> layer_sizes,
                  const TrainConfig& config);

/// Model file format tag.
inline constexpr const char* kModelFormat = "dbc-model/1";

void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(const std::string& text);

}  // namespace dbc
