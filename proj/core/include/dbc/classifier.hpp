#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace dbc {

/// A deterministic binary decision function f: R^n -> [0, 1]. Class 1 is the
/// f >= 0.5 side. Implementations must be pure: identical input gives identical
/// output and evaluation may run concurrently from many threads.
class ClassifierContract {
 public:
  virtual ~ClassifierContract() = default;

  virtual std::size_t dimension() const = 0;

  /// Evaluates f on every column of `inputs` (dimension x m).
  virtual Eigen::VectorXd decide_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const = 0;

  double decide(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return decide_batch(x)(0);
  }
};

double sigmoid(double z) noexcept;

/// sigmoid(w . x + bias). The reference linear boundary used throughout the tests.
class LinearClassifier final : public ClassifierContract {
 public:
  LinearClassifier(Eigen::VectorXd weights, double bias);

  std::size_t dimension() const override { return static_cast<std::size_t>(weights_.size()); }
  Eigen::VectorXd decide_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const override;

  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }

 private:
  Eigen::VectorXd weights_;
  double bias_;
};

/// Adapts a per-point callable; convenient for hand-built decision functions.
class FunctionClassifier final : public ClassifierContract {
 public:
  using Fn = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

  FunctionClassifier(std::size_t dimension, Fn fn);

  std::size_t dimension() const override { return dimension_; }
  Eigen::VectorXd decide_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const override;

 private:
  std::size_t dimension_;
  Fn fn_;
};

}  // namespace dbc
