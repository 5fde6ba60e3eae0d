#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dbc/classifier.hpp"
#include "dbc/dataset.hpp"
#include "dbc/error.hpp"

namespace dbc {

enum class CrossingMethod { linear_scan, bisection };

std::string to_string(CrossingMethod method);
CrossingMethod parse_crossing_method(const std::string& name);

struct CrossingConfig {
  /// Resolution on the interpolation parameter lambda; 0 < epsilon < 1.
  double epsilon = 1.0 / 256.0;
  CrossingMethod method = CrossingMethod::bisection;
  /// Accept a probe as soon as |f(c) - 0.5| <= tolerance.
  std::optional<double> tolerance_on_f;
};

/// A boundary point c = lambda * a + (1 - lambda) * b on the segment [a, b].
///
/// Bisection certificate: lambda lies in [lambda_lo, lambda_hi], the bracket width is
/// at most epsilon and f straddles 0.5 across it (f(lo) >= 0.5 > f(hi) on the b-to-a
/// orientation). An exact hit f(c) = 0.5 collapses the bracket to lambda. For the linear
/// scan the bracket is the scan cell around lambda and carries no straddle guarantee.
struct Crossing {
  Eigen::VectorXd point;
  double lambda = 0.0;
  double value = 0.0;  // f(point)
  double lambda_lo = 0.0;
  double lambda_hi = 1.0;
  std::size_t evaluations = 0;
};

/// Strict single-segment search. Requires f(a) < 0.5 <= f(b) and a != b; violations
/// throw DataError rather than returning a guess.
///
/// linear_scan walks lambda = 0, eps, 2 eps, ... and keeps the probe closest to the
/// boundary. bisection halves the bracket [0, 1]; each probe is the midpoint of the
/// current bracket and the search stops when the bracket holding the latest probe is
/// no wider than eps. That probe is returned, so f(c) comes without an extra
/// evaluation: at most ceil(log2(1/eps)) + 2 evaluations including both endpoints.
Crossing find_crossing(const ClassifierContract& f, const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b, const CrossingConfig& config);

/// Outcome of one segment in a batch search.
struct CrossingOutcome {
  std::optional<Crossing> crossing;
  std::string failure;  // set when crossing is empty
};

/// Batch search over the segments (A.col(j), B.col(j)). All segments advance in
/// lockstep so every round is one batched classifier call. Unlike find_crossing,
/// segments with f(a) >= 0.5 > f(b) are searched with the roles exchanged (lambda is
/// still reported relative to the given a and b); segments whose ends sit on the same
/// side of 0.5, or that are degenerate, come back as failures.
std::vector<CrossingOutcome> find_crossings(const ClassifierContract& f,
                                            const Eigen::Ref<const Eigen::MatrixXd>& a,
                                            const Eigen::Ref<const Eigen::MatrixXd>& b,
                                            const CrossingConfig& config);

enum class SetKind { global, local };

std::string to_string(SetKind kind);

/// Audit trail for one column of an adversarial set.
struct ExampleProvenance {
  std::size_t pair_index = 0;  // position in the sampled pair sequence
  std::size_t index_a = 0;     // dataset row on the f < 0.5 end (class 0 side)
  std::size_t index_b = 0;     // dataset row on the f >= 0.5 end (class 1 side)
  double lambda = 0.0;
  double value = 0.0;
};

struct CrossingFailureRecord {
  std::size_t pair_index = 0;
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  std::string reason;
};

/// The matrix of boundary samples (dimension x m, one example per column).
struct AdversarialSet {
  Eigen::MatrixXd points;
  SetKind kind = SetKind::global;
  std::vector<ExampleProvenance> provenance;
  std::vector<CrossingFailureRecord> failures;

  std::size_t dimension() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
};

/// Crossing failures above this fraction abort a batch.
inline constexpr double kMaxFailureRate = 0.10;

/// Thrown when failures make a set or batch unusable. Carries the failure log.
class CrossingFailureError : public DataError {
 public:
  CrossingFailureError(const std::string& what, std::vector<CrossingFailureRecord> failures)
      : DataError(what), failures_(std::move(failures)) {}
  const std::vector<CrossingFailureRecord>& failures() const noexcept { return failures_; }

 private:
  std::vector<CrossingFailureRecord> failures_;
};

/// One crossing per sampled pair (sample_pairs(dataset, reps, seed)), columns in
/// sampling order. Failed pairs are logged and dropped; more than 10% failures, or
/// fewer than two surviving columns, throws CrossingFailureError.
AdversarialSet global_adversarial_set(const ClassifierContract& f, const LabeledDataset& dataset,
                                      std::size_t reps, const CrossingConfig& config,
                                      std::uint64_t seed);

/// Which pair member is expanded to its nearest same-class neighbors.
enum class Anchor { a, b };

/// Local set for one pair: the anchor (b by default) together with its k nearest
/// same-class neighbors forms k + 1 endpoints, each joined to the other pair member
/// and crossed. The anchor itself is always the first column. Failed columns are
/// logged and dropped; fewer than two survivors throws CrossingFailureError.
AdversarialSet local_adversarial_set(const ClassifierContract& f, const LabeledDataset& dataset,
                                     const ClassPair& pair, std::size_t k,
                                     const CrossingConfig& config, Anchor anchor = Anchor::b,
                                     std::size_t pair_index = 0);

void validate(const CrossingConfig& config);

}  // namespace dbc
