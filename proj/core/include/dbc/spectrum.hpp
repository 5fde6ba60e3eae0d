#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dbc/boundary.hpp"
#include "dbc/classifier.hpp"
#include "dbc/dataset.hpp"

namespace dbc {

/// Eigenvalues of the second-moment matrix X X^T of an n x m point matrix, sorted
/// nonincreasing and clamped at zero. min(n, m) values are reported; for n > m they
/// come from the m x m Gram matrix X^T X, which shares the nonzero spectrum.
struct EigenSpectrum {
  std::vector<double> eigenvalues;
  std::size_t dimension = 0;
  std::size_t sample_count = 0;
  bool centered = true;
};

enum class DivisorMode {
  effective,  // log min(n, m)
  paper_n,    // log n
};

std::string to_string(DivisorMode mode);
DivisorMode parse_divisor_mode(const std::string& name);

struct DbcScore {
  double value = 0.0;  // in [0, 1]
  EigenSpectrum spectrum;
  double normalization_divisor = 0.0;  // the argument of the log
};

/// Eigenvalues of a symmetric matrix, nonincreasing (no clamping).
std::vector<double> symmetric_eigenvalues(const Eigen::Ref<const Eigen::MatrixXd>& matrix);

/// Spectrum of the columns of `points`. With `center`, the column mean is removed first.
/// Throws DataError for fewer than two columns or non-finite entries, NumericalError
/// for eigenvalues more negative than -1e-10 * lambda_max.
EigenSpectrum eigen_spectrum(const Eigen::Ref<const Eigen::MatrixXd>& points, bool center = true);
EigenSpectrum eigen_spectrum(const AdversarialSet& set, bool center = true);

/// Shannon entropy of p_i = lambda_i / sum(lambda), divided by log(divisor). An
/// all-zero spectrum, or a divisor of 1, scores 0.
DbcScore normalized_entropy(const EigenSpectrum& spectrum, DivisorMode mode = DivisorMode::effective);

/// Entropy in nats of the normalized proportions of `weights` (0 log 0 = 0).
double shannon_entropy(const std::vector<double>& weights);

struct ScoringOptions {
  CrossingConfig crossing;
  bool center = true;
  DivisorMode divisor = DivisorMode::effective;
  Anchor anchor = Anchor::b;
  unsigned workers = 1;
};

/// global_adversarial_set -> eigen_spectrum -> normalized_entropy.
DbcScore dbc_global(const ClassifierContract& f, const LabeledDataset& dataset, std::size_t reps,
                    const ScoringOptions& options, std::uint64_t seed);

struct LocalScore {
  std::size_t pair_index = 0;
  ClassPair pair;
  std::size_t k = 0;
  DbcScore score;
};

struct LocalBatch {
  std::vector<LocalScore> scores;  // ascending pair_index
  std::vector<CrossingFailureRecord> failures;
  std::size_t failed_scores = 0;
  std::size_t reps = 0;
};

/// One local score per sampled pair. Pair i is sample_pair(dataset, seed, i), so two
/// models scored with the same seed see the same pair sequence. A score whose local set
/// loses any column is excluded and counted; more than 10% excluded throws
/// CrossingFailureError. Output is identical for every worker count.
LocalBatch dbc_local_batch(const ClassifierContract& f, const LabeledDataset& dataset,
                           std::size_t reps, std::size_t k, const ScoringOptions& options,
                           std::uint64_t seed);

}  // namespace dbc
