#include <optional>

#include "dbc/error.hpp"
#include "dbc/parallel.hpp"
#include "dbc/spectrum.hpp"

namespace dbc {

DbcScore dbc_global(const ClassifierContract& f, const LabeledDataset& dataset, std::size_t reps,
                    const ScoringOptions& options, std::uint64_t seed) {
  const AdversarialSet set = global_adversarial_set(f, dataset, reps, options.crossing, seed);
  return normalized_entropy(eigen_spectrum(set, options.center), options.divisor);
}

LocalBatch dbc_local_batch(const ClassifierContract& f, const LabeledDataset& dataset,
                           std::size_t reps, std::size_t k, const ScoringOptions& options,
                           std::uint64_t seed) {
  if (reps < 1) throw UsageError("reps must be at least 1");
  if (k < 1) throw UsageError("k must be at least 1");
  validate(options.crossing);
  if (dataset.dimension() != f.dimension())
    throw DataError("model dimension " + std::to_string(f.dimension()) +
                    " does not match dataset dimension " + std::to_string(dataset.dimension()));
  const int anchor_class = options.anchor == Anchor::b ? 1 : 0;
  const std::size_t population = dataset.class_indices(anchor_class).size();
  if (population < k + 1)
    throw DataError("local sets with k = " + std::to_string(k) + " need " + std::to_string(k + 1) +
                    " samples of class " + std::to_string(anchor_class) + ", found " +
                    std::to_string(population));

  struct Slot {
    std::optional<LocalScore> score;
    std::vector<CrossingFailureRecord> failures;
  };
  std::vector<Slot> slots(reps);

  parallel_for(reps, options.workers, [&](std::size_t i) {
    const ClassPair pair = sample_pair(dataset, seed, i);
    Slot& slot = slots[i];
    try {
      AdversarialSet set =
          local_adversarial_set(f, dataset, pair, k, options.crossing, options.anchor, i);
      if (!set.failures.empty()) {
        slot.failures = std::move(set.failures);
        return;
      }
      slot.score = LocalScore{i, pair, k,
                              normalized_entropy(eigen_spectrum(set, options.center), options.divisor)};
    } catch (const CrossingFailureError& e) {
      slot.failures = e.failures();
    }
  });

  LocalBatch batch;
  batch.reps = reps;
  for (auto& slot : slots) {
    if (slot.score)
      batch.scores.push_back(std::move(*slot.score));
    else
      ++batch.failed_scores;
    for (auto& record : slot.failures) batch.failures.push_back(std::move(record));
  }
  if (static_cast<double>(batch.failed_scores) > kMaxFailureRate * static_cast<double>(reps))
    throw CrossingFailureError("local scoring aborted: " + std::to_string(batch.failed_scores) +
                                   " of " + std::to_string(reps) +
                                   " local sets had crossing failures (limit 10%)",
                               batch.failures);
  return batch;
}

}  // namespace dbc
