#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace dbc {

struct ScoreSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0;  // linear-interpolation quartiles
  double q3 = 0.0;
};

/// Exact order statistics; throws DataError on empty input.
ScoreSummary summarize(std::span<const double> scores);

enum class Alternative {
  a_less,     // scores of a tend to be smaller (rejects h0: a >= b)
  b_less,     // scores of b tend to be smaller (rejects h0: b >= a)
  two_sided,
};

enum class RankTestMethod { signed_rank_paired, mann_whitney_unpaired };

/// How the p-value is obtained. automatic uses the exact null distribution for small
/// samples and the tie- and continuity-corrected normal approximation otherwise.
enum class PValueMethod { automatic, exact, normal };

std::string to_string(Alternative alternative);
Alternative parse_alternative(const std::string& name);
std::string to_string(RankTestMethod method);

struct RankTestResult {
  double statistic = 0.0;  // W+ for signed rank, U of a for Mann-Whitney
  double p_value = 1.0;
  Alternative alternative = Alternative::two_sided;
  RankTestMethod method = RankTestMethod::signed_rank_paired;
  std::size_t n_effective = 0;  // nonzero differences, or na + nb
  bool exact = false;
};

/// Largest n_effective for which automatic mode enumerates the exact distribution.
inline constexpr std::size_t kSignedRankExactLimit = 25;
/// Largest na + nb for which automatic mode uses the exact distribution.
inline constexpr std::size_t kMannWhitneyExactLimit = 20;

/// Wilcoxon signed-rank test on index-paired samples, d_i = a_i - b_i. Zero
/// differences are dropped and tied |d| share midranks.
RankTestResult signed_rank_test(std::span<const double> a, std::span<const double> b,
                                Alternative alternative,
                                PValueMethod method = PValueMethod::automatic);

/// Mann-Whitney U test on independent samples with midranks for ties.
RankTestResult mann_whitney_test(std::span<const double> a, std::span<const double> b,
                                 Alternative alternative,
                                 PValueMethod method = PValueMethod::automatic);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace dbc
