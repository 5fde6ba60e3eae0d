#include "dbc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dbc/error.hpp"

namespace dbc {

std::string to_string(Alternative alternative) {
  switch (alternative) {
    case Alternative::a_less: return "a_less";
    case Alternative::b_less: return "b_less";
    case Alternative::two_sided: return "two_sided";
  }
  return "two_sided";
}

Alternative parse_alternative(const std::string& name) {
  if (name == "a_less" || name == "a-less") return Alternative::a_less;
  if (name == "b_less" || name == "b-less") return Alternative::b_less;
  if (name == "two_sided" || name == "two-sided") return Alternative::two_sided;
  throw UsageError("unknown alternative '" + name + "' (expected a-less, b-less or two-sided)");
}

std::string to_string(RankTestMethod method) {
  return method == RankTestMethod::signed_rank_paired ? "signed_rank_paired"
                                                      : "mann_whitney_unpaired";
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Doubled midranks (so every rank is an integer) plus the tie-group sizes.
struct Ranking {
  std::vector<long long> doubled;
  std::vector<std::size_t> tie_sizes;
};

Ranking midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  Ranking r;
  r.doubled.assign(n, 0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Ranks i+1..j+1 share (i+1 + j+1)/2; doubled that is i + j + 2.
    const auto shared = static_cast<long long>(i + j + 2);
    for (std::size_t t = i; t <= j; ++t) r.doubled[order[t]] = shared;
    r.tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return r;
}

// Tail probabilities from an exact null distribution of counts over integer sums.
struct Tails {
  double less_equal;
  double greater_equal;
};

Tails tails_from_counts(const std::vector<double>& counts, long long observed) {
  double total = 0.0;
  double le = 0.0;
  double ge = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    total += counts[s];
    if (static_cast<long long>(s) <= observed) le += counts[s];
    if (static_cast<long long>(s) >= observed) ge += counts[s];
  }
  return {le / total, ge / total};
}

double pick_p(Alternative alternative, double p_less, double p_greater) {
  switch (alternative) {
    case Alternative::a_less: return std::min(1.0, p_less);
    case Alternative::b_less: return std::min(1.0, p_greater);
    case Alternative::two_sided: return std::min(1.0, 2.0 * std::min(p_less, p_greater));
  }
  return 1.0;
}

// Continuity-corrected normal tails for a statistic `deviation` = S - E[S].
Tails normal_tails(double deviation, double sd) {
  return {normal_cdf((deviation + 0.5) / sd), normal_cdf(-(deviation - 0.5) / sd)};
}

double normal_p(Alternative alternative, double deviation, double sd) {
  if (alternative == Alternative::two_sided) {
    const double z = (std::abs(deviation) - 0.5) / sd;
    return std::min(1.0, 2.0 * normal_cdf(-z));
  }
  const Tails t = normal_tails(deviation, sd);
  return pick_p(alternative, t.less_equal, t.greater_equal);
}

constexpr std::size_t kSignedRankExactHardLimit = 1000;
constexpr std::size_t kMannWhitneyExactHardLimit = 200;

}  // namespace

ScoreSummary summarize(std::span<const double> scores) {
  if (scores.empty()) throw DataError("cannot summarize an empty score list");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  ScoreSummary s;
  s.count = sorted.size();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.count);
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t mid = s.count / 2;
  s.median = s.count % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  s.q1 = quantile_sorted(sorted, 0.25);
  s.q3 = quantile_sorted(sorted, 0.75);
  return s;
}

RankTestResult signed_rank_test(std::span<const double> a, std::span<const double> b,
                                Alternative alternative, PValueMethod method) {
  if (a.size() != b.size())
    throw DataError("signed-rank test needs paired samples of equal length (got " +
                    std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  if (a.empty()) throw DataError("signed-rank test needs at least one pair");

  RankTestResult result;
  result.method = RankTestMethod::signed_rank_paired;
  result.alternative = alternative;

  std::vector<double> magnitude;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    magnitude.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  const std::size_t n = magnitude.size();
  result.n_effective = n;
  if (n == 0) {
    result.p_value = 1.0;
    result.statistic = 0.0;
    result.exact = true;
    return result;
  }

  const Ranking ranks = midranks(magnitude);
  long long plus2 = 0;   // doubled W+
  long long total2 = 0;  // doubled sum of all ranks
  double square_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += ranks.doubled[i];
    if (positive[i]) plus2 += ranks.doubled[i];
    const double r = 0.5 * static_cast<double>(ranks.doubled[i]);
    square_sum += r * r;
  }
  result.statistic = 0.5 * static_cast<double>(plus2);

  const bool exact = method == PValueMethod::exact ||
                     (method == PValueMethod::automatic && n <= kSignedRankExactLimit);
  if (exact) {
    if (n > kSignedRankExactHardLimit)
      throw UsageError("exact signed-rank distribution is limited to " +
                       std::to_string(kSignedRankExactHardLimit) + " nonzero differences");
    // counts[s]: sign assignments whose doubled positive-rank sum equals s.
    std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
    counts[0] = 1.0;
    long long reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long long r = ranks.doubled[i];
      for (long long s = reach; s >= 0; --s)
        counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
      reach += r;
    }
    const Tails t = tails_from_counts(counts, plus2);
    result.p_value = pick_p(alternative, t.less_equal, t.greater_equal);
    result.exact = true;
  } else {
    // Deviation of W+ from its null mean, computed in quarter units so that
    // exchanging a and b negates it exactly.
    const double deviation = static_cast<double>(2 * plus2 - total2) / 4.0;
    const double sd = std::sqrt(square_sum / 4.0);
    result.p_value = normal_p(alternative, deviation, sd);
    result.exact = false;
  }
  result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  return result;
}

RankTestResult mann_whitney_test(std::span<const double> a, std::span<const double> b,
                                 Alternative alternative, PValueMethod method) {
  if (a.empty() || b.empty()) throw DataError("Mann-Whitney test needs two nonempty samples");

  RankTestResult result;
  result.method = RankTestMethod::mann_whitney_unpaired;
  result.alternative = alternative;

  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t total = na + nb;
  result.n_effective = total;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranking ranks = midranks(pooled);

  long long rank_a2 = 0;
  for (std::size_t i = 0; i < na; ++i) rank_a2 += ranks.doubled[i];
  const auto na_ll = static_cast<long long>(na);
  const auto nb_ll = static_cast<long long>(nb);
  const long long u2 = rank_a2 - na_ll * (na_ll + 1);  // doubled U of a
  result.statistic = 0.5 * static_cast<double>(u2);

  const bool exact = method == PValueMethod::exact ||
                     (method == PValueMethod::automatic && total <= kMannWhitneyExactLimit);
  if (exact) {
    if (total > kMannWhitneyExactHardLimit)
      throw UsageError("exact Mann-Whitney distribution is limited to " +
                       std::to_string(kMannWhitneyExactHardLimit) + " pooled samples");
    // ways[j][s]: subsets of size j whose doubled rank sum is s.
    long long max_sum = 0;
    for (auto r : ranks.doubled) max_sum += r;
    const auto width = static_cast<std::size_t>(max_sum) + 1;
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(width, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < total; ++i) {
      const auto r = static_cast<std::size_t>(ranks.doubled[i]);
      for (std::size_t j = std::min(i + 1, na); j >= 1; --j)
        for (std::size_t s = width; s-- > r;) ways[j][s] += ways[j - 1][s - r];
    }
    const Tails t = tails_from_counts(ways[na], rank_a2);
    result.p_value = pick_p(alternative, t.less_equal, t.greater_equal);
    result.exact = true;
  } else {
    double tie_term = 0.0;
    for (std::size_t t : ranks.tie_sizes) {
      const double td = static_cast<double>(t);
      tie_term += td * td * td - td;
    }
    const double nt = static_cast<double>(total);
    const double variance = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                            ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    const double deviation = static_cast<double>(u2 - na_ll * nb_ll) / 2.0;
    if (!(variance > 0.0)) {
      result.p_value = 1.0;
    } else {
      result.p_value = normal_p(alternative, deviation, std::sqrt(variance));
    }
    result.exact = false;
  }
  result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  return result;
}

}  // namespace dbc
