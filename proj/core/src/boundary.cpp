#include "dbc/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dbc {

std::string to_string(CrossingMethod method) {
  return method == CrossingMethod::bisection ? "bisection" : "linear_scan";
}

CrossingMethod parse_crossing_method(const std::string& name) {
  if (name == "bisection") return CrossingMethod::bisection;
  if (name == "linear_scan" || name == "linear-scan") return CrossingMethod::linear_scan;
  throw UsageError("unknown crossing method '" + name + "' (expected bisection or linear-scan)");
}

std::string to_string(SetKind kind) { return kind == SetKind::global ? "global" : "local"; }

void validate(const CrossingConfig& config) {
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
    throw UsageError("epsilon must lie strictly between 0 and 1");
  if (config.tolerance_on_f && !(*config.tolerance_on_f >= 0.0))
    throw UsageError("tolerance on f must be nonnegative");
}

namespace {

std::string describe_same_side(double fa, double fb) {
  std::ostringstream os;
  os.precision(17);
  os << "segment endpoints lie on the same side of 0.5 (f(a) = " << fa << ", f(b) = " << fb
     << ")";
  return os.str();
}

bool within_tolerance(const CrossingConfig& config, double value) {
  return value == 0.5 || (config.tolerance_on_f && std::abs(value - 0.5) <= *config.tolerance_on_f);
}

// Number of grid steps for the linear scan: lambda = i * eps for i = 0..steps.
std::size_t scan_steps(double epsilon) {
  return static_cast<std::size_t>(std::floor(1.0 / epsilon + 1e-9));
}

// Linear scan along lambda on (a, b); both endpoint values are already known.
Crossing linear_scan(const ClassifierContract& f, const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b, double fa, double fb,
                     const CrossingConfig& config) {
  const double eps = config.epsilon;
  const std::size_t steps = scan_steps(eps);
  const bool grid_hits_one = static_cast<double>(steps) * eps >= 1.0 - 1e-12;
  const std::size_t interior = grid_hits_one ? steps - 1 : steps;

  Eigen::MatrixXd probes(a.size(), static_cast<Eigen::Index>(interior));
  for (std::size_t i = 1; i <= interior; ++i) {
    const double lambda = static_cast<double>(i) * eps;
    probes.col(static_cast<Eigen::Index>(i - 1)) = lambda * a + (1.0 - lambda) * b;
  }
  const Eigen::VectorXd values =
      interior > 0 ? f.decide_batch(probes) : Eigen::VectorXd(Eigen::VectorXd::Zero(0));

  // Scan order: lambda = 0 (b), interior points, and lambda = 1 (a).
  Crossing best;
  best.lambda = 0.0;
  best.value = fb;
  best.point = b;
  auto consider = [&](double lambda, double value, const auto& point) {
    if (std::abs(value - 0.5) < std::abs(best.value - 0.5)) {
      best.lambda = lambda;
      best.value = value;
      best.point = point;
    }
  };
  for (std::size_t i = 0; i < interior; ++i)
    consider(static_cast<double>(i + 1) * eps, values(static_cast<Eigen::Index>(i)),
             probes.col(static_cast<Eigen::Index>(i)));
  consider(1.0, fa, a);

  best.lambda_lo = std::max(0.0, best.lambda - eps);
  best.lambda_hi = std::min(1.0, best.lambda + eps);
  best.evaluations = interior + 2;
  return best;
}

struct SegmentState {
  bool active = false;
  bool swapped = false;  // true when a is the f >= 0.5 end
  double lo = 0.0;       // mu with f >= 0.5 (the high end H)
  double hi = 1.0;       // mu with f < 0.5 (the low end L)
  double mu = 0.0;
  double value = 0.0;
  std::size_t evaluations = 2;
};

// c = mu * L + (1 - mu) * H; in the unswapped orientation mu equals lambda.
Crossing finish(const SegmentState& s, Eigen::VectorXd point) {
  Crossing c;
  c.point = std::move(point);
  c.value = s.value;
  c.evaluations = s.evaluations;
  if (!s.swapped) {
    c.lambda = s.mu;
    c.lambda_lo = s.lo;
    c.lambda_hi = s.hi;
  } else {
    c.lambda = 1.0 - s.mu;
    c.lambda_lo = 1.0 - s.hi;
    c.lambda_hi = 1.0 - s.lo;
  }
  return c;
}

std::vector<CrossingOutcome> search(const ClassifierContract& f,
                                    const Eigen::Ref<const Eigen::MatrixXd>& a,
                                    const Eigen::Ref<const Eigen::MatrixXd>& b,
                                    const CrossingConfig& config, bool strict) {
  validate(config);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DataError("segment endpoint matrices must have equal shapes");
  if (static_cast<std::size_t>(a.rows()) != f.dimension())
    throw DataError("segment dimension " + std::to_string(a.rows()) +
                    " does not match classifier dimension " + std::to_string(f.dimension()));
  const Eigen::Index m = a.cols();
  std::vector<CrossingOutcome> out(static_cast<std::size_t>(m));
  if (m == 0) return out;

  Eigen::MatrixXd ends(a.rows(), 2 * m);
  ends.leftCols(m) = a;
  ends.rightCols(m) = b;
  const Eigen::VectorXd end_values = f.decide_batch(ends);

  std::vector<SegmentState> state(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    auto& o = out[static_cast<std::size_t>(j)];
    auto& s = state[static_cast<std::size_t>(j)];
    const double fa = end_values(j);
    const double fb = end_values(m + j);
    if (a.col(j) == b.col(j)) {
      o.failure = "degenerate segment: a equals b";
    } else if (fa < 0.5 && fb >= 0.5) {
      s.swapped = false;
      s.active = true;
    } else if (!strict && fa >= 0.5 && fb < 0.5) {
      s.swapped = true;
      s.active = true;
    } else {
      o.failure = describe_same_side(fa, fb);
    }
    if (!o.failure.empty()) {
      if (strict) throw DataError("crossing precondition violated: " + o.failure);
      continue;
    }

    const double f_high = s.swapped ? fa : fb;
    const double f_low = s.swapped ? fb : fa;
    if (config.method == CrossingMethod::linear_scan) {
      o.crossing = linear_scan(f, a.col(j), b.col(j), fa, fb, config);
      s.active = false;
    } else if (within_tolerance(config, f_high)) {
      s.mu = 0.0;
      s.value = f_high;
      s.hi = 0.0;
      o.crossing = finish(s, s.swapped ? Eigen::VectorXd(a.col(j)) : Eigen::VectorXd(b.col(j)));
      s.active = false;
    } else if (config.tolerance_on_f && within_tolerance(config, f_low)) {
      s.mu = 1.0;
      s.value = f_low;
      s.lo = 1.0;
      o.crossing = finish(s, s.swapped ? Eigen::VectorXd(b.col(j)) : Eigen::VectorXd(a.col(j)));
      s.active = false;
    }
  }

  std::vector<Eigen::Index> active;
  Eigen::MatrixXd probes;
  for (;;) {
    active.clear();
    for (Eigen::Index j = 0; j < m; ++j)
      if (state[static_cast<std::size_t>(j)].active) active.push_back(j);
    if (active.empty()) break;

    probes.resize(a.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t p = 0; p < active.size(); ++p) {
      const Eigen::Index j = active[p];
      auto& s = state[static_cast<std::size_t>(j)];
      s.mu = 0.5 * (s.lo + s.hi);
      const auto low_end = s.swapped ? b.col(j) : a.col(j);
      const auto high_end = s.swapped ? a.col(j) : b.col(j);
      probes.col(static_cast<Eigen::Index>(p)) = s.mu * low_end + (1.0 - s.mu) * high_end;
    }
    const Eigen::VectorXd values = f.decide_batch(probes);

    for (std::size_t p = 0; p < active.size(); ++p) {
      const Eigen::Index j = active[p];
      auto& s = state[static_cast<std::size_t>(j)];
      s.value = values(static_cast<Eigen::Index>(p));
      ++s.evaluations;
      bool done = false;
      if (s.value == 0.5) {
        s.lo = s.hi = s.mu;
        done = true;
      } else {
        (s.value > 0.5 ? s.lo : s.hi) = s.mu;
        done = (s.hi - s.lo) <= config.epsilon || within_tolerance(config, s.value);
      }
      if (done) {
        s.active = false;
        out[static_cast<std::size_t>(j)].crossing = finish(s, probes.col(static_cast<Eigen::Index>(p)));
      }
    }
  }
  return out;
}

}  // namespace

Crossing find_crossing(const ClassifierContract& f, const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b, const CrossingConfig& config) {
  auto outcomes = search(f, a, b, config, /*strict=*/true);
  return std::move(*outcomes.front().crossing);
}

std::vector<CrossingOutcome> find_crossings(const ClassifierContract& f,
                                            const Eigen::Ref<const Eigen::MatrixXd>& a,
                                            const Eigen::Ref<const Eigen::MatrixXd>& b,
                                            const CrossingConfig& config) {
  return search(f, a, b, config, /*strict=*/false);
}

namespace {

constexpr Eigen::Index kGlobalChunk = 256;

std::string failure_summary(std::size_t failures, std::size_t attempts) {
  return std::to_string(failures) + " of " + std::to_string(attempts) + " crossings failed";
}

}  // namespace

AdversarialSet global_adversarial_set(const ClassifierContract& f, const LabeledDataset& dataset,
                                      std::size_t reps, const CrossingConfig& config,
                                      std::uint64_t seed) {
  if (reps < 2) throw UsageError("a global adversarial set needs reps >= 2");
  validate(config);
  const auto pairs = sample_pairs(dataset, reps, seed);
  const auto n = static_cast<Eigen::Index>(dataset.dimension());

  AdversarialSet set;
  set.kind = SetKind::global;
  std::vector<Eigen::VectorXd> columns;
  columns.reserve(reps);

  Eigen::MatrixXd a(n, kGlobalChunk);
  Eigen::MatrixXd b(n, kGlobalChunk);
  for (std::size_t start = 0; start < reps; start += kGlobalChunk) {
    const auto width = static_cast<Eigen::Index>(std::min<std::size_t>(kGlobalChunk, reps - start));
    a.resize(n, width);
    b.resize(n, width);
    for (Eigen::Index j = 0; j < width; ++j) {
      const auto& pair = pairs[start + static_cast<std::size_t>(j)];
      a.col(j) = dataset.point(pair.index_a);
      b.col(j) = dataset.point(pair.index_b);
    }
    auto outcomes = find_crossings(f, a, b, config);
    for (Eigen::Index j = 0; j < width; ++j) {
      const std::size_t i = start + static_cast<std::size_t>(j);
      auto& o = outcomes[static_cast<std::size_t>(j)];
      if (o.crossing) {
        set.provenance.push_back({i, pairs[i].index_a, pairs[i].index_b, o.crossing->lambda,
                                  o.crossing->value});
        columns.push_back(std::move(o.crossing->point));
      } else {
        set.failures.push_back({i, pairs[i].index_a, pairs[i].index_b, std::move(o.failure)});
      }
    }
  }

  const auto failed = set.failures.size();
  if (static_cast<double>(failed) > kMaxFailureRate * static_cast<double>(reps))
    throw CrossingFailureError("global adversarial set aborted: " + failure_summary(failed, reps) +
                                   " (limit 10%)",
                               set.failures);
  if (columns.size() < 2)
    throw CrossingFailureError("global adversarial set has fewer than two examples: " +
                                   failure_summary(failed, reps),
                               set.failures);

  set.points.resize(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) set.points.col(static_cast<Eigen::Index>(j)) = columns[j];
  return set;
}

AdversarialSet local_adversarial_set(const ClassifierContract& f, const LabeledDataset& dataset,
                                     const ClassPair& pair, std::size_t k,
                                     const CrossingConfig& config, Anchor anchor,
                                     std::size_t pair_index) {
  if (k < 1) throw UsageError("k must be at least 1");
  const std::size_t anchor_row = anchor == Anchor::b ? pair.index_b : pair.index_a;
  const std::size_t partner_row = anchor == Anchor::b ? pair.index_a : pair.index_b;
  const int anchor_class = anchor == Anchor::b ? 1 : 0;

  // k + 1 endpoints: the anchor first, then its k nearest same-class neighbors.
  auto neighbors = k_nearest(dataset, dataset.point(anchor_row), anchor_class, k + 1);
  neighbors.erase(std::remove(neighbors.begin(), neighbors.end(), anchor_row), neighbors.end());
  neighbors.insert(neighbors.begin(), anchor_row);
  neighbors.resize(k + 1);

  const auto n = static_cast<Eigen::Index>(dataset.dimension());
  const auto m = static_cast<Eigen::Index>(neighbors.size());
  Eigen::MatrixXd a(n, m);
  Eigen::MatrixXd b(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto row = neighbors[static_cast<std::size_t>(j)];
    a.col(j) = dataset.point(anchor == Anchor::b ? partner_row : row);
    b.col(j) = dataset.point(anchor == Anchor::b ? row : partner_row);
  }
  auto outcomes = find_crossings(f, a, b, config);

  AdversarialSet set;
  set.kind = SetKind::local;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto row = neighbors[static_cast<std::size_t>(j)];
    const std::size_t ia = anchor == Anchor::b ? partner_row : row;
    const std::size_t ib = anchor == Anchor::b ? row : partner_row;
    auto& o = outcomes[static_cast<std::size_t>(j)];
    if (o.crossing) {
      set.provenance.push_back({pair_index, ia, ib, o.crossing->lambda, o.crossing->value});
      kept.push_back(j);
    } else {
      set.failures.push_back({pair_index, ia, ib, std::move(o.failure)});
    }
  }
  if (kept.size() < 2)
    throw CrossingFailureError("local adversarial set for pair " + std::to_string(pair_index) +
                                   " has fewer than two examples: " +
                                   failure_summary(set.failures.size(), neighbors.size()),
                               set.failures);
  set.points.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t p = 0; p < kept.size(); ++p)
    set.points.col(static_cast<Eigen::Index>(p)) = outcomes[static_cast<std::size_t>(kept[p])].crossing->point;
  return set;
}

}  // namespace dbc
