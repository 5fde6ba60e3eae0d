#include "app.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbc/boundary.hpp"
#include "dbc/dataset.hpp"
#include "dbc/error.hpp"
#include "dbc/model.hpp"
#include "dbc/spectrum.hpp"
#include "dbc/stats.hpp"
#include "io.hpp"
#include "svg.hpp"

#ifndef DBC_VERSION_STRING
#define DBC_VERSION_STRING "0.0.0"
#endif

namespace dbc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kCaveat =
    "DBC scores are meaningless for a single model; they rank models only when every "
    "model was trained on the same dataset.";

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(cell, &used);
      if (used != cell.size() || v < 1) throw std::invalid_argument(cell);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + cell + "' is not a positive integer");
    }
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(parse_real(cell, what));
  return out;
}

LabelColumn label_selector(const std::string& label) {
  if (!label.empty() && std::all_of(label.begin(), label.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return static_cast<std::size_t>(std::stoull(label));
  return label;
}

LabeledDataset load_dataset(const std::string& path, const std::string& label, bool minmax) {
  LabeledDataset data = load_csv(path, label_selector(label));
  return minmax ? data.minmax_scaled() : data;
}

/// Records what produced a file so it can be replayed.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args, const CLI::App& sub)
      : doc_(json::object()) {
    doc_["format"] = kManifestFormat;
    doc_["version"] = DBC_VERSION_STRING;
    doc_["command"] = std::move(command);
    doc_["args"] = args;
    json flags = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (name == "help") continue;
      if (opt->count() > 0) {
        std::vector<std::string> given = opt->results();
        flags[name] = given.size() == 1 ? json(given.front()) : json(given);
      } else {
        flags[name] = opt->get_default_str();
      }
    }
    doc_["flags"] = flags;
    doc_["seed"] = nullptr;
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
  }

  void seed(std::uint64_t s) { doc_["seed"] = s; }
  void input(const std::string& path) {
    doc_["inputs"].push_back({{"path", path}, {"sha256", sha256_file(path)}});
  }
  void output(const std::string& path) {
    doc_["outputs"].push_back({{"path", path}, {"sha256", sha256_file(path)}});
  }
  void write(const std::string& primary_output) {
    doc_["timestamp"] = utc_now();
    write_text(sidecar(primary_output, ".manifest.json"), doc_.dump(2) + "\n");
  }

 private:
  json doc_;
};

json summary_json(const ScoreSummary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"min", s.min},
          {"q1", s.q1},       {"q3", s.q3},     {"max", s.max}};
}

std::string require_meta(const ScoreFile& f, const std::string& key, const std::string& origin) {
  const auto v = f.get(key);
  if (!v) throw DataError(origin + ": score file lacks '" + key + "' metadata");
  return *v;
}

std::string h0_text(Alternative alt) {
  switch (alt) {
    case Alternative::a_less: return "DBC(a) >= DBC(b)";
    case Alternative::b_less: return "DBC(b) >= DBC(a)";
    case Alternative::two_sided: return "DBC(a) and DBC(b) have the same location";
  }
  return "";
}

struct BlobsArgs {
  std::size_t per_class = 200;
  std::size_t dim = 2;
  double distance = 10.0;
  double spread = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::string label = "label";
  bool minmax = false;
  std::string arch;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::string lr = "0.001";
  std::string optimizer = "adam";
  std::string activation = "relu";
  std::string dropout;
  std::string target_accuracy;
  std::uint64_t seed = 0;
  std::string out;
  std::string report;
};

struct ScoreArgs {
  std::string model;
  std::string data;
  std::string label = "label";
  bool minmax = false;
  std::string mode = "local";
  std::size_t k = 10;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::string epsilon = "1/256";
  std::string method = "bisection";
  bool center = true;
  std::string divisor = "effective";
  std::string anchor = "b";
  unsigned workers = 1;
  std::string out;
  std::string export_set;
  std::size_t export_pair = 0;
};

struct CompareArgs {
  std::string a;
  std::string b;
  std::string test = "paired";
  std::string alternative = "a_less";
  std::string alpha = "0.01";
  bool force = false;
  std::string out;
};

struct PlotArgs {
  std::string data;
  std::string model;
  std::string label = "label";
  bool minmax = false;
  std::string out;
  std::size_t grid = 160;
  double size = 560.0;
  std::string overlay;
  std::size_t overlay_reps = 0;
  std::uint64_t seed = 0;
  std::string epsilon = "1/256";
};

CrossingConfig crossing_config(const std::string& epsilon, const std::string& method) {
  CrossingConfig c;
  c.epsilon = parse_real(epsilon, "--epsilon");
  c.method = parse_crossing_method(method);
  validate(c);
  return c;
}

int cmd_blobs(const BlobsArgs& a, Manifest& manifest, std::ostream& out) {
  BlobsConfig config;
  config.per_class = a.per_class;
  config.dimension = a.dim;
  config.center_distance = a.distance;
  config.spread = a.spread;
  config.seed = a.seed;
  const LabeledDataset data = make_blobs(config);
  save_csv(data, a.out);
  manifest.seed(a.seed);
  manifest.output(a.out);
  manifest.write(a.out);
  out << "wrote " << data.count() << " samples of dimension " << data.dimension() << " to " << a.out
      << "\n";
  return 0;
}

int cmd_train(const TrainArgs& a, Manifest& manifest, std::ostream& out) {
  const LabeledDataset data = load_dataset(a.data, a.label, a.minmax);
  const std::vector<std::size_t> arch = parse_size_list(a.arch, "--arch");
  if (arch.size() < 2) throw UsageError("--arch needs at least an input and an output size");
  if (arch.front() != data.dimension())
    throw DataError("--arch input size " + std::to_string(arch.front()) +
                    " does not match dataset dimension " + std::to_string(data.dimension()));

  TrainConfig config;
  config.epochs = a.epochs;
  config.batch_size = a.batch_size;
  config.learning_rate = parse_real(a.lr, "--lr");
  config.seed = a.seed;
  config.optimizer = parse_optimizer(a.optimizer);
  config.hidden_activation = parse_activation(a.activation);
  if (!a.dropout.empty()) config.dropout_rates = parse_real_list(a.dropout, "--dropout");
  if (!a.target_accuracy.empty())
    config.target_train_accuracy = parse_real(a.target_accuracy, "--target-accuracy");

  const TrainResult result = train(data, arch, config);
  save_model(result.model, a.out);

  json report = json::object();
  report["format"] = "dbc-train-report/1";
  report["layer_sizes"] = result.model.layer_sizes();
  report["hidden_activation"] = to_string(result.model.hidden_activation());
  report["parameter_count"] = result.model.parameter_count();
  report["epochs_run"] = result.report.history.size();
  report["final_train_accuracy"] = result.report.final_train_accuracy;
  report["reached_target"] = result.report.reached_target;
  report["final_loss"] = result.report.history.empty() ? json(nullptr)
                                                       : json(result.report.history.back().loss);
  json history = json::array();
  for (const auto& e : result.report.history)
    history.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"train_accuracy", e.train_accuracy}});
  report["history"] = history;
  const std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
  write_text(report_path, report.dump(1) + "\n");

  manifest.seed(a.seed);
  manifest.input(a.data);
  manifest.output(a.out);
  manifest.output(report_path);
  manifest.write(a.out);
  out << "parameters " << result.model.parameter_count() << ", train accuracy "
      << format_double(result.report.final_train_accuracy) << ", epochs "
      << result.report.history.size() << "\n";
  return 0;
}

int cmd_score(ScoreArgs a, Manifest& manifest, std::ostream& out) {
  const MlpModel model = load_model(a.model);
  const LabeledDataset data = load_dataset(a.data, a.label, a.minmax);
  if (model.dimension() != data.dimension())
    throw DataError("model input dimension " + std::to_string(model.dimension()) +
                    " does not match dataset dimension " + std::to_string(data.dimension()));
  if (a.mode != "local" && a.mode != "global")
    throw UsageError("--mode must be local or global, got '" + a.mode + "'");
  if (a.reps == 0) a.reps = 5 * data.count();

  ScoringOptions options;
  options.crossing = crossing_config(a.epsilon, a.method);
  options.center = a.center;
  options.divisor = parse_divisor_mode(a.divisor);
  if (a.anchor != "a" && a.anchor != "b") throw UsageError("--anchor must be a or b");
  options.anchor = a.anchor == "a" ? Anchor::a : Anchor::b;
  options.workers = a.workers;

  ScoreFile file;
  file.meta = {{"seed", std::to_string(a.seed)},
               {"mode", a.mode},
               {"k", a.mode == "local" ? std::to_string(a.k) : "0"},
               {"reps", std::to_string(a.reps)},
               {"epsilon", format_double(options.crossing.epsilon)},
               {"method", to_string(options.crossing.method)},
               {"anchor", a.anchor},
               {"centered", a.center ? "true" : "false"},
               {"divisor_mode", to_string(options.divisor)},
               {"minmax", a.minmax ? "true" : "false"},
               {"model_sha256", sha256_file(a.model)},
               {"dataset_sha256", sha256_file(a.data)}};

  std::size_t failed_scores = 0;
  std::size_t failed_crossings = 0;
  if (a.mode == "global") {
    const AdversarialSet set = global_adversarial_set(model, data, a.reps, options.crossing, a.seed);
    const DbcScore score = normalized_entropy(eigen_spectrum(set, options.center), options.divisor);
    file.rows.push_back({-1, 0, set.size(), score.value, to_string(options.divisor), options.center});
    failed_crossings = set.failures.size();
    if (!a.export_set.empty()) save_adversarial_set(set, a.export_set);
  } else {
    const LocalBatch batch = dbc_local_batch(model, data, a.reps, a.k, options, a.seed);
    for (const auto& s : batch.scores)
      file.rows.push_back({static_cast<long long>(s.pair_index), s.k, s.score.spectrum.sample_count,
                           s.score.value, to_string(options.divisor), options.center});
    failed_scores = batch.failed_scores;
    failed_crossings = batch.failures.size();
    if (!a.export_set.empty()) {
      if (a.export_pair >= a.reps) throw UsageError("--export-pair must be below --reps");
      const ClassPair pair = sample_pair(data, a.seed, a.export_pair);
      save_adversarial_set(
          local_adversarial_set(model, data, pair, a.k, options.crossing, options.anchor, a.export_pair),
          a.export_set);
    }
  }
  file.meta.emplace_back("scores", std::to_string(file.rows.size()));
  file.meta.emplace_back("failed_scores", std::to_string(failed_scores));
  file.meta.emplace_back("failed_crossings", std::to_string(failed_crossings));
  write_text(a.out, render_scores(file));

  manifest.seed(a.seed);
  manifest.input(a.model);
  manifest.input(a.data);
  manifest.output(a.out);
  if (!a.export_set.empty()) {
    manifest.output(a.export_set);
    manifest.output(sidecar(a.export_set, ".provenance.csv").string());
  }
  manifest.write(a.out);

  std::vector<double> values;
  for (const auto& r : file.rows) values.push_back(r.dbc);
  const ScoreSummary s = summarize(values);
  out << "scored " << s.count << " of " << (a.mode == "global" ? 1 : a.reps) << ", median "
      << format_double(s.median) << ", mean " << format_double(s.mean) << "\n";
  return 0;
}

int cmd_compare(const CompareArgs& a, std::optional<Manifest>& manifest, std::ostream& out) {
  const ScoreFile fa = load_scores(a.a);
  const ScoreFile fb = load_scores(a.b);
  if (fa.rows.empty()) throw DataError(a.a + ": no scores");
  if (fb.rows.empty()) throw DataError(a.b + ": no scores");
  const Alternative alternative = parse_alternative(a.alternative);
  const double alpha = parse_real(a.alpha, "--alpha");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (a.test != "paired" && a.test != "unpaired")
    throw UsageError("--test must be paired or unpaired, got '" + a.test + "'");

  const std::string hash_a = require_meta(fa, "dataset_sha256", a.a);
  const std::string hash_b = require_meta(fb, "dataset_sha256", a.b);
  if (hash_a != hash_b && !a.force)
    throw DataError("score files come from different datasets (" + hash_a.substr(0, 12) + " vs " +
                    hash_b.substr(0, 12) + "); DBC is only comparable on the same dataset. Use "
                    "--force to compare anyway");

  std::vector<double> va, vb;
  if (a.test == "paired") {
    for (const char* key : {"seed", "reps", "mode"}) {
      const std::string x = require_meta(fa, key, a.a);
      const std::string y = require_meta(fb, key, a.b);
      if (x != y)
        throw DataError(std::string("paired test needs score files drawn with the same ") + key +
                        " (" + x + " vs " + y + "); rescore with matching values or use "
                        "--test unpaired");
    }
    std::map<long long, double> by_pair;
    for (const auto& r : fb.rows) by_pair[r.pair_index] = r.dbc;
    for (const auto& r : fa.rows) {
      const auto it = by_pair.find(r.pair_index);
      if (it == by_pair.end()) continue;
      va.push_back(r.dbc);
      vb.push_back(it->second);
    }
    if (va.empty()) throw DataError("score files share no pair indices");
  } else {
    for (const auto& r : fa.rows) va.push_back(r.dbc);
    for (const auto& r : fb.rows) vb.push_back(r.dbc);
  }

  const RankTestResult test = a.test == "paired" ? signed_rank_test(va, vb, alternative)
                                                 : mann_whitney_test(va, vb, alternative);
  std::vector<double> sorted_a = va, sorted_b = vb;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  std::string decision;
  if ((a.test == "paired" && test.n_effective == 0) || sorted_a == sorted_b)
    decision = "no difference";
  else
    decision = test.p_value < alpha ? "rejected" : "not rejected";

  json report = json::object();
  report["format"] = kReportFormat;
  report["a"] = {{"file", a.a},
                 {"scores_sha256", sha256_file(a.a)},
                 {"all_scores", summary_json(summarize(
                                    [&] {
                                      std::vector<double> v;
                                      for (const auto& r : fa.rows) v.push_back(r.dbc);
                                      return v;
                                    }()))},
                 {"compared", summary_json(summarize(va))}};
  report["b"] = {{"file", a.b},
                 {"scores_sha256", sha256_file(a.b)},
                 {"all_scores", summary_json(summarize(
                                    [&] {
                                      std::vector<double> v;
                                      for (const auto& r : fb.rows) v.push_back(r.dbc);
                                      return v;
                                    }()))},
                 {"compared", summary_json(summarize(vb))}};
  report["test"] = to_string(test.method);
  report["pairing"] = a.test == "paired" ? "index-paired by pair_index" : "independent samples";
  report["alternative"] = to_string(alternative);
  report["h0"] = h0_text(alternative);
  report["statistic"] = test.statistic;
  report["p_value"] = test.p_value;
  report["p_method"] = test.exact ? "exact" : "normal approximation";
  report["n_effective"] = test.n_effective;
  report["alpha"] = alpha;
  report["decision"] = decision;
  report["same_dataset"] = hash_a == hash_b;
  report["caveat"] = kCaveat;
  const std::string text = report.dump(2) + "\n";

  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
    if (manifest) {
      manifest->input(a.a);
      manifest->input(a.b);
      manifest->output(a.out);
      manifest->write(a.out);
    }
    out << "h0 " << h0_text(alternative) << ": " << decision << " (p = " << format_double(test.p_value)
        << ")\n";
  }
  return 0;
}

int cmd_plot2d(const PlotArgs& a, Manifest& manifest, std::ostream& out) {
  const LabeledDataset data = load_dataset(a.data, a.label, a.minmax);
  const MlpModel model = load_model(a.model);
  if (data.dimension() != 2)
    throw DataError("plot2d needs a 2-D dataset, got dimension " + std::to_string(data.dimension()));
  PlotOptions options;
  options.grid = a.grid;
  options.size = a.size;
  if (!a.overlay.empty()) {
    options.overlay = load_adversarial_points(a.overlay);
    manifest.input(a.overlay);
  } else if (a.overlay_reps > 0) {
    options.overlay =
        global_adversarial_set(model, data, a.overlay_reps, crossing_config(a.epsilon, "bisection"), a.seed)
            .points;
  }
  write_text(a.out, render_decision_svg(model, data, options));

  manifest.seed(a.seed);
  manifest.input(a.data);
  manifest.input(a.model);
  manifest.output(a.out);
  manifest.write(a.out);
  out << "wrote " << a.out;
  if (options.overlay && options.overlay->cols() > 0) {
    const Eigen::VectorXd f = model.decide_batch(*options.overlay);
    out << ", overlay " << options.overlay->cols() << " points, max |f - 0.5| = "
        << format_double((f.array() - 0.5).abs().maxCoeff());
  }
  out << "\n";
  return 0;
}

int cmd_replay(const std::string& path, std::ostream& out, std::ostream& err) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw DataError(path + ": not a manifest (" + e.what() + ")");
  }
  if (doc.value("format", "") != kManifestFormat) throw DataError(path + ": not a " + std::string(kManifestFormat) + " file");
  for (const auto& in : doc.at("inputs")) {
    const std::string p = in.at("path");
    if (sha256_file(p) != in.at("sha256").get<std::string>())
      throw DataError("input '" + p + "' changed since the manifest was written");
  }
  const auto args = doc.at("args").get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw UsageError("refusing to replay a replay");
  const int code = run(args, out, err);
  if (code != 0) return code;
  bool same = true;
  for (const auto& o : doc.at("outputs")) {
    const std::string p = o.at("path");
    const bool match = sha256_file(p) == o.at("sha256").get<std::string>();
    out << (match ? "reproduced " : "MISMATCH ") << p << "\n";
    same = same && match;
  }
  if (!same) throw DataError("replay did not reproduce every output");
  return 0;
}

}  // namespace

unsigned default_workers() {
  const char* env = std::getenv(kWorkersEnv);
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const long v = std::stol(env, &used);
    if (used == std::string(env).size() && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  throw UsageError(std::string(kWorkersEnv) + " must be an integer in [1, 1024], got '" + env + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision boundary complexity (DBC) scoring for binary classifiers", "dbc"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", DBC_VERSION_STRING);

  BlobsArgs blobs_args;
  auto* blobs = app.add_subcommand("blobs", "Generate two Gaussian clusters as a CSV dataset");
  blobs->add_option("--per-class", blobs_args.per_class, "Samples per class")->check(CLI::PositiveNumber);
  blobs->add_option("--dim", blobs_args.dim, "Feature dimension")->check(CLI::PositiveNumber);
  blobs->add_option("--distance", blobs_args.distance, "Distance between class centers")
      ->check(CLI::PositiveNumber);
  blobs->add_option("--spread", blobs_args.spread, "Per-coordinate standard deviation")
      ->check(CLI::PositiveNumber);
  blobs->add_option("--seed", blobs_args.seed, "Random seed");
  blobs->add_option("--out", blobs_args.out, "Output CSV")->required();

  TrainArgs train_args;
  auto* trainc = app.add_subcommand("train", "Train an MLP and write a model file");
  trainc->add_option("--data", train_args.data, "Dataset CSV")->required();
  trainc->add_option("--label", train_args.label, "Label column name or zero-based index");
  trainc->add_flag("--minmax", train_args.minmax, "Min-max scale features to [0, 1]");
  trainc->add_option("--arch", train_args.arch, "Layer sizes, e.g. 2,10,32,16,1")->required();
  trainc->add_option("--epochs", train_args.epochs, "Maximum epochs");
  trainc->add_option("--batch-size", train_args.batch_size, "Minibatch size")->check(CLI::PositiveNumber);
  trainc->add_option("--lr", train_args.lr, "Learning rate");
  trainc->add_option("--optimizer", train_args.optimizer, "adam or sgd");
  trainc->add_option("--activation", train_args.activation, "Hidden activation: relu or tanh");
  trainc->add_option("--dropout", train_args.dropout, "Comma-separated dropout rate per hidden layer");
  trainc->add_option("--target-accuracy", train_args.target_accuracy,
                     "Stop once train accuracy reaches this value");
  trainc->add_option("--seed", train_args.seed, "Random seed");
  trainc->add_option("--out", train_args.out, "Output model file")->required();
  trainc->add_option("--report", train_args.report, "Training report path (default <out>.report.json)");

  ScoreArgs score_args;
  score_args.workers = 0;
  auto* score = app.add_subcommand("score", "Compute local or global DBC scores");
  score->add_option("--model", score_args.model, "Model file")->required();
  score->add_option("--data", score_args.data, "Dataset CSV")->required();
  score->add_option("--label", score_args.label, "Label column name or zero-based index");
  score->add_flag("--minmax", score_args.minmax, "Min-max scale features to [0, 1]");
  score->add_option("--mode", score_args.mode, "local or global");
  score->add_option("--k", score_args.k, "Nearest neighbors per local set")->check(CLI::PositiveNumber);
  score->add_option("--reps", score_args.reps, "Pairs to sample (default 5x dataset size)");
  score->add_option("--seed", score_args.seed, "Pair sampling seed");
  score->add_option("--epsilon", score_args.epsilon, "Precision on lambda, e.g. 1/256");
  score->add_option("--method", score_args.method, "bisection or linear-scan");
  score->add_flag("--center,!--no-center", score_args.center, "Center the adversarial set before PCA");
  score->add_option("--divisor", score_args.divisor, "effective or paper-n");
  score->add_option("--anchor", score_args.anchor, "Pair member expanded to neighbors: a or b");
  score->add_option("--workers", score_args.workers,
                    std::string("Worker threads (default $") + kWorkersEnv + " or 1)")
      ->check(CLI::Range(1u, 1024u));
  score->add_option("--out", score_args.out, "Output score CSV")->required();
  score->add_option("--export-set", score_args.export_set, "Write an adversarial set CSV");
  score->add_option("--export-pair", score_args.export_pair, "Pair index exported in local mode");

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "Rank-test two score files");
  compare->add_option("--a", compare_args.a, "Score file of model a")->required();
  compare->add_option("--b", compare_args.b, "Score file of model b")->required();
  compare->add_option("--test", compare_args.test, "paired (signed rank) or unpaired (Mann-Whitney)");
  compare->add_option("--alternative", compare_args.alternative, "a-less, b-less or two-sided");
  compare->add_option("--alpha", compare_args.alpha, "Significance level");
  compare->add_flag("--force", compare_args.force, "Compare scores from different datasets");
  compare->add_option("--out", compare_args.out, "Report path (default stdout)");

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot2d", "Render decision regions of a 2-D model as SVG");
  plot->add_option("--data", plot_args.data, "Dataset CSV")->required();
  plot->add_option("--model", plot_args.model, "Model file")->required();
  plot->add_option("--label", plot_args.label, "Label column name or zero-based index");
  plot->add_flag("--minmax", plot_args.minmax, "Min-max scale features to [0, 1]");
  plot->add_option("--out", plot_args.out, "Output SVG")->required();
  plot->add_option("--grid", plot_args.grid, "Raster cells per side")->check(CLI::Range(2, 2000));
  plot->add_option("--size", plot_args.size, "Canvas size in px")->check(CLI::PositiveNumber);
  plot->add_option("--overlay", plot_args.overlay, "Adversarial set CSV to draw");
  plot->add_option("--overlay-reps", plot_args.overlay_reps, "Draw a fresh global set of this many pairs");
  plot->add_option("--seed", plot_args.seed, "Seed for --overlay-reps");
  plot->add_option("--epsilon", plot_args.epsilon, "Precision for --overlay-reps");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest and verify outputs");
  replay->add_option("manifest", replay_path, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "dbc: " << e.what() << "\nRun with --help for usage.\n";
    return static_cast<int>(ErrorKind::usage);
  }

  try {
    if (score->parsed() && score_args.workers == 0) score_args.workers = default_workers();
    if (blobs->parsed()) {
      Manifest m("blobs", args, *blobs);
      return cmd_blobs(blobs_args, m, out);
    }
    if (trainc->parsed()) {
      Manifest m("train", args, *trainc);
      return cmd_train(train_args, m, out);
    }
    if (score->parsed()) {
      Manifest m("score", args, *score);
      return cmd_score(score_args, m, out);
    }
    if (compare->parsed()) {
      std::optional<Manifest> m;
      if (!compare_args.out.empty()) m.emplace("compare", args, *compare);
      return cmd_compare(compare_args, m, out);
    }
    if (plot->parsed()) {
      Manifest m("plot2d", args, *plot);
      return cmd_plot2d(plot_args, m, out);
    }
    if (replay->parsed()) return cmd_replay(replay_path, out, err);
  } catch (const Error& e) {
    err << "dbc: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "dbc: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::data);
  }
  return static_cast<int>(ErrorKind::usage);
}

}  // namespace dbc::cli
