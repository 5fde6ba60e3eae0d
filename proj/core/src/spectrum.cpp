#include "dbc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "dbc/error.hpp"

namespace dbc {

std::string to_string(DivisorMode mode) {
  return mode == DivisorMode::effective ? "effective" : "paper_n";
}

DivisorMode parse_divisor_mode(const std::string& name) {
  if (name == "effective") return DivisorMode::effective;
  if (name == "paper_n" || name == "paper-n") return DivisorMode::paper_n;
  throw UsageError("unknown divisor mode '" + name + "' (expected effective or paper-n)");
}

namespace {

constexpr double kClampRelative = 1e-10;

}  // namespace

std::vector<double> symmetric_eigenvalues(const Eigen::Ref<const Eigen::MatrixXd>& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw DataError("eigenvalues need a nonempty square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver did not converge");
  const Eigen::VectorXd& values = solver.eigenvalues();
  std::vector<double> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

EigenSpectrum eigen_spectrum(const Eigen::Ref<const Eigen::MatrixXd>& points, bool center) {
  if (points.cols() < 2) throw DataError("spectrum needs at least two examples");
  if (!points.allFinite()) throw DataError("adversarial set contains non-finite entries");

  Eigen::MatrixXd x = points;
  if (center) x.colwise() -= x.rowwise().mean();

  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  // Second-moment matrix on the smaller side.
  const Eigen::MatrixXd moment = n <= m ? Eigen::MatrixXd(x * x.transpose())
                                        : Eigen::MatrixXd(x.transpose() * x);

  EigenSpectrum spectrum;
  spectrum.dimension = static_cast<std::size_t>(n);
  spectrum.sample_count = static_cast<std::size_t>(m);
  spectrum.centered = center;
  spectrum.eigenvalues = symmetric_eigenvalues(moment);

  const double top = std::max(0.0, spectrum.eigenvalues.front());
  for (double& v : spectrum.eigenvalues) {
    if (!std::isfinite(v)) throw NumericalError("eigensolver produced a non-finite eigenvalue");
    if (v < 0.0) {
      if (v < -kClampRelative * top && top > 0.0)
        throw NumericalError("eigenvalue " + std::to_string(v) +
                             " is too negative for a positive semidefinite matrix");
      v = 0.0;
    }
  }
  return spectrum;
}

EigenSpectrum eigen_spectrum(const AdversarialSet& set, bool center) {
  return eigen_spectrum(set.points, center);
}

double shannon_entropy(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double w : weights) {
    if (w <= 0.0) continue;
    const double p = w / total;
    h -= p * std::log(p);
  }
  return h;
}

DbcScore normalized_entropy(const EigenSpectrum& spectrum, DivisorMode mode) {
  DbcScore score;
  score.spectrum = spectrum;
  score.normalization_divisor = static_cast<double>(
      mode == DivisorMode::effective ? std::min(spectrum.dimension, spectrum.sample_count)
                                     : spectrum.dimension);
  if (score.normalization_divisor <= 1.0) {
    score.value = 0.0;
    return score;
  }
  const double h = shannon_entropy(spectrum.eigenvalues);
  score.value = std::clamp(h / std::log(score.normalization_divisor), 0.0, 1.0);
  return score;
}

}  // namespace dbc
