#include "ecmmd/calibration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "ecmmd/knn_graph.hpp"
#include "ecmmd/sampler.hpp"

namespace ecmmd {

namespace {

Kernel resolve_kernel(const KernelSpec& spec, double median) {
  if (spec.kind == KernelKind::Linear) return Kernel::linear();
  return Kernel::gaussian(spec.bandwidth ? *spec.bandwidth : median);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TestReport conditional_gof_test(const GofData& data, const ConditionalSampler& sampler,
                                const TestOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  check_alpha(options.alpha);
  data.validate();
  if (sampler.response_dim() != data.y.cols()) {
    throw InputError("sampler dimension does not match the response columns");
  }
  const KnnGraph g = KnnGraph::build(data.z, options.k);
  const std::size_t d = data.z.cols();
  TestReport report;

  switch (options.mode.kind) {
    case TestModeKind::Asymptotic: {
      const ResampleDraws draws = draw_resamples(data.z, sampler, 1, options.seed);
      const PairedDataset paired{draws.slots[0], data.y, data.z};
      const Kernel kern = resolve_kernel(
          options.kernel, options.kernel.needs_median() ? median_bandwidth(paired) : 0.0);
      const EcmmdResult r = asymptotic_test(paired, kern, g, options.alpha, options.alternative);
      report = make_report("ecmmd-asymptotic", r, d, kern, options.alpha, options.seed);
      break;
    }
    case TestModeKind::FiniteSample: {
      if (options.mode.resamples < 1) throw InputError("finite-sample mode needs M >= 1");
      const ResampleDraws draws =
          draw_resamples(data.z, sampler, options.mode.resamples + 1, options.seed);
      const Kernel kern = resolve_kernel(
          options.kernel, options.kernel.needs_median() ? finite_sample_bandwidth(data, draws) : 0.0);
      FiniteSampleResult r = finite_sample_from_draws(data, draws, kern, g);
      r.seed = options.seed;
      report = make_report("ecmmd-finite-sample", r, d, kern, options.alpha);
      break;
    }
    case TestModeKind::Derandomized: {
      if (options.mode.resamples < 1) throw InputError("derandomized mode needs M_n >= 1");
      const ResampleDraws draws = draw_resamples(data.z, sampler, options.mode.resamples, options.seed);
      const Kernel kern = resolve_kernel(
          options.kernel, options.kernel.needs_median() ? derandomized_bandwidth(data, draws) : 0.0);
      DerandomizedResult r =
          derandomized_from_draws(data, draws, kern, g, options.alpha, options.alternative);
      r.seed = options.seed;
      report = make_report("ecmmd-derandomized", r, d, kern, options.alpha);
      break;
    }
  }
  report.wall_ms = elapsed_ms(start);
  return report;
}

void ClassifierPredictions::validate() const {
  if (probs.cols() < 2) throw InputError("classifier predictions: need r >= 2 classes");
  if (labels.size() != probs.rows()) {
    throw InputError("classifier predictions: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(probs.rows()) + " probability rows");
  }
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    try {
      validate_probability_row(probs.row(i));
    } catch (const InputError& e) {
      throw InputError("classifier predictions: row " + std::to_string(i + 1) + ": " + e.what());
    }
    if (labels[i] < 1 || labels[i] > probs.cols()) {
      throw InputError("classifier predictions: label " + std::to_string(labels[i]) + " at row " +
                       std::to_string(i + 1) + " is outside [1, " + std::to_string(probs.cols()) + "]");
    }
  }
}

TestReport classification_calibration_test(const ClassifierPredictions& pred,
                                           const CalibrationOptions& options) {
  pred.validate();
  const std::size_t r = pred.classes();
  GofData data{Matrix(pred.size(), r), pred.probs};
  for (std::size_t i = 0; i < pred.size(); ++i) data.y(i, pred.labels[i] - 1) = 1.0;
  return conditional_gof_test(data, MultinomialSampler(r), options);
}

bool GaussianRegressionModel::homoscedastic() const noexcept {
  return variances.size() == 1 ||
         std::adjacent_find(variances.begin(), variances.end(), std::not_equal_to<>()) == variances.end();
}

void GaussianRegressionModel::validate() const {
  if (variances.size() != 1 && variances.size() != means.size()) {
    throw InputError("regression model: need one variance or one per mean");
  }
  for (double m : means) {
    if (!std::isfinite(m)) throw InputError("regression model: non-finite mean");
  }
  for (double v : variances) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("regression model: variances must be finite and >= 0");
  }
}

TestReport regression_calibration_test(std::span<const double> y, const GaussianRegressionModel& model,
                                       Conditioning conditioning, const CalibrationOptions& options) {
  model.validate();
  const std::size_t n = model.means.size();
  if (y.size() != n) throw InputError("regression calibration: y and model means differ in length");

  GofData data;
  data.y = Matrix::column(y);
  if (conditioning == Conditioning::MeanOnly) {
    if (!model.homoscedastic()) {
      throw InputError("regression calibration: mean-only conditioning needs a homoscedastic model");
    }
    data.z = Matrix::column(model.means);
    const double var = model.variances[0];
    const GaussianSampler sampler([](std::span<const double> z) { return z[0]; },
                                  [var](std::span<const double>) { return var; });
    return conditional_gof_test(data, sampler, options);
  }

  data.z = Matrix(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    data.z(i, 0) = model.means[i];
    data.z(i, 1) = model.variance(i);
  }
  const GaussianSampler sampler([](std::span<const double> z) { return z[0]; },
                                [](std::span<const double> z) { return z[1]; });
  return conditional_gof_test(data, sampler, options);
}

ReliabilityReport reliability_bins(std::span<const double> probs, std::span<const int> labels,
                                   std::size_t bins) {
  if (bins < 2) throw InputError("reliability: need at least 2 bins");
  if (probs.size() != labels.size()) throw InputError("reliability: probs and labels differ in length");
  if (probs.empty()) throw InputError("reliability: no predictions");

  const double m = static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  std::vector<CompensatedSum> positives(bins);
  std::vector<CompensatedSum> confidence(bins);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("reliability: probability outside [0, 1]");
    if (labels[i] != 0 && labels[i] != 1) throw InputError("reliability: labels must be 0 or 1");
    // Bin b (1-based) covers ((b-1)/M, b/M]; recheck the boundaries exactly.
    std::size_t b = static_cast<std::size_t>(std::max(1.0, std::ceil(p * m)));
    while (b > 1 && p <= static_cast<double>(b - 1) / m) --b;
    while (b < bins && p > static_cast<double>(b) / m) ++b;
    counts[b - 1] += 1;
    positives[b - 1].add(labels[i] == 1 ? 1.0 : 0.0);
    confidence[b - 1].add(p);
  }

  ReliabilityReport report;
  report.n = probs.size();
  CompensatedSum ece;
  for (std::size_t b = 0; b < bins; ++b) {
    ReliabilityBin bin;
    bin.lower = static_cast<double>(b) / m;
    bin.upper = static_cast<double>(b + 1) / m;
    bin.count = counts[b];
    if (bin.count > 0) {
      const double c = static_cast<double>(bin.count);
      bin.frequency = positives[b].value() / c;
      bin.confidence = confidence[b].value() / c;
      ece.add(c / static_cast<double>(report.n) * std::fabs(*bin.frequency - *bin.confidence));
    }
    report.bins.push_back(bin);
  }
  report.ece = ece.value();
  return report;
}

void to_json(nlohmann::json& j, const ReliabilityBin& b) {
  j = nlohmann::json{{"lower", b.lower}, {"upper", b.upper}, {"count", b.count},
                     {"frequency", nullptr}, {"confidence", nullptr}};
  if (b.frequency) j["frequency"] = *b.frequency;
  if (b.confidence) j["confidence"] = *b.confidence;
}

void to_json(nlohmann::json& j, const ReliabilityReport& r) {
  j = nlohmann::json{{"n", r.n}, {"bins", r.bins}, {"ece", r.ece}};
}

double IsotonicFit::operator()(double p) const {
  // breakpoints = {a_1, ..., a_{M+1}}; interior a_2..a_M select the level.
  const auto first = breakpoints.begin() + 1;
  const auto last = breakpoints.end() - 1;
  const auto it = std::upper_bound(first, last, p);
  return levels[static_cast<std::size_t>(it - first)];
}

std::vector<double> IsotonicFit::apply(std::span<const double> probs) const {
  std::vector<double> out(probs.size());
  std::transform(probs.begin(), probs.end(), out.begin(), [this](double p) { return (*this)(p); });
  return out;
}

IsotonicFit isotonic_recalibrate(std::span<const double> probs, std::span<const double> labels) {
  if (probs.empty()) throw InputError("isotonic: need at least one prediction");
  if (probs.size() != labels.size()) throw InputError("isotonic: probs and labels differ in length");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || !std::isfinite(labels[i])) throw InputError("isotonic: non-finite input");
  }

  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

  struct Block {
    double sum;
    double weight;
    double start;  // smallest probability in the block
  };
  std::vector<Block> stack;
  std::size_t i = 0;
  while (i < order.size()) {
    // Tied probabilities enter as one weighted block.
    Block block{0.0, 0.0, probs[order[i]]};
    while (i < order.size() && probs[order[i]] == block.start) {
      block.sum += labels[order[i]];
      block.weight += 1.0;
      ++i;
    }
    stack.push_back(block);
    // Pool while the previous level is not strictly below the new one.
    while (stack.size() >= 2) {
      Block& prev = stack[stack.size() - 2];
      const Block& top = stack.back();
      if (prev.sum * top.weight < top.sum * prev.weight) break;
      prev.sum += top.sum;
      prev.weight += top.weight;
      stack.pop_back();
    }
  }

  IsotonicFit fit;
  fit.breakpoints.push_back(std::min(0.0, stack.front().start));
  for (std::size_t b = 0; b < stack.size(); ++b) {
    if (b > 0) fit.breakpoints.push_back(stack[b].start);
    fit.levels.push_back(stack[b].sum / stack[b].weight);
  }
  fit.breakpoints.push_back(std::max(1.0, probs[order.back()]));
  return fit;
}

}  // namespace ecmmd
