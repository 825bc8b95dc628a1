#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecmmd/common.hpp"
#include "ecmmd/kernels.hpp"
#include "ecmmd/report.hpp"
#include "ecmmd/resampling.hpp"

namespace ecmmd {

/// Predicted class probabilities f(Z_i) (rows) and observed labels in [1, r].
struct ClassifierPredictions {
  Matrix probs;
  std::vector<std::size_t> labels;

  std::size_t size() const noexcept { return probs.rows(); }
  std::size_t classes() const noexcept { return probs.cols(); }
  void validate() const;
};

/// Gaussian predictive model N(means_i, variance_i). A single variance means
/// the model is homoscedastic.
struct GaussianRegressionModel {
  std::vector<double> means;
  std::vector<double> variances;

  double variance(std::size_t i) const { return variances.size() == 1 ? variances[0] : variances[i]; }
  bool homoscedastic() const noexcept;
  void validate() const;
};

/// What the test conditions on. For a homoscedastic Gaussian model the mean
/// alone determines the predictive law.
enum class Conditioning { MeanOnly, MeanAndVariance };

struct TestOptions {
  TestMode mode = TestMode::asymptotic();
  KernelSpec kernel = KernelSpec::linear();
  std::size_t k = 10;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  Alternative alternative = Alternative::TwoSided;
};
using CalibrationOptions = TestOptions;

/// Tests P_{Y|Z} against a sampler for P_{X|Z} in the chosen mode. The
/// asymptotic mode draws one X_u per unit and runs the two-sample test; the
/// other modes call the resampling tests. Method names: "ecmmd-asymptotic",
/// "ecmmd-finite-sample", "ecmmd-derandomized".
TestReport conditional_gof_test(const GofData& data, const ConditionalSampler& sampler,
                                const TestOptions& options);

/// Tests P_{Y|f(Z)} = f(Z): covariates are the probability rows, X_i is drawn
/// from Multinomial(1, f(Z_i)) and Y_i is the one-hot label.
TestReport classification_calibration_test(const ClassifierPredictions& pred,
                                           const CalibrationOptions& options);

/// Tests a Gaussian regression model: covariates are the means (MeanOnly) or
/// (mean, variance) pairs, and X_i ~ N(mean_i, variance_i).
TestReport regression_calibration_test(std::span<const double> y, const GaussianRegressionModel& model,
                                       Conditioning conditioning, const CalibrationOptions& options);

struct ReliabilityBin {
  double lower = 0.0;  // interval ((m-1)/M, m/M]
  double upper = 0.0;
  std::size_t count = 0;
  std::optional<double> frequency;   // L(B_m): share of positive labels; empty bins have none
  std::optional<double> confidence;  // R(B_m): mean predicted probability
};

struct ReliabilityReport {
  std::vector<ReliabilityBin> bins;
  double ece = 0.0;
  std::size_t n = 0;
};

/// Equal-width reliability binning of positive-class probabilities and the
/// binned ECE sum_m (|B_m| / n) |L(B_m) - R(B_m)|. A probability of exactly 0
/// is placed in the first bin.
ReliabilityReport reliability_bins(std::span<const double> probs, std::span<const int> labels,
                                   std::size_t bins);

void to_json(nlohmann::json& j, const ReliabilityBin& b);
void to_json(nlohmann::json& j, const ReliabilityReport& r);

/// Nondecreasing step function q: level levels[m] on [breakpoints[m], breakpoints[m+1]).
/// Inputs below the first or above the last breakpoint take the end levels.
struct IsotonicFit {
  std::vector<double> breakpoints;
  std::vector<double> levels;

  double operator()(double p) const;
  std::vector<double> apply(std::span<const double> probs) const;
};

/// Least-squares isotonic recalibration by pool-adjacent-violators. Equal
/// probabilities share one level.
IsotonicFit isotonic_recalibrate(std::span<const double> probs, std::span<const double> labels);

}  // namespace ecmmd
