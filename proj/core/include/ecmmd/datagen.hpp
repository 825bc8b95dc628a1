#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ecmmd/calibration.hpp"
#include "ecmmd/common.hpp"
#include "ecmmd/kernels.hpp"
#include "ecmmd/sampler.hpp"

namespace ecmmd {

enum class Hypothesis { Null, Alt };

// Every generator is a pure function of its arguments and seed. Unit i draws
// from its own streams, so a dataset of size n is a prefix of one of size
// n' > n under the same seed.

/// Binary classifier calibration design. f_1(Z) ~ Beta(rho, 1 - rho) (the
/// first coordinate of Dir(rho, 1 - rho)); labels are Y ~ Bern(f_1) under the
/// null and Y ~ Bern(f_1 - f_1^2) under the alternative. Rows are
/// (f_1, 1 - f_1); label 1 means Y = 1, label 2 means Y = 0.
ClassifierPredictions gen_class_calib(std::size_t n, double rho, Hypothesis hypothesis,
                                      std::uint64_t seed);

struct OlsFit {
  double intercept = 0.0;
  double slope = 0.0;
  /// sum of squared residuals / (n - 1)
  double sigma_sq = 0.0;
};

/// Least squares of y on z, without an intercept unless requested.
OlsFit fit_ols(std::span<const double> z, std::span<const double> y, bool with_intercept = false);

struct RegCalibData {
  GaussianRegressionModel model;  // homoscedastic N(intercept + slope z, sigma_sq) on the test draw
  std::vector<double> y_test;
  std::vector<double> z_test;
  OlsFit fit;
};

/// Regression calibration design: Z ~ Unif[-1, 1],
/// Y = rho sin(pi Z) + |1 + Z| eps with eps ~ N(0, 0.15^2). An OLS fit on
/// n_train draws defines the Gaussian model, evaluated on n_test fresh draws.
/// Under Hypothesis::Null the test responses are drawn from the fitted model
/// itself, so the model is calibrated by construction.
RegCalibData gen_reg_calib(std::size_t n_train, std::size_t n_test, double rho, std::uint64_t seed,
                           Hypothesis hypothesis = Hypothesis::Alt, bool with_intercept = false);

/// Variance bump g(z) = 1 + rho exp(-|z - 1.5 * 1_d|^2 / (2 * 0.8^2)).
double gof_variance(std::span<const double> z, double rho);

struct GofScenario {
  GofData data;
  GaussianSampler sampler;
};

/// Conditional goodness-of-fit design: Z ~ N_d(0, I), observed
/// Y | Z ~ N(1_d . Z, 1), and the sampler draws X | Z ~ N(1_d . Z, g(Z)).
/// rho = 0 makes the two laws equal.
GofScenario gen_gof_gaussian(std::size_t n, std::size_t d, double rho, std::uint64_t seed);

/// Finite-support conditional laws for a test oracle.
struct SupportPoint {
  std::vector<double> value;
  double prob = 0.0;
};

struct OracleAtom {
  std::vector<double> z;
  double weight = 0.0;
  std::vector<SupportPoint> x_law;
  std::vector<SupportPoint> y_law;
};

struct DiscreteOracleSpec {
  std::vector<OracleAtom> atoms;
  Kernel kernel = Kernel::linear();
  /// Covariates are atom.z plus Unif[-jitter, jitter]^d noise. The laws depend
  /// only on the atom, so the population value is unchanged; a small jitter
  /// keeps the K-NN graph free of distance ties.
  double jitter = 0.0;

  void validate() const;
};

/// Exact population ECMMD^2 = sum_z P(z) E[K(X,X') + K(Y,Y') - K(X,Y') - K(X',Y) | z]
/// by enumerating the supports.
double population_ecmmd_sq(const DiscreteOracleSpec& spec);

struct OracleDraw {
  PairedDataset data;
  double population = 0.0;
};

OracleDraw gen_discrete_oracle(std::size_t n, std::uint64_t seed, const DiscreteOracleSpec& spec);

/// Two well-separated covariate clusters in R with Gaussian(1) responses:
/// cluster 0: X ~ {0, 1} (1/2 each) vs Y ~ {0, 1} (0.8, 0.2);
/// cluster 10: X = 2 vs Y ~ {2, 3} (1/2 each). Jitter 0.5.
DiscreteOracleSpec two_cluster_oracle();

}  // namespace ecmmd
