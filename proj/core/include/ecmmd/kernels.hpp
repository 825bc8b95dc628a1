#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecmmd/common.hpp"

namespace ecmmd {

/// A point of the response space; categorical responses are one-hot vectors.
using ResponsePoint = std::span<const double>;

/// W = (first, second), one paired observation of the two responses.
struct ResponsePair {
  ResponsePoint first;
  ResponsePoint second;
};

enum class KernelKind { Linear, Gaussian };

std::string to_string(KernelKind kind);

/// Positive-definite kernel on R^p.
///
/// Linear:   K(x, y) = x . y  (on one-hot vectors this is 1{x == y}).
/// Gaussian: K(x, y) = exp(-|x - y|^2 / lambda^2). Note there is no factor of
///           2 in the denominator; other libraries often use 2 sigma^2.
class Kernel {
 public:
  static Kernel linear() noexcept { return Kernel(KernelKind::Linear, 0.0); }
  /// Throws InputError unless bandwidth is finite and > 0.
  static Kernel gaussian(double bandwidth);

  KernelKind kind() const noexcept { return kind_; }
  /// Gaussian bandwidth lambda; 0 for the linear kernel.
  double bandwidth() const noexcept { return bandwidth_; }

  /// Throws InputError on dimension mismatch.
  double operator()(ResponsePoint x, ResponsePoint y) const;

  /// Hot-loop evaluation; callers guarantee both points have `dim` entries.
  double evaluate(const double* x, const double* y, std::size_t dim) const noexcept;

 private:
  Kernel(KernelKind kind, double bandwidth) noexcept : kind_(kind), bandwidth_(bandwidth) {}

  KernelKind kind_;
  double bandwidth_;
  double inv_bandwidth_sq_ = 0.0;
};

double eval_kernel(const Kernel& k, ResponsePoint x, ResponsePoint y);

/// H(w, w') = K(x, x') + K(y, y') - K(x, y') - K(x', y).
double centered_h(const Kernel& k, const ResponsePair& w, const ResponsePair& w_prime);

/// Same four-term formula without dimension checks.
inline double centered_h_unchecked(const Kernel& k, const double* x, const double* y,
                                   const double* x_prime, const double* y_prime,
                                   std::size_t dim) noexcept {
  // Grouped so that swapping w and w' only commutes additions: exact symmetry.
  return (k.evaluate(x, x_prime, dim) + k.evaluate(y, y_prime, dim)) -
         (k.evaluate(x, y_prime, dim) + k.evaluate(x_prime, y, dim));
}

double euclidean_distance(ResponsePoint a, ResponsePoint b);

/// Median-heuristic bandwidth from a set of pairwise distances: the median,
/// or the smallest strictly positive distance when the median is 0.
/// Throws DegenerateError when every distance is 0.
double median_heuristic(std::vector<double> distances);

/// Median of |X_i - Y_i| (Euclidean) over the pairs of `data`.
double median_bandwidth(const PairedDataset& data);
double median_bandwidth(const Matrix& x, const Matrix& y);

/// Kernel choice before the data is seen. A Gaussian kernel without a
/// bandwidth is resolved by the median heuristic at test time.
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  std::optional<double> bandwidth;

  static KernelSpec linear() { return {KernelKind::Linear, std::nullopt}; }
  static KernelSpec gaussian_median() { return {KernelKind::Gaussian, std::nullopt}; }
  static KernelSpec gaussian(double bandwidth) { return {KernelKind::Gaussian, bandwidth}; }

  bool needs_median() const noexcept { return kind == KernelKind::Gaussian && !bandwidth; }

  /// Parses "linear", "gaussian", "gaussian:median" or "gaussian:<lambda>".
  static KernelSpec parse(const std::string& text);
  std::string to_string() const;
};

/// Throws InputError unless the vector is a valid one-hot encoding.
void validate_one_hot(ResponsePoint point);
std::vector<double> one_hot(std::size_t index, std::size_t classes);

}  // namespace ecmmd
