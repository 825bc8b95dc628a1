#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ecmmd/common.hpp"
#include "ecmmd/rng.hpp"

namespace ecmmd {

/// Source of draws from a specified conditional law P_{X|Z=z}.
///
/// A draw may depend only on z and the stream; implementations must be safe
/// to call concurrently with distinct streams.
class ConditionalSampler {
 public:
  virtual ~ConditionalSampler() = default;

  virtual std::size_t response_dim() const = 0;

  /// Writes one draw into `out` (response_dim() entries).
  virtual void draw(std::span<const double> z, RngStream& rng, std::span<double> out) const = 0;
};

/// X | Z=z ~ N(mean(z), variance(z)), univariate.
class GaussianSampler final : public ConditionalSampler {
 public:
  using Function = std::function<double(std::span<const double>)>;

  GaussianSampler(Function mean, Function variance);

  /// mean(z) = intercept + coef . z with a constant variance.
  static GaussianSampler affine(double intercept, std::vector<double> coef, double variance);

  std::size_t response_dim() const override { return 1; }
  void draw(std::span<const double> z, RngStream& rng, std::span<double> out) const override;

 private:
  Function mean_;
  Function variance_;
};

/// X | Z=z ~ Multinomial(1, z): z is the class-probability vector and the
/// draw is returned one-hot.
class MultinomialSampler final : public ConditionalSampler {
 public:
  explicit MultinomialSampler(std::size_t classes);

  std::size_t response_dim() const override { return classes_; }
  void draw(std::span<const double> z, RngStream& rng, std::span<double> out) const override;

 private:
  std::size_t classes_;
};

/// Throws InputError unless `probs` is a probability vector (nonnegative,
/// summing to 1 within 1e-9).
void validate_probability_row(std::span<const double> probs);

}  // namespace ecmmd
