#include "ecmmd/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ecmmd {

GaussianSampler::GaussianSampler(Function mean, Function variance)
    : mean_(std::move(mean)), variance_(std::move(variance)) {
  if (!mean_ || !variance_) throw InputError("gaussian sampler: mean and variance must be set");
}

GaussianSampler GaussianSampler::affine(double intercept, std::vector<double> coef, double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw InputError("gaussian sampler: variance must be finite and >= 0");
  }
  return GaussianSampler(
      [intercept, coef = std::move(coef)](std::span<const double> z) {
        if (z.size() != coef.size()) throw InputError("gaussian sampler: covariate dimension mismatch");
        return intercept + std::inner_product(z.begin(), z.end(), coef.begin(), 0.0);
      },
      [variance](std::span<const double>) { return variance; });
}

void GaussianSampler::draw(std::span<const double> z, RngStream& rng, std::span<double> out) const {
  const double var = variance_(z);
  if (!(var >= 0.0) || !std::isfinite(var)) throw InputError("gaussian sampler: variance must be finite and >= 0");
  out[0] = rng.normal(mean_(z), std::sqrt(var));
}

MultinomialSampler::MultinomialSampler(std::size_t classes) : classes_(classes) {
  if (classes < 2) throw InputError("multinomial sampler: need at least 2 classes");
}

void MultinomialSampler::draw(std::span<const double> z, RngStream& rng, std::span<double> out) const {
  if (z.size() != classes_) throw InputError("multinomial sampler: probability vector has wrong length");
  std::fill(out.begin(), out.end(), 0.0);
  out[rng.categorical(z)] = 1.0;
}

void validate_probability_row(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw InputError("probability row has a negative or non-finite entry");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw InputError("probability row sums to " + std::to_string(total) + ", not 1");
  }
}

}  // namespace ecmmd
