#include "ecmmd/datagen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ecmmd/rng.hpp"

namespace ecmmd {

namespace {

constexpr double kRegNoiseSd = 0.15;
constexpr double kGofBumpCenter = 1.5;
constexpr double kGofBumpWidth = 0.8;

std::uint32_t unit(std::size_t i) { return static_cast<std::uint32_t>(i); }

}  // namespace

ClassifierPredictions gen_class_calib(std::size_t n, double rho, Hypothesis hypothesis,
                                      std::uint64_t seed) {
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("class-calib: rho must lie in (0, 1)");
  if (n < 2) throw InputError("class-calib: n must be >= 2");
  ClassifierPredictions pred{Matrix(n, 2), std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream cov(seed, StreamDomain::Covariate, unit(i), 0);
    RngStream resp(seed, StreamDomain::Response, unit(i), 0);
    const double f1 = cov.beta(rho, 1.0 - rho);
    pred.probs(i, 0) = f1;
    pred.probs(i, 1) = 1.0 - f1;
    const double p_one = hypothesis == Hypothesis::Null ? f1 : f1 - f1 * f1;
    pred.labels[i] = resp.bernoulli(p_one) ? 1 : 2;
  }
  return pred;
}

OlsFit fit_ols(std::span<const double> z, std::span<const double> y, bool with_intercept) {
  const std::size_t n = z.size();
  if (n != y.size()) throw InputError("ols: z and y differ in length");
  if (n < 2) throw InputError("ols: need at least 2 points");
  OlsFit fit;
  if (with_intercept) {
    double zbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      zbar += z[i];
      ybar += y[i];
    }
    zbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);
    double szz = 0.0, szy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      szz += (z[i] - zbar) * (z[i] - zbar);
      szy += (z[i] - zbar) * (y[i] - ybar);
    }
    if (!(szz > 0.0)) throw InputError("ols: z has no spread");
    fit.slope = szy / szz;
    fit.intercept = ybar - fit.slope * zbar;
  } else {
    double szz = 0.0, szy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      szz += z[i] * z[i];
      szy += z[i] * y[i];
    }
    if (!(szz > 0.0)) throw InputError("ols: z is identically 0");
    fit.slope = szy / szz;
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * z[i];
    rss += r * r;
  }
  fit.sigma_sq = rss / static_cast<double>(n - 1);
  return fit;
}

RegCalibData gen_reg_calib(std::size_t n_train, std::size_t n_test, double rho, std::uint64_t seed,
                           Hypothesis hypothesis, bool with_intercept) {
  if (n_train < 3) throw InputError("reg-calib: n_train must be >= 3");
  if (n_test < 2) throw InputError("reg-calib: n_test must be >= 2");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InputError("reg-calib: rho must be >= 0");

  auto draw = [&](std::size_t i, std::uint32_t phase, double& z, double& y) {
    RngStream cov(seed, StreamDomain::Covariate, unit(i), phase);
    RngStream resp(seed, StreamDomain::Response, unit(i), phase);
    z = -1.0 + 2.0 * cov.uniform();
    y = rho * std::sin(std::numbers::pi * z) + std::fabs(1.0 + z) * resp.normal(0.0, kRegNoiseSd);
  };

  std::vector<double> z_train(n_train), y_train(n_train);
  for (std::size_t i = 0; i < n_train; ++i) draw(i, 0, z_train[i], y_train[i]);

  RegCalibData out;
  out.fit = fit_ols(z_train, y_train, with_intercept);
  if (!(out.fit.sigma_sq > 0.0)) throw DegenerateError("reg-calib: fitted variance is 0", 0.0);

  out.z_test.resize(n_test);
  out.y_test.resize(n_test);
  out.model.means.resize(n_test);
  out.model.variances = {out.fit.sigma_sq};
  const double sd = std::sqrt(out.fit.sigma_sq);
  for (std::size_t i = 0; i < n_test; ++i) {
    draw(i, 1, out.z_test[i], out.y_test[i]);
    out.model.means[i] = out.fit.intercept + out.fit.slope * out.z_test[i];
    if (hypothesis == Hypothesis::Null) {
      RngStream resp(seed, StreamDomain::Response, unit(i), 2);
      out.y_test[i] = resp.normal(out.model.means[i], sd);
    }
  }
  return out;
}

double gof_variance(std::span<const double> z, double rho) {
  double sq = 0.0;
  for (double v : z) sq += (v - kGofBumpCenter) * (v - kGofBumpCenter);
  return 1.0 + rho * std::exp(-sq / (2.0 * kGofBumpWidth * kGofBumpWidth));
}

GofScenario gen_gof_gaussian(std::size_t n, std::size_t d, double rho, std::uint64_t seed) {
  if (d < 1) throw InputError("gof: d must be >= 1");
  if (n < 2) throw InputError("gof: n must be >= 2");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InputError("gof: rho must be >= 0");
  GofData data{Matrix(n, 1), Matrix(n, d)};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream cov(seed, StreamDomain::Covariate, unit(i), 0);
    RngStream resp(seed, StreamDomain::Response, unit(i), 0);
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      data.z(i, j) = cov.normal();
      mean += data.z(i, j);
    }
    data.y(i, 0) = resp.normal(mean, 1.0);
  }
  GaussianSampler sampler(
      [](std::span<const double> z) {
        double s = 0.0;
        for (double v : z) s += v;
        return s;
      },
      [rho](std::span<const double> z) { return gof_variance(z, rho); });
  return {std::move(data), std::move(sampler)};
}

void DiscreteOracleSpec::validate() const {
  if (atoms.empty()) throw InputError("oracle: need at least one covariate atom");
  const std::size_t d = atoms.front().z.size();
  const std::size_t p = atoms.front().x_law.empty() ? 0 : atoms.front().x_law.front().value.size();
  if (d == 0 || p == 0) throw InputError("oracle: empty covariate or response dimension");
  double total = 0.0;
  for (const OracleAtom& a : atoms) {
    if (a.z.size() != d) throw InputError("oracle: covariate atoms differ in dimension");
    if (!(a.weight > 0.0)) throw InputError("oracle: atom weights must be > 0");
    total += a.weight;
    for (const auto* law : {&a.x_law, &a.y_law}) {
      if (law->empty()) throw InputError("oracle: empty conditional law");
      double mass = 0.0;
      for (const SupportPoint& s : *law) {
        if (s.value.size() != p) throw InputError("oracle: support points differ in dimension");
        if (!(s.prob >= 0.0)) throw InputError("oracle: negative probability");
        mass += s.prob;
      }
      if (std::fabs(mass - 1.0) > 1e-12) throw InputError("oracle: conditional law does not sum to 1");
    }
  }
  if (std::fabs(total - 1.0) > 1e-12) throw InputError("oracle: atom weights do not sum to 1");
  if (!(jitter >= 0.0)) throw InputError("oracle: jitter must be >= 0");
}

double population_ecmmd_sq(const DiscreteOracleSpec& spec) {
  spec.validate();
  auto expected = [&](const std::vector<SupportPoint>& a, const std::vector<SupportPoint>& b) {
    double e = 0.0;
    for (const SupportPoint& s : a) {
      for (const SupportPoint& t : b) e += s.prob * t.prob * spec.kernel(s.value, t.value);
    }
    return e;
  };
  double total = 0.0;
  for (const OracleAtom& a : spec.atoms) {
    const double mmd_sq = expected(a.x_law, a.x_law) + expected(a.y_law, a.y_law) -
                          2.0 * expected(a.x_law, a.y_law);
    total += a.weight * mmd_sq;
  }
  return total;
}

OracleDraw gen_discrete_oracle(std::size_t n, std::uint64_t seed, const DiscreteOracleSpec& spec) {
  spec.validate();
  if (n < 2) throw InputError("oracle: n must be >= 2");
  const std::size_t d = spec.atoms.front().z.size();
  const std::size_t p = spec.atoms.front().x_law.front().value.size();

  std::vector<double> weights;
  for (const OracleAtom& a : spec.atoms) weights.push_back(a.weight);

  auto pick = [](RngStream& rng, const std::vector<SupportPoint>& law) -> const std::vector<double>& {
    std::vector<double> probs;
    probs.reserve(law.size());
    for (const SupportPoint& s : law) probs.push_back(s.prob);
    return law[rng.categorical(probs)].value;
  };

  OracleDraw out;
  out.data = PairedDataset{Matrix(n, p), Matrix(n, p), Matrix(n, d)};
  for (std::size_t i = 0; i < n; ++i) {
    RngStream cov(seed, StreamDomain::Covariate, unit(i), 0);
    RngStream jit(seed, StreamDomain::Jitter, unit(i), 0);
    RngStream resp(seed, StreamDomain::Response, unit(i), 0);
    const OracleAtom& atom = spec.atoms[cov.categorical(weights)];
    for (std::size_t j = 0; j < d; ++j) {
      out.data.z(i, j) = atom.z[j] + spec.jitter * (2.0 * jit.uniform() - 1.0);
    }
    const auto& x = pick(resp, atom.x_law);
    const auto& y = pick(resp, atom.y_law);
    std::copy(x.begin(), x.end(), out.data.x.row(i).begin());
    std::copy(y.begin(), y.end(), out.data.y.row(i).begin());
  }
  out.population = population_ecmmd_sq(spec);
  return out;
}

DiscreteOracleSpec two_cluster_oracle() {
  DiscreteOracleSpec spec;
  spec.atoms = {
      OracleAtom{{0.0}, 0.5, {{{0.0}, 0.5}, {{1.0}, 0.5}}, {{{0.0}, 0.8}, {{1.0}, 0.2}}},
      OracleAtom{{10.0}, 0.5, {{{2.0}, 1.0}}, {{{2.0}, 0.5}, {{3.0}, 0.5}}},
  };
  spec.kernel = Kernel::gaussian(1.0);
  spec.jitter = 0.5;
  return spec;
}

}  // namespace ecmmd
