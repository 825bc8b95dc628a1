#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ecmmd/datagen.hpp"
#include "ecmmd/rng.hpp"

using namespace ecmmd;

TEST_CASE("class calibration design") {
  const auto a = gen_class_calib(500, 0.3, Hypothesis::Null, 8);
  const auto b = gen_class_calib(500, 0.3, Hypothesis::Null, 8);
  CHECK(a.probs == b.probs);
  CHECK(a.labels == b.labels);
  const auto prefix = gen_class_calib(100, 0.3, Hypothesis::Null, 8);
  for (std::size_t i = 0; i < 100; ++i) CHECK(prefix.probs(i, 0) == a.probs(i, 0));
  for (std::size_t i = 0; i < 500; ++i) {
    CHECK(a.probs(i, 0) + a.probs(i, 1) == doctest::Approx(1.0));
    CHECK((a.labels[i] == 1 || a.labels[i] == 2));
  }
  CHECK_THROWS_AS(gen_class_calib(10, 0.0, Hypothesis::Null, 1), InputError);
  CHECK_THROWS_AS(gen_class_calib(10, 1.0, Hypothesis::Null, 1), InputError);
  CHECK_THROWS_AS(gen_class_calib(1, 0.5, Hypothesis::Null, 1), InputError);
}

TEST_CASE("class calibration null: label frequency tracks f1 by bin") {
  const auto p = gen_class_calib(40000, 0.5, Hypothesis::Null, 3);
  std::vector<double> pos(5, 0), cnt(5, 0), conf(5, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double f = p.probs(i, 0);
    const std::size_t b = std::min<std::size_t>(4, static_cast<std::size_t>(f * 5));
    pos[b] += p.labels[i] == 1;
    conf[b] += f;
    cnt[b] += 1;
  }
  for (std::size_t b = 0; b < 5; ++b) {
    REQUIRE(cnt[b] > 1000);
    CHECK(std::fabs(pos[b] / cnt[b] - conf[b] / cnt[b]) < 0.03);
  }
}

TEST_CASE("hand-computed least squares") {
  // z = (1, 2, 3), y = (1, 3, 2): slope = (1 + 6 + 6) / 14 = 13/14
  const std::vector<double> z{1, 2, 3}, y{1, 3, 2};
  const OlsFit fit = fit_ols(z, y);
  const double b = 13.0 / 14.0;
  CHECK(fit.slope == doctest::Approx(b).epsilon(1e-14));
  CHECK(fit.intercept == 0.0);
  const double rss = (1 - b) * (1 - b) + (3 - 2 * b) * (3 - 2 * b) + (2 - 3 * b) * (2 - 3 * b);
  CHECK(fit.sigma_sq == doctest::Approx(rss / 2).epsilon(1e-14));

  // with an intercept: slope 1/2, intercept 1, residuals (-1/2, 1, -1/2)
  const OlsFit fi = fit_ols(z, y, true);
  CHECK(fi.slope == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fi.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fi.sigma_sq == doctest::Approx(1.5 / 2).epsilon(1e-14));
}

TEST_CASE("regression calibration design") {
  const RegCalibData d = gen_reg_calib(200, 75, 0.5, 2);
  CHECK(d.y_test.size() == 75);
  CHECK(d.z_test.size() == 75);
  CHECK(d.model.homoscedastic());
  for (std::size_t i = 0; i < 75; ++i) {
    CHECK(d.model.means[i] == doctest::Approx(d.fit.slope * d.z_test[i]));
    CHECK(std::fabs(d.z_test[i]) <= 1.0);
  }
  CHECK(d.model.variances[0] == d.fit.sigma_sq);
  CHECK_THROWS_AS(gen_reg_calib(2, 10, 0.5, 1), InputError);
}

TEST_CASE("goodness-of-fit design") {
  const auto s = gen_gof_gaussian(300, 3, 10.0, 5);
  CHECK(s.data.y.cols() == 1);
  CHECK(s.data.z.cols() == 3);
  CHECK(gof_variance(std::vector<double>{1.5, 1.5, 1.5}, 10.0) == 11.0);
  CHECK(gof_variance(std::vector<double>{0, 0, 0}, 0.0) == 1.0);
  // E[g(Z)] > 1 when rho > 0
  double mean = 0.0;
  for (std::size_t i = 0; i < 300; ++i) mean += gof_variance(s.data.z.row(i), 10.0);
  CHECK(mean / 300 > 1.0);
  CHECK_THROWS_AS(gen_gof_gaussian(10, 0, 1.0, 1), InputError);
}

namespace {
DiscreteOracleSpec point_masses(bool equal) {
  DiscreteOracleSpec s;
  s.kernel = Kernel::linear();
  for (double z : {0.0, 1.0}) {
    OracleAtom a;
    a.z = {z};
    a.weight = 0.5;
    a.x_law = {{{1, 0}, 1.0}};
    a.y_law = {{equal ? std::vector<double>{1, 0} : std::vector<double>{0, 1}, 1.0}};
    s.atoms.push_back(a);
  }
  return s;
}
}  // namespace

TEST_CASE("population oracle closed forms") {
  CHECK(population_ecmmd_sq(point_masses(true)) == 0.0);
  CHECK(population_ecmmd_sq(point_masses(false)) == 2.0);

  // mixture by hand: X ~ {0,1} (1/2 each), Y ~ {0,1} (0.8, 0.2), linear kernel
  // E[XX'] = 1/4, E[YY'] = 1/25, E[XY'] = 1/10 -> 1/4 + 1/25 - 2/10 = 0.09
  DiscreteOracleSpec m;
  m.kernel = Kernel::linear();
  m.atoms = {{{0.0}, 1.0, {{{0}, 0.5}, {{1}, 0.5}}, {{{0}, 0.8}, {{1}, 0.2}}}};
  CHECK(population_ecmmd_sq(m) == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("two-cluster oracle agrees with Monte Carlo") {
  const DiscreteOracleSpec spec = two_cluster_oracle();
  const double exact = population_ecmmd_sq(spec);
  CHECK(exact > 0.0);
  // draw (X, X', Y, Y') per atom and average the four-term integrand
  const std::size_t draws = 100000;
  double sum = 0.0, sum2 = 0.0;
  auto pick = [](const std::vector<SupportPoint>& law, RngStream& rng) -> const std::vector<double>& {
    double u = rng.uniform();
    for (const auto& s : law) {
      if (u < s.prob) return s.value;
      u -= s.prob;
    }
    return law.back().value;
  };
  for (std::size_t i = 0; i < draws; ++i) {
    RngStream rng(123, StreamDomain::Jitter, static_cast<std::uint32_t>(i), 77);
    const OracleAtom& a = spec.atoms[rng.uniform() < spec.atoms[0].weight ? 0 : 1];
    const auto& x = pick(a.x_law, rng);
    const auto& xp = pick(a.x_law, rng);
    const auto& y = pick(a.y_law, rng);
    const auto& yp = pick(a.y_law, rng);
    const double v = centered_h(spec.kernel, {x, y}, {xp, yp});
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::fabs(mean - exact) < 3 * se);
}

TEST_CASE("discrete oracle draws") {
  const OracleDraw a = gen_discrete_oracle(400, 6, two_cluster_oracle());
  const OracleDraw b = gen_discrete_oracle(400, 6, two_cluster_oracle());
  CHECK(a.data.x == b.data.x);
  CHECK(a.data.z == b.data.z);
  CHECK(a.population == population_ecmmd_sq(two_cluster_oracle()));
  for (std::size_t i = 0; i < 400; ++i) {
    const double z = a.data.z(i, 0);
    CHECK((std::fabs(z) <= 0.5 || std::fabs(z - 10) <= 0.5));
  }
  DiscreteOracleSpec bad = two_cluster_oracle();
  bad.atoms[0].weight = 0.9;
  CHECK_THROWS_AS(gen_discrete_oracle(10, 1, bad), InputError);
}
