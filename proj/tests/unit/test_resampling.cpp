#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "../support/oracles.hpp"
#include "ecmmd/resampling.hpp"

using namespace ecmmd;

namespace {
GofData gof_null(std::mt19937_64& gen, std::size_t n) {
  GofData d{Matrix(n, 1), oracle::random_matrix(gen, n, 2)};
  std::normal_distribution<double> nd;
  for (std::size_t i = 0; i < n; ++i) d.y(i, 0) = d.z(i, 0) + d.z(i, 1) + nd(gen);
  return d;
}

const GaussianSampler& sum_sampler() {
  static const GaussianSampler s = GaussianSampler::affine(0.0, {1.0, 1.0}, 1.0);
  return s;
}

class ConstantSampler final : public ConditionalSampler {
 public:
  std::size_t response_dim() const override { return 1; }
  void draw(std::span<const double> z, RngStream&, std::span<double> out) const override { out[0] = z[0]; }
};

class FailingSampler final : public ConditionalSampler {
 public:
  std::size_t response_dim() const override { return 1; }
  void draw(std::span<const double> z, RngStream&, std::span<double> out) const override {
    if (z[0] > 1.0) throw std::runtime_error("boom");
    out[0] = 0.0;
  }
};
}  // namespace

TEST_CASE("p-value counting") {
  CHECK(resampling_p_value({1, 2, 3, 10}) == 0.25);
  CHECK(resampling_p_value({5, 5, 5, 5}) == 1.0);
  CHECK(resampling_p_value({1, 6, 5}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("draws are seed-deterministic and schedule-free") {
  std::mt19937_64 gen(1);
  const GofData d = gof_null(gen, 60);
  const ResampleDraws a = draw_resamples(d.z, sum_sampler(), 5, 42);
  const ResampleDraws b = draw_resamples(d.z, sum_sampler(), 5, 42);
  const ResampleDraws c = draw_resamples(d.z, sum_sampler(), 5, 43);
  REQUIRE(a.count() == 5);
  for (std::size_t m = 0; m < 5; ++m) {
    CHECK(a.slots[m] == b.slots[m]);
    CHECK_FALSE(a.slots[m] == c.slots[m]);
  }
  // more slots extend rather than reshuffle: (u, m) has its own stream
  const ResampleDraws longer = draw_resamples(d.z, sum_sampler(), 8, 42);
  for (std::size_t m = 0; m < 5; ++m) CHECK(longer.slots[m] == a.slots[m]);
}

TEST_CASE("sampler failures name the unit") {
  const Matrix z = Matrix::from_rows({{0}, {0.5}, {2}, {0}});
  try {
    draw_resamples(z, FailingSampler(), 3, 1);
    FAIL("expected SamplerError");
  } catch (const SamplerError& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("finite-sample test mechanics") {
  std::mt19937_64 gen(5);
  const GofData d = gof_null(gen, 100);
  const auto r = finite_sample_test(d, sum_sampler(), 19, KernelSpec::gaussian_median(), 10, 99);
  CHECK(r.eta_values.size() == 20);
  CHECK(r.m == 19);
  const double scaled = r.p_m * 20;
  CHECK(scaled == std::round(scaled));
  CHECK(scaled >= 1);
  CHECK(scaled <= 20);
  CHECK(r.p_m == resampling_p_value(r.eta_values));
  const auto again = finite_sample_test(d, sum_sampler(), 19, KernelSpec::gaussian_median(), 10, 99);
  CHECK(again.eta_values == r.eta_values);
  CHECK_THROWS_AS(finite_sample_test(d, sum_sampler(), 0, KernelSpec::linear(), 10, 1), InputError);
}

TEST_CASE("observed eta above all resamples gives the minimal p-value") {
  std::mt19937_64 gen(6);
  GofData d = gof_null(gen, 80);
  for (double& v : d.y.values()) v += 25.0;  // far from every draw
  const auto r = finite_sample_test(d, sum_sampler(), 9, KernelSpec::gaussian(1.0), 5, 3);
  for (std::size_t m = 0; m < 9; ++m) REQUIRE(r.eta_values[m] < r.eta_values[9]);
  CHECK(r.p_m == doctest::Approx(0.1));
}

TEST_CASE("property: relabelling resample slots permutes eta values") {
  std::mt19937_64 gen(8);
  const GofData d = gof_null(gen, 90);
  const std::size_t M = 7;
  const ResampleDraws draws = draw_resamples(d.z, sum_sampler(), M + 1, 17);
  const KnnGraph g = KnnGraph::build(d.z, 8);
  const Kernel k = Kernel::gaussian(finite_sample_bandwidth(d, draws));
  const auto base = finite_sample_from_draws(d, draws, k, g);

  std::vector<std::size_t> perm(M);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  ResampleDraws shuffled = draws;
  for (std::size_t m = 0; m < M; ++m) shuffled.slots[m] = draws.slots[perm[m]];
  CHECK(finite_sample_bandwidth(d, shuffled) == finite_sample_bandwidth(d, draws));
  const auto moved = finite_sample_from_draws(d, shuffled, k, g);
  for (std::size_t m = 0; m < M; ++m) CHECK(moved.eta_values[m] == base.eta_values[perm[m]]);
  CHECK(moved.eta_values[M] == base.eta_values[M]);
  CHECK(moved.p_m == base.p_m);
}

TEST_CASE("property: eta values match the reference pairing") {
  std::mt19937_64 gen(10);
  const GofData d = gof_null(gen, 60);
  const std::size_t M = 4;
  const ResampleDraws draws = draw_resamples(d.z, sum_sampler(), M + 1, 2);
  const KnnGraph g = KnnGraph::build(d.z, 6);
  const auto ref_graph = oracle::knn(d.z, 6);
  const auto r = finite_sample_from_draws(d, draws, Kernel::gaussian(0.9), g);
  const double scale = std::sqrt(60.0 * 6.0);
  for (std::size_t m = 0; m <= M; ++m) {
    const Matrix& second = m < M ? draws.slots[m] : d.y;
    const auto ref = oracle::sums(draws.slots[M], second, ref_graph, 0.9);
    CHECK(r.eta_values[m] == doctest::Approx(scale * static_cast<double>(ref.t_n)).epsilon(1e-10));
  }
}

TEST_CASE("derandomized statistic") {
  std::mt19937_64 gen(11);
  const GofData d = gof_null(gen, 120);
  const ResampleDraws draws = draw_resamples(d.z, sum_sampler(), 6, 5);
  const KnnGraph g = KnnGraph::build(d.z, 9);
  const auto ref_graph = oracle::knn(d.z, 9);
  const Kernel k = Kernel::gaussian(1.1);

  const auto sums = derandomized_sums(d, draws, k, g);
  const auto ref = oracle::derandomized(draws.slots, d.y, ref_graph, 1.1);
  CHECK(sums.d_n == doctest::Approx(static_cast<double>(ref.t_n)).epsilon(1e-10));
  CHECK(sums.tau_sq == doctest::Approx(static_cast<double>(ref.sigma_sq)).epsilon(1e-10));
  CHECK(sums.tau_sq >= 0.0);

  // averaging identity: D_n is the mean of the per-slot estimates
  double mean = 0.0;
  for (const Matrix& x : draws.slots) mean += ecmmd_sq(PairedDataset{x, d.y, d.z}, k, g);
  mean /= static_cast<double>(draws.count());
  CHECK(sums.d_n == doctest::Approx(mean).epsilon(1e-12));

  // one slot reproduces the plain estimator bit for bit
  const ResampleDraws one{{draws.slots[3]}};
  CHECK(derandomized_sums(d, one, k, g).d_n == ecmmd_sq(PairedDataset{draws.slots[3], d.y, d.z}, k, g));
}

TEST_CASE("derandomized degenerate and zero cases") {
  std::mt19937_64 gen(12);
  GofData d = gof_null(gen, 50);
  for (std::size_t i = 0; i < 50; ++i) d.y(i, 0) = d.z(i, 0);
  const ConstantSampler same;
  CHECK(derandomized_estimate(d, same, 3, KernelSpec::gaussian(1.0), 5, 1) == 0.0);
  CHECK_THROWS_AS(derandomized_test(d, same, 3, KernelSpec::gaussian(1.0), 5, 0.05, 1), DegenerateError);
}

TEST_CASE("derandomized test is reproducible") {
  std::mt19937_64 gen(13);
  const GofData d = gof_null(gen, 150);
  const auto a = derandomized_test(d, sum_sampler(), 20, KernelSpec::gaussian_median(), 10, 0.05, 4);
  const auto b = derandomized_test(d, sum_sampler(), 20, KernelSpec::gaussian_median(), 10, 0.05, 4);
  CHECK(a.d_n == b.d_n);
  CHECK(a.tau_hat == b.tau_hat);
  CHECK(a.tau_hat > 0.0);
  CHECK(a.m_n == 20);
}
