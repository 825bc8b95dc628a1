#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ecmmd/common.hpp"
#include "ecmmd/estimator.hpp"
#include "ecmmd/kernels.hpp"
#include "ecmmd/knn_graph.hpp"
#include "ecmmd/sampler.hpp"

namespace ecmmd {

inline constexpr std::size_t kDefaultResamples = 99;           // finite-sample M
inline constexpr std::size_t kDefaultDerandomizedResamples = 50;  // M_n

enum class TestModeKind { Asymptotic, FiniteSample, Derandomized };

/// Which test to run and how many resamples it uses.
struct TestMode {
  TestModeKind kind = TestModeKind::Asymptotic;
  std::size_t resamples = 0;

  static TestMode asymptotic() { return {TestModeKind::Asymptotic, 0}; }
  static TestMode finite_sample(std::size_t m = kDefaultResamples) {
    return {TestModeKind::FiniteSample, m};
  }
  static TestMode derandomized(std::size_t m_n = kDefaultDerandomizedResamples) {
    return {TestModeKind::Derandomized, m_n};
  }
};

/// Resampled responses: slots[m] holds one draw X_u^{(m)} per unit u (rows).
struct ResampleDraws {
  std::vector<Matrix> slots;

  std::size_t count() const noexcept { return slots.size(); }
};

/// Draws `slots` i.i.d. responses per unit from the sampler. The draw for
/// (u, m) comes from its own counter-based stream keyed by (seed, u, m), so
/// the result does not depend on scheduling. Sampler exceptions are rethrown
/// as SamplerError naming the unit.
ResampleDraws draw_resamples(const Matrix& z, const ConditionalSampler& sampler, std::size_t slots,
                             std::uint64_t seed);

struct FiniteSampleResult {
  double p_m = 1.0;
  /// eta^{(1)}, ..., eta^{(M)}, then the observed eta^{(M+1)} last.
  std::vector<double> eta_values;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double bandwidth = 0.0;
};

struct DerandomizedResult {
  double d_n = 0.0;
  double tau_hat = 0.0;
  double z_score = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::size_t m_n = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double bandwidth = 0.0;
};

/// p_M = (1 + #{m <= M : eta^{(m)} >= eta^{(M+1)}}) / (M+1), where the last
/// entry of `eta_values` is eta^{(M+1)}. Ties count toward the numerator.
double resampling_p_value(const std::vector<double>& eta_values);

/// Median-heuristic bandwidth for the finite-sample test, pooled over
/// |X_u^{(M+1)} - S_u| for S in {X^{(1)}, ..., X^{(M)}, Y}. The pool is
/// invariant under relabelling those M+1 slots, so exchangeability of the
/// eta^{(m)} is preserved.
double finite_sample_bandwidth(const GofData& data, const ResampleDraws& draws);

/// Median-heuristic bandwidth for the derandomized test, pooled over
/// |X_u^{(m)} - Y_u| for all m.
double derandomized_bandwidth(const GofData& data, const ResampleDraws& draws);

/// Finite-sample test on pre-drawn resamples (M+1 slots; the last slot is the
/// shared first coordinate X^{(M+1)}).
///
/// The pairing follows the exchangeable construction exactly:
///   W_u^{(m)}   = (X_u^{(M+1)}, X_u^{(m)})  for m <= M,
///   W_u^{(M+1)} = (X_u^{(M+1)}, Y_u).
/// It is not the (X^{(m)}, Y) pairing used by the derandomized statistic.
/// Every eta^{(m)} is computed on the same graph.
FiniteSampleResult finite_sample_from_draws(const GofData& data, const ResampleDraws& draws,
                                            const Kernel& kern, const KnnGraph& g);

/// Finite-sample conditional goodness-of-fit test with M resamples.
/// Valid at every n: P(p_M <= alpha) <= alpha under the null.
FiniteSampleResult finite_sample_test(const GofData& data, const ConditionalSampler& sampler,
                                      std::size_t m, const KernelSpec& kern, std::size_t k,
                                      std::uint64_t seed);

struct DerandomizedSums {
  double d_n = 0.0;
  double tau_sq = 0.0;
};

/// D_n and tau_hat^2 over M_n slots with W_u^{(m)} = (X_u^{(m)}, Y_u). The
/// per-edge mean over m is taken first, then edges are summed in the same
/// order as edge_sums(), so one slot reproduces ecmmd_sq exactly.
DerandomizedSums derandomized_sums(const GofData& data, const ResampleDraws& draws,
                                   const Kernel& kern, const KnnGraph& g);

DerandomizedResult derandomized_from_draws(const GofData& data, const ResampleDraws& draws,
                                           const Kernel& kern, const KnnGraph& g, double alpha,
                                           Alternative alternative = Alternative::TwoSided);

/// Derandomized asymptotic test: z = sqrt(nK) D_n / tau_hat.
DerandomizedResult derandomized_test(const GofData& data, const ConditionalSampler& sampler,
                                     std::size_t m_n, const KernelSpec& kern, std::size_t k,
                                     double alpha, std::uint64_t seed,
                                     Alternative alternative = Alternative::TwoSided);

/// D_n only; consistent for the population ECMMD^2 for any M_n.
double derandomized_estimate(const GofData& data, const ConditionalSampler& sampler,
                             std::size_t m_n, const KernelSpec& kern, std::size_t k,
                             std::uint64_t seed);

}  // namespace ecmmd
