#include "ecmmd/resampling.hpp"

#include <cmath>
#include <string>

#include "ecmmd/parallel.hpp"

namespace ecmmd {

namespace {

void check_draws(const GofData& data, const ResampleDraws& draws, std::size_t min_slots) {
  if (draws.count() < min_slots) {
    throw InputError("resampling: need at least " + std::to_string(min_slots) + " resample slots");
  }
  for (const Matrix& slot : draws.slots) {
    if (slot.rows() != data.size() || slot.cols() != data.y.cols()) {
      throw InputError("resampling: resample slot shape does not match the observed responses");
    }
    if (!slot.all_finite()) throw InputError("resampling: non-finite resampled value");
  }
}

Kernel resolve(const KernelSpec& spec, double median_bandwidth) {
  if (spec.kind == KernelKind::Linear) return Kernel::linear();
  return Kernel::gaussian(spec.bandwidth ? *spec.bandwidth : median_bandwidth);
}

double eta_from_sums(const EdgeSums& s, const KnnGraph& g) {
  const double nk = static_cast<double>(g.edge_count());
  return std::sqrt(nk) * (s.sum_h / nk);
}

}  // namespace

ResampleDraws draw_resamples(const Matrix& z, const ConditionalSampler& sampler, std::size_t slots,
                             std::uint64_t seed) {
  const std::size_t n = z.rows();
  const std::size_t p = sampler.response_dim();
  ResampleDraws draws;
  draws.slots.assign(slots, Matrix(n, p));
  parallel_for(n, [&](std::size_t u) {
    for (std::size_t m = 0; m < slots; ++m) {
      RngStream rng(seed, StreamDomain::Resample, static_cast<std::uint32_t>(u),
                    static_cast<std::uint32_t>(m));
      try {
        sampler.draw(z.row(u), rng, draws.slots[m].row(u));
      } catch (const std::exception& e) {
        throw SamplerError("sampler failed at unit " + std::to_string(u) + ": " + e.what(), u);
      }
    }
  });
  return draws;
}

double resampling_p_value(const std::vector<double>& eta_values) {
  if (eta_values.size() < 2) throw InputError("resampling p-value: need M >= 1 resamples");
  const std::size_t m = eta_values.size() - 1;
  const double observed = eta_values.back();
  std::size_t count = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (eta_values[i] >= observed) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(m + 1);
}

double finite_sample_bandwidth(const GofData& data, const ResampleDraws& draws) {
  check_draws(data, draws, 2);
  const std::size_t m = draws.count() - 1;
  const Matrix& anchor = draws.slots[m];
  std::vector<double> distances;
  distances.reserve(data.size() * (m + 1));
  for (std::size_t s = 0; s <= m; ++s) {
    const Matrix& other = s < m ? draws.slots[s] : data.y;
    for (std::size_t u = 0; u < data.size(); ++u) {
      distances.push_back(euclidean_distance(anchor.row(u), other.row(u)));
    }
  }
  return median_heuristic(std::move(distances));
}

double derandomized_bandwidth(const GofData& data, const ResampleDraws& draws) {
  check_draws(data, draws, 1);
  std::vector<double> distances;
  distances.reserve(data.size() * draws.count());
  for (const Matrix& slot : draws.slots) {
    for (std::size_t u = 0; u < data.size(); ++u) {
      distances.push_back(euclidean_distance(slot.row(u), data.y.row(u)));
    }
  }
  return median_heuristic(std::move(distances));
}

FiniteSampleResult finite_sample_from_draws(const GofData& data, const ResampleDraws& draws,
                                            const Kernel& kern, const KnnGraph& g) {
  data.validate();
  check_draws(data, draws, 2);
  const std::size_t m = draws.count() - 1;
  const Matrix& anchor = draws.slots[m];

  FiniteSampleResult r;
  r.m = m;
  r.n = g.size();
  r.k = g.k();
  r.bandwidth = kern.bandwidth();
  r.eta_values.assign(m + 1, 0.0);
  parallel_for(m + 1, [&](std::size_t s) {
    const Matrix& second = s < m ? draws.slots[s] : data.y;
    r.eta_values[s] = eta_from_sums(edge_sums(anchor, second, kern, g), g);
  });
  r.p_m = resampling_p_value(r.eta_values);
  return r;
}

FiniteSampleResult finite_sample_test(const GofData& data, const ConditionalSampler& sampler,
                                      std::size_t m, const KernelSpec& kern, std::size_t k,
                                      std::uint64_t seed) {
  if (m < 1) throw InputError("finite-sample test: M must be >= 1");
  data.validate();
  if (sampler.response_dim() != data.y.cols()) {
    throw InputError("finite-sample test: sampler dimension does not match the responses");
  }
  const KnnGraph g = KnnGraph::build(data.z, k);
  const ResampleDraws draws = draw_resamples(data.z, sampler, m + 1, seed);
  const Kernel kernel = resolve(kern, kern.needs_median() ? finite_sample_bandwidth(data, draws) : 0.0);
  FiniteSampleResult r = finite_sample_from_draws(data, draws, kernel, g);
  r.seed = seed;
  return r;
}

DerandomizedSums derandomized_sums(const GofData& data, const ResampleDraws& draws,
                                   const Kernel& kern, const KnnGraph& g) {
  check_draws(data, draws, 1);
  if (data.size() != g.size()) throw InputError("derandomized: data and graph sizes differ");
  const std::size_t p = data.y.cols();
  const std::size_t slots = draws.count();
  const double inv_slots = 1.0 / static_cast<double>(slots);

  CompensatedSum sum_h;
  CompensatedSum sum_h2;
  for (std::size_t u = 0; u < g.size(); ++u) {
    const double* yu = data.y.row(u).data();
    const auto nbrs = g.neighbors(u);
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      const std::size_t v = nbrs[j];
      const double* yv = data.y.row(v).data();
      CompensatedSum edge;
      for (std::size_t m = 0; m < slots; ++m) {
        const Matrix& xs = draws.slots[m];
        edge.add(centered_h_unchecked(kern, xs.row(u).data(), yu, xs.row(v).data(), yv, p));
      }
      const double h = slots == 1 ? edge.value() : edge.value() * inv_slots;
      sum_h.add(h);
      const double h2 = h * h;
      sum_h2.add(g.edge_is_mutual(u, j) ? 2.0 * h2 : h2);
    }
  }
  const double nk = static_cast<double>(g.edge_count());
  return {sum_h.value() / nk, sum_h2.value() / nk};
}

DerandomizedResult derandomized_from_draws(const GofData& data, const ResampleDraws& draws,
                                           const Kernel& kern, const KnnGraph& g, double alpha,
                                           Alternative alternative) {
  check_alpha(alpha);
  data.validate();
  const DerandomizedSums s = derandomized_sums(data, draws, kern, g);
  const EcmmdResult st = studentize(s.d_n, s.tau_sq, g.size(), g.k(), alpha, alternative);
  DerandomizedResult r;
  r.d_n = s.d_n;
  r.tau_hat = st.sigma_hat;
  r.z_score = st.z_score;
  r.p_value = st.p_value;
  r.reject = st.reject;
  r.m_n = draws.count();
  r.n = g.size();
  r.k = g.k();
  r.bandwidth = kern.bandwidth();
  return r;
}

DerandomizedResult derandomized_test(const GofData& data, const ConditionalSampler& sampler,
                                     std::size_t m_n, const KernelSpec& kern, std::size_t k,
                                     double alpha, std::uint64_t seed, Alternative alternative) {
  if (m_n < 1) throw InputError("derandomized test: M_n must be >= 1");
  check_alpha(alpha);
  data.validate();
  if (sampler.response_dim() != data.y.cols()) {
    throw InputError("derandomized test: sampler dimension does not match the responses");
  }
  const KnnGraph g = KnnGraph::build(data.z, k);
  const ResampleDraws draws = draw_resamples(data.z, sampler, m_n, seed);
  const Kernel kernel = resolve(kern, kern.needs_median() ? derandomized_bandwidth(data, draws) : 0.0);
  DerandomizedResult r = derandomized_from_draws(data, draws, kernel, g, alpha, alternative);
  r.seed = seed;
  return r;
}

double derandomized_estimate(const GofData& data, const ConditionalSampler& sampler,
                             std::size_t m_n, const KernelSpec& kern, std::size_t k,
                             std::uint64_t seed) {
  if (m_n < 1) throw InputError("derandomized estimate: M_n must be >= 1");
  data.validate();
  const KnnGraph g = KnnGraph::build(data.z, k);
  const ResampleDraws draws = draw_resamples(data.z, sampler, m_n, seed);
  const Kernel kernel = resolve(kern, kern.needs_median() ? derandomized_bandwidth(data, draws) : 0.0);
  return derandomized_sums(data, draws, kernel, g).d_n;
}

}  // namespace ecmmd
