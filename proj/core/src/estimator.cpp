#include "ecmmd/estimator.hpp"

#include <cmath>
#include <string>

namespace ecmmd {

namespace {

void check_shapes(const Matrix& first, const Matrix& second, const KnnGraph& g) {
  if (first.rows() != g.size() || second.rows() != g.size()) {
    throw InputError("ecmmd: data has " + std::to_string(first.rows()) +
                     " rows but the graph has " + std::to_string(g.size()) + " vertices");
  }
  if (first.cols() != second.cols()) throw InputError("ecmmd: response dimensions differ");
}

}  // namespace

EdgeSums edge_sums(const Matrix& first, const Matrix& second, const Kernel& kern, const KnnGraph& g) {
  check_shapes(first, second, g);
  const std::size_t p = first.cols();
  CompensatedSum sum_h;
  CompensatedSum sum_h2;
  for (std::size_t u = 0; u < g.size(); ++u) {
    const double* xu = first.row(u).data();
    const double* yu = second.row(u).data();
    const auto nbrs = g.neighbors(u);
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      const std::size_t v = nbrs[j];
      const double h = centered_h_unchecked(kern, xu, yu, first.row(v).data(), second.row(v).data(), p);
      sum_h.add(h);
      const double h2 = h * h;
      sum_h2.add(g.edge_is_mutual(u, j) ? 2.0 * h2 : h2);
    }
  }
  return {sum_h.value(), sum_h2.value()};
}

double ecmmd_sq(const PairedDataset& data, const Kernel& kern, const KnnGraph& g) {
  const EdgeSums s = edge_sums(data.x, data.y, kern, g);
  return s.sum_h / static_cast<double>(g.edge_count());
}

double eta_n(const PairedDataset& data, const Kernel& kern, const KnnGraph& g) {
  return std::sqrt(static_cast<double>(g.edge_count())) * ecmmd_sq(data, kern, g);
}

double sigma_hat_sq(const PairedDataset& data, const Kernel& kern, const KnnGraph& g) {
  const EdgeSums s = edge_sums(data.x, data.y, kern, g);
  return s.sum_h2 / static_cast<double>(g.edge_count());
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

EcmmdResult studentize(double estimate, double variance, std::size_t n, std::size_t k, double alpha,
                       Alternative alternative) {
  EcmmdResult r;
  r.n = n;
  r.k = k;
  r.t_n = estimate;
  r.eta_n = std::sqrt(static_cast<double>(n * k)) * estimate;
  if (!(variance > 0.0)) {
    throw DegenerateError("ecmmd: variance estimate is 0 (X and Y coincide on every edge, or the kernel collapses)",
                          estimate);
  }
  r.sigma_hat = std::sqrt(variance);
  r.z_score = r.eta_n / r.sigma_hat;
  r.p_value = normal_p_value(r.z_score, alternative);
  r.reject = r.p_value <= alpha;
  return r;
}

EcmmdResult asymptotic_test(const PairedDataset& data, const Kernel& kern, const KnnGraph& g,
                            double alpha, Alternative alternative) {
  check_alpha(alpha);
  data.validate();
  const EdgeSums s = edge_sums(data.x, data.y, kern, g);
  const double nk = static_cast<double>(g.edge_count());
  return studentize(s.sum_h / nk, s.sum_h2 / nk, g.size(), g.k(), alpha, alternative);
}

EcmmdResult asymptotic_test(const PairedDataset& data, const Kernel& kern, std::size_t k,
                            double alpha, Alternative alternative) {
  check_alpha(alpha);
  data.validate();
  const KnnGraph g = KnnGraph::build(data.z, k);
  return asymptotic_test(data, kern, g, alpha, alternative);
}

}  // namespace ecmmd
