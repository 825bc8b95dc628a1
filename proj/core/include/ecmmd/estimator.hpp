#pragma once

#include <cstddef>

#include "ecmmd/common.hpp"
#include "ecmmd/kernels.hpp"
#include "ecmmd/knn_graph.hpp"

namespace ecmmd {

/// Sums of the centered kernel H over the directed edges of a K-NN graph.
///
///   sum_h  = sum_{(u,v) in E} H(W_u, W_v)
///   sum_h2 = sum_{(u,v) in E} H(W_u, W_v)^2 * (1 + 1{(v,u) in E})
///
/// Both are compensated sums taken over neighbors in stored order, then
/// vertices in index order.
struct EdgeSums {
  double sum_h = 0.0;
  double sum_h2 = 0.0;
};

/// Edge sums for pairs W_u = (first_u, second_u). Rows of `first` and
/// `second` must match the graph size and share a column count.
EdgeSums edge_sums(const Matrix& first, const Matrix& second, const Kernel& kern, const KnnGraph& g);

/// T_n = (1/(nK)) sum over edges of H(W_u, W_v).
double ecmmd_sq(const PairedDataset& data, const Kernel& kern, const KnnGraph& g);

/// eta_n = sqrt(nK) * T_n.
double eta_n(const PairedDataset& data, const Kernel& kern, const KnnGraph& g);

/// Plug-in null variance of eta_n: (1/(nK)) sum H^2 (1{edge} + 1{mutual edge}).
double sigma_hat_sq(const PairedDataset& data, const Kernel& kern, const KnnGraph& g);

struct EcmmdResult {
  double t_n = 0.0;
  double eta_n = 0.0;
  double sigma_hat = 0.0;
  double z_score = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::size_t n = 0;
  std::size_t k = 0;
};

/// Studentizes an ECMMD^2-type point estimate: eta = sqrt(nK) * estimate,
/// z = eta / sqrt(variance). Throws DegenerateError (carrying `estimate`)
/// when the variance estimate is 0.
EcmmdResult studentize(double estimate, double variance, std::size_t n, std::size_t k,
                       double alpha, Alternative alternative = Alternative::TwoSided);

/// Asymptotic level-alpha test of P_{X|Z} = P_{Y|Z}: builds the K-NN graph on
/// data.z and rejects when p <= alpha. Two-sided by default.
EcmmdResult asymptotic_test(const PairedDataset& data, const Kernel& kern, std::size_t k,
                            double alpha, Alternative alternative = Alternative::TwoSided);

/// Same test on a prebuilt graph.
EcmmdResult asymptotic_test(const PairedDataset& data, const Kernel& kern, const KnnGraph& g,
                            double alpha, Alternative alternative = Alternative::TwoSided);

void check_alpha(double alpha);

}  // namespace ecmmd
