#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecmmd/common.hpp"

namespace ecmmd {

/// Directed K-nearest-neighbor graph over covariate rows Z_1..Z_n (L2).
///
/// Candidates are ordered by (squared distance, index), so equidistant points
/// resolve to the smaller index and duplicated points are still well ordered.
/// Each out-neighbor list is stored in that order; downstream sums iterate it
/// as is. Indices are 0-based.
class KnnGraph {
 public:
  /// kd-tree construction, O(K n log n) expected for fixed dimension.
  /// Throws InputError if k is outside [1, n-1] or a coordinate is not finite.
  static KnnGraph build(const Matrix& z, std::size_t k);

  /// Assembles a graph from precomputed neighbor lists (n rows of k entries,
  /// each sorted by (distance, index)). Validates shape and self-loops.
  static KnnGraph from_neighbors(std::size_t n, std::size_t k, std::vector<std::uint32_t> neighbors);

  std::size_t size() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t edge_count() const noexcept { return neighbors_.size(); }

  std::span<const std::uint32_t> neighbors(std::size_t u) const noexcept {
    return {neighbors_.data() + u * k_, k_};
  }

  /// Whether the j-th stored out-edge of u is also present reversed.
  bool edge_is_mutual(std::size_t u, std::size_t j) const noexcept {
    return mutual_[u * k_ + j] != 0;
  }

  /// O(log K) membership test. Throws InputError for out-of-range indices.
  bool is_edge(std::size_t u, std::size_t v) const;
  bool is_mutual(std::size_t u, std::size_t v) const;

  bool operator==(const KnnGraph& other) const noexcept {
    return n_ == other.n_ && k_ == other.k_ && neighbors_ == other.neighbors_;
  }

 private:
  KnnGraph(std::size_t n, std::size_t k, std::vector<std::uint32_t> neighbors);
  bool contains(std::size_t u, std::size_t v) const noexcept;
  void check_index(std::size_t u) const;

  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<std::uint32_t> neighbors_;   // (distance, index) order
  std::vector<std::uint32_t> by_index_;    // same rows sorted by index
  std::vector<std::uint8_t> mutual_;
};

inline KnnGraph build_knn_graph(const Matrix& z, std::size_t k) { return KnnGraph::build(z, k); }

}  // namespace ecmmd
