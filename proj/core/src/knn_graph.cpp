#include "ecmmd/knn_graph.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

#include "ecmmd/parallel.hpp"

namespace ecmmd {

namespace {

using Candidate = std::pair<double, std::uint32_t>;  // (squared distance, index)

constexpr std::size_t kLeafSize = 12;
constexpr std::size_t kQueryChunk = 512;

class KdTree {
 public:
  explicit KdTree(const Matrix& points) : pts_(points), dim_(points.cols()) {
    perm_.resize(points.rows());
    for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = static_cast<std::uint32_t>(i);
    nodes_.reserve(2 * (perm_.size() / kLeafSize + 1));
    build(0, perm_.size());
  }

  // K nearest points to row `query`, excluding the query itself, sorted by
  // (squared distance, index).
  void query(std::size_t query, std::size_t k, std::vector<Candidate>& heap) const {
    heap.clear();
    search(0, pts_.row(query).data(), static_cast<std::uint32_t>(query), k, heap);
    std::sort_heap(heap.begin(), heap.end());
  }

 private:
  struct Node {
    std::size_t begin, end;
    std::size_t left = 0, right = 0;  // 0 marks a leaf (root is never a child)
    std::size_t box;                  // offset into boxes_: dim_ mins then dim_ maxes
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    const std::size_t box = boxes_.size();
    boxes_.resize(box + 2 * dim_);
    double* lo = boxes_.data() + box;
    double* hi = lo + dim_;
    std::fill(lo, lo + dim_, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + dim_, -std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      const double* p = pts_.row(perm_[i]).data();
      for (std::size_t j = 0; j < dim_; ++j) {
        lo[j] = std::min(lo[j], p[j]);
        hi[j] = std::max(hi[j], p[j]);
      }
    }
    nodes_.push_back(Node{begin, end, 0, 0, box});
    if (end - begin <= kLeafSize) return id;

    std::size_t axis = 0;
    double spread = -1.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (hi[j] - lo[j] > spread) {
        spread = hi[j] - lo[j];
        axis = j;
      }
    }
    if (spread <= 0.0) return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(begin),
                     perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                     perm_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::uint32_t a, std::uint32_t b) { return pts_(a, axis) < pts_(b, axis); });
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  // Lower bound on the squared distance from q to any point in the box. Each
  // clamped difference is <= the true coordinate difference after rounding,
  // and terms are summed in the same order as point distances, so the bound
  // never exceeds a computed point distance.
  double box_distance(const Node& node, const double* q) const noexcept {
    const double* lo = boxes_.data() + node.box;
    const double* hi = lo + dim_;
    double sq = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      double d = 0.0;
      if (q[j] < lo[j]) {
        d = lo[j] - q[j];
      } else if (q[j] > hi[j]) {
        d = q[j] - hi[j];
      }
      sq += d * d;
    }
    return sq;
  }

  double point_distance(const double* q, std::uint32_t v) const noexcept {
    const double* p = pts_.row(v).data();
    double sq = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double d = q[j] - p[j];
      sq += d * d;
    }
    return sq;
  }

  void search(std::size_t id, const double* q, std::uint32_t self, std::size_t k,
              std::vector<Candidate>& heap) const {
    const Node& node = nodes_[id];
    if (heap.size() == k && box_distance(node, q) > heap.front().first) return;

    if (node.left == 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t v = perm_[i];
        if (v == self) continue;
        const Candidate c{point_distance(q, v), v};
        if (heap.size() < k) {
          heap.push_back(c);
          std::push_heap(heap.begin(), heap.end());
        } else if (c < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = c;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }

    const double dl = box_distance(nodes_[node.left], q);
    const double dr = box_distance(nodes_[node.right], q);
    if (dl <= dr) {
      search(node.left, q, self, k, heap);
      search(node.right, q, self, k, heap);
    } else {
      search(node.right, q, self, k, heap);
      search(node.left, q, self, k, heap);
    }
  }

  const Matrix& pts_;
  std::size_t dim_;
  std::vector<std::uint32_t> perm_;
  std::vector<Node> nodes_;
  std::vector<double> boxes_;
};

}  // namespace

KnnGraph::KnnGraph(std::size_t n, std::size_t k, std::vector<std::uint32_t> neighbors)
    : n_(n), k_(k), neighbors_(std::move(neighbors)) {
  by_index_ = neighbors_;
  for (std::size_t u = 0; u < n_; ++u) {
    auto row = by_index_.begin() + static_cast<std::ptrdiff_t>(u * k_);
    std::sort(row, row + static_cast<std::ptrdiff_t>(k_));
  }
  mutual_.resize(neighbors_.size());
  for (std::size_t u = 0; u < n_; ++u) {
    for (std::size_t j = 0; j < k_; ++j) {
      mutual_[u * k_ + j] = contains(neighbors_[u * k_ + j], u) ? 1 : 0;
    }
  }
}

KnnGraph KnnGraph::build(const Matrix& z, std::size_t k) {
  const std::size_t n = z.rows();
  if (n < 2) throw InputError("knn graph: need at least 2 covariate points");
  if (z.cols() == 0) throw InputError("knn graph: covariate dimension must be >= 1");
  if (k < 1 || k > n - 1) {
    throw InputError("knn graph: k must be in [1, n-1] (k=" + std::to_string(k) +
                     ", n=" + std::to_string(n) + ")");
  }
  if (n > std::numeric_limits<std::uint32_t>::max()) throw InputError("knn graph: too many points");
  if (!z.all_finite()) throw InputError("knn graph: non-finite covariate");

  const KdTree tree(z);
  std::vector<std::uint32_t> neighbors(n * k);
  const std::size_t chunks = (n + kQueryChunk - 1) / kQueryChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<Candidate> heap;
    heap.reserve(k + 1);
    const std::size_t end = std::min(n, (c + 1) * kQueryChunk);
    for (std::size_t u = c * kQueryChunk; u < end; ++u) {
      tree.query(u, k, heap);
      for (std::size_t j = 0; j < k; ++j) neighbors[u * k + j] = heap[j].second;
    }
  });
  return KnnGraph(n, k, std::move(neighbors));
}

KnnGraph KnnGraph::from_neighbors(std::size_t n, std::size_t k, std::vector<std::uint32_t> neighbors) {
  if (neighbors.size() != n * k) throw InputError("knn graph: neighbor table has wrong size");
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint32_t v = neighbors[u * k + j];
      if (v >= n) throw InputError("knn graph: neighbor index out of range");
      if (v == u) throw InputError("knn graph: self-loop");
    }
  }
  return KnnGraph(n, k, std::move(neighbors));
}

bool KnnGraph::contains(std::size_t u, std::size_t v) const noexcept {
  const auto row = by_index_.begin() + static_cast<std::ptrdiff_t>(u * k_);
  return std::binary_search(row, row + static_cast<std::ptrdiff_t>(k_), static_cast<std::uint32_t>(v));
}

void KnnGraph::check_index(std::size_t u) const {
  if (u >= n_) {
    throw InputError("knn graph: vertex index " + std::to_string(u) + " out of range (n=" +
                     std::to_string(n_) + ")");
  }
}

bool KnnGraph::is_edge(std::size_t u, std::size_t v) const {
  check_index(u);
  check_index(v);
  return u != v && contains(u, v);
}

bool KnnGraph::is_mutual(std::size_t u, std::size_t v) const {
  return is_edge(u, v) && contains(v, u);
}

}  // namespace ecmmd
