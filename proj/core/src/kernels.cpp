#include "ecmmd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecmmd {

std::string to_string(KernelKind kind) {
  return kind == KernelKind::Linear ? "linear" : "gaussian";
}

Kernel Kernel::gaussian(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InputError("gaussian kernel bandwidth must be finite and > 0");
  }
  Kernel k(KernelKind::Gaussian, bandwidth);
  k.inv_bandwidth_sq_ = 1.0 / (bandwidth * bandwidth);
  return k;
}

double Kernel::evaluate(const double* x, const double* y, std::size_t dim) const noexcept {
  if (kind_ == KernelKind::Linear) {
    double dot = 0.0;
    for (std::size_t j = 0; j < dim; ++j) dot += x[j] * y[j];
    return dot;
  }
  double sq = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double d = x[j] - y[j];
    sq += d * d;
  }
  return std::exp(-sq * inv_bandwidth_sq_);
}

double Kernel::operator()(ResponsePoint x, ResponsePoint y) const {
  if (x.size() != y.size()) {
    throw InputError("kernel: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  return evaluate(x.data(), y.data(), x.size());
}

double eval_kernel(const Kernel& k, ResponsePoint x, ResponsePoint y) { return k(x, y); }

double centered_h(const Kernel& k, const ResponsePair& w, const ResponsePair& w_prime) {
  const std::size_t p = w.first.size();
  if (w.second.size() != p || w_prime.first.size() != p || w_prime.second.size() != p) {
    throw InputError("centered_h: all four points must share a dimension");
  }
  return centered_h_unchecked(k, w.first.data(), w.second.data(), w_prime.first.data(),
                              w_prime.second.data(), p);
}

double euclidean_distance(ResponsePoint a, ResponsePoint b) {
  if (a.size() != b.size()) throw InputError("distance: dimension mismatch");
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sq += d * d;
  }
  return std::sqrt(sq);
}

double median_heuristic(std::vector<double> distances) {
  if (distances.empty()) throw InputError("median bandwidth: no pairs");
  double smallest_positive = std::numeric_limits<double>::infinity();
  for (double d : distances) {
    if (d > 0.0) smallest_positive = std::min(smallest_positive, d);
  }
  if (!std::isfinite(smallest_positive)) {
    throw DegenerateError("median bandwidth: every pair has distance 0", 0.0);
  }
  const double m = median(std::move(distances));
  return m > 0.0 ? m : smallest_positive;
}

double median_bandwidth(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows()) throw InputError("median bandwidth: row count mismatch");
  std::vector<double> distances(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) distances[i] = euclidean_distance(x.row(i), y.row(i));
  return median_heuristic(std::move(distances));
}

double median_bandwidth(const PairedDataset& data) { return median_bandwidth(data.x, data.y); }

KernelSpec KernelSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "linear") {
    if (!arg.empty()) throw InputError("kernel spec: linear kernel takes no argument");
    return linear();
  }
  if (kind != "gaussian") throw InputError("kernel spec: unknown kernel '" + kind + "'");
  if (arg.empty() || arg == "median") return gaussian_median();
  double lambda = 0.0;
  try {
    std::size_t used = 0;
    lambda = std::stod(arg, &used);
    if (used != arg.size()) throw InputError("");
  } catch (const std::exception&) {
    throw InputError("kernel spec: bad bandwidth '" + arg + "'");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("kernel spec: bandwidth must be finite and > 0");
  }
  return gaussian(lambda);
}

std::string KernelSpec::to_string() const {
  if (kind == KernelKind::Linear) return "linear";
  return bandwidth ? "gaussian:" + std::to_string(*bandwidth) : "gaussian:median";
}

void validate_one_hot(ResponsePoint point) {
  std::size_t ones = 0;
  for (double v : point) {
    if (v == 1.0) {
      ++ones;
    } else if (v != 0.0) {
      throw InputError("one-hot vector has an entry other than 0 or 1");
    }
  }
  if (ones != 1) throw InputError("one-hot vector must have exactly one entry equal to 1");
}

std::vector<double> one_hot(std::size_t index, std::size_t classes) {
  if (index >= classes) throw InputError("one_hot: class index out of range");
  std::vector<double> v(classes, 0.0);
  v[index] = 1.0;
  return v;
}

}  // namespace ecmmd
