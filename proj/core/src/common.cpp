#include "ecmmd/common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ecmmd {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t p = n == 0 ? 0 : rows.begin()->size();
  Matrix m(n, p);
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != p) throw InputError("Matrix::from_rows: ragged rows");
    std::copy(r.begin(), r.end(), m.row(i).begin());
    ++i;
  }
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.values().begin());
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void PairedDataset::validate() const {
  const std::size_t n = z.rows();
  if (x.rows() != n || y.rows() != n) {
    throw InputError("paired dataset: x, y and z must have the same number of rows (got " +
                     std::to_string(x.rows()) + ", " + std::to_string(y.rows()) + ", " +
                     std::to_string(n) + ")");
  }
  if (x.cols() != y.cols()) throw InputError("paired dataset: x and y response dimensions differ");
  if (n > 0 && (x.cols() == 0 || z.cols() == 0)) {
    throw InputError("paired dataset: response and covariate dimensions must be >= 1");
  }
  if (!x.all_finite() || !y.all_finite() || !z.all_finite()) {
    throw InputError("paired dataset: non-finite value");
  }
}

void GofData::validate() const {
  if (y.rows() != z.rows()) throw InputError("gof data: y and z must have the same number of rows");
  if (z.rows() > 0 && (y.cols() == 0 || z.cols() == 0)) {
    throw InputError("gof data: response and covariate dimensions must be >= 1");
  }
  if (!y.all_finite() || !z.all_finite()) throw InputError("gof data: non-finite value");
}

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::fabs(sum_) >= std::fabs(v)) {
    compensation_ += (sum_ - t) + v;
  } else {
    compensation_ += (v - t) + sum_;
  }
  sum_ = t;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_p_value(double z, Alternative alternative) noexcept {
  if (alternative == Alternative::Greater) return 0.5 * std::erfc(z / std::numbers::sqrt2);
  return std::erfc(std::fabs(z) / std::numbers::sqrt2);
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace ecmmd
