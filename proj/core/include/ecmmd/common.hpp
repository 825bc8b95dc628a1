#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecmmd {

/// Invalid arguments or malformed input data (CLI exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A studentizer evaluated to zero, so no z-score exists (CLI exit code 3).
/// Carries the point estimate computed before the failure.
class DegenerateError : public std::runtime_error {
 public:
  DegenerateError(const std::string& what, double statistic)
      : std::runtime_error(what), statistic_(statistic) {}

  double statistic() const noexcept { return statistic_; }

 private:
  double statistic_;
};

/// A conditional sampler failed while drawing for unit `index()`.
class SamplerError : public std::runtime_error {
 public:
  SamplerError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Dense row-major matrix of doubles. Rows are observations.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

  const std::vector<double>& values() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }

  bool all_finite() const noexcept;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Aligned triples (X_i, Y_i, Z_i): two response samples sharing covariates.
struct PairedDataset {
  Matrix x;
  Matrix y;
  Matrix z;

  std::size_t size() const noexcept { return z.rows(); }
  /// Throws InputError unless lengths agree, x and y share a dimension and
  /// every entry is finite.
  void validate() const;
};

/// Observed (Y_i, Z_i) pairs for conditional goodness-of-fit testing.
struct GofData {
  Matrix y;
  Matrix z;

  std::size_t size() const noexcept { return z.rows(); }
  void validate() const;
};

/// Neumaier-compensated running sum. The result depends only on the order of
/// `add` calls, which callers keep fixed.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double normal_cdf(double x) noexcept;

enum class Alternative { TwoSided, Greater };

/// P-value of a standard-normal z-score. TwoSided is 2(1 - Phi(|z|)).
double normal_p_value(double z, Alternative alternative) noexcept;

/// Median of the values (mean of the two central values for even counts).
double median(std::vector<double> values);

}  // namespace ecmmd
