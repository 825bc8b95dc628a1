#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ecmmd/calibration.hpp"
#include "ecmmd/common.hpp"
#include "ecmmd/resampling.hpp"

namespace ecmmd {

/// Numeric CSV with a header row. Data rows are numbered from 1 in errors.
struct CsvTable {
  std::vector<std::string> header;
  Matrix cells;

  std::optional<std::size_t> find(const std::string& name) const;
  /// Columns whose name starts with `prefix`, in header order.
  std::vector<std::string> with_prefix(const std::string& prefix) const;
  /// Throws InputError naming the first missing column.
  Matrix select(const std::vector<std::string>& names) const;
  std::vector<double> column(const std::string& name) const;
};

/// Throws InputError on ragged rows, non-numeric cells and NaN/Inf, citing
/// the row and column.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Explicit column names; an empty group falls back to the x_*, y_*, z_*
/// prefix convention.
struct ColumnMapping {
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::vector<std::string> z;
};

PairedDataset to_paired(const CsvTable& table, const ColumnMapping& mapping = {});
GofData to_gof(const CsvTable& table, const ColumnMapping& mapping = {});

/// Pre-drawn resamples from columns r<m>_<j> (slot m, coordinate j), one slot
/// per distinct m in increasing order. Returns nullopt if there are none.
std::optional<ResampleDraws> resample_columns(const CsvTable& table, std::size_t response_dim);

/// Probability columns p_* and a 1-based integer `label` column.
ClassifierPredictions to_classifier(const CsvTable& table);

struct RegressionInput {
  std::vector<double> y;
  GaussianRegressionModel model;
};

/// Columns `y`, `mean` and either `var` or the fallback variance.
RegressionInput to_regression(const CsvTable& table, std::optional<double> variance);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& cells);
void write_csv(const std::string& path, const std::vector<std::string>& header, const Matrix& cells);

/// Header names `prefix0, prefix1, ...`.
std::vector<std::string> numbered(const std::string& prefix, std::size_t count);

}  // namespace ecmmd
