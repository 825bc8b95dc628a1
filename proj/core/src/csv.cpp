#include "ecmmd/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace ecmmd {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string where(std::size_t row, const std::string& column) {
  return "row " + std::to_string(row) + ", column '" + column + "'";
}

}  // namespace

std::optional<std::size_t> CsvTable::find(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<std::string> CsvTable::with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const std::string& h : header) {
    if (h.size() > prefix.size() && h.compare(0, prefix.size(), prefix) == 0) out.push_back(h);
  }
  return out;
}

Matrix CsvTable::select(const std::vector<std::string>& names) const {
  std::vector<std::size_t> idx;
  for (const std::string& name : names) {
    const auto i = find(name);
    if (!i) throw InputError("csv: missing column '" + name + "'");
    idx.push_back(*i);
  }
  Matrix m(cells.rows(), idx.size());
  for (std::size_t r = 0; r < cells.rows(); ++r) {
    for (std::size_t j = 0; j < idx.size(); ++j) m(r, j) = cells(r, idx[j]);
  }
  return m;
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const Matrix m = select({name});
  return m.values();
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: empty input (missing header row)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  table.header = split(line);
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j].empty()) throw InputError("csv: header column " + std::to_string(j + 1) + " is empty");
    if (std::count(table.header.begin(), table.header.end(), table.header[j]) > 1) {
      throw InputError("csv: duplicate column '" + table.header[j] + "'");
    }
  }

  const std::size_t width = table.header.size();
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split(line);
    if (fields.size() != width) {
      throw InputError("csv: row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(width));
    }
    for (std::size_t j = 0; j < width; ++j) {
      const std::string& f = fields[j];
      double v = 0.0;
      const char* first = f.data();
      const char* last = f.data() + f.size();
      if (!f.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (f.empty() || ec != std::errc() || ptr != last) {
        throw InputError("csv: " + where(row, table.header[j]) + ": non-numeric value '" + f + "'");
      }
      if (!std::isfinite(v)) {
        throw InputError("csv: " + where(row, table.header[j]) + ": non-finite value '" + f + "'");
      }
      values.push_back(v);
    }
  }
  table.cells = Matrix(row, width);
  std::copy(values.begin(), values.end(), table.cells.values().begin());
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("csv: cannot open '" + path + "'");
  return parse_csv(in);
}

namespace {

std::vector<std::string> group(const CsvTable& table, const std::vector<std::string>& explicit_names,
                               const std::string& prefix) {
  if (!explicit_names.empty()) return explicit_names;
  auto names = table.with_prefix(prefix);
  if (names.empty()) throw InputError("csv: no columns named '" + prefix + "*'");
  return names;
}

}  // namespace

PairedDataset to_paired(const CsvTable& table, const ColumnMapping& mapping) {
  PairedDataset data{table.select(group(table, mapping.x, "x_")),
                     table.select(group(table, mapping.y, "y_")),
                     table.select(group(table, mapping.z, "z_"))};
  data.validate();
  return data;
}

GofData to_gof(const CsvTable& table, const ColumnMapping& mapping) {
  GofData data{table.select(group(table, mapping.y, "y_")), table.select(group(table, mapping.z, "z_"))};
  data.validate();
  return data;
}

std::optional<ResampleDraws> resample_columns(const CsvTable& table, std::size_t response_dim) {
  // r<m>_<j>
  std::map<std::size_t, std::vector<std::pair<std::size_t, std::string>>> slots;
  for (const std::string& h : table.header) {
    if (h.size() < 4 || h[0] != 'r') continue;
    const auto underscore = h.find('_');
    if (underscore == std::string::npos || underscore == 1) continue;
    std::size_t m = 0, j = 0;
    const char* mid = h.data() + underscore;
    if (std::from_chars(h.data() + 1, mid, m).ptr != mid) continue;
    const char* end = h.data() + h.size();
    if (std::from_chars(mid + 1, end, j).ptr != end) continue;
    slots[m].emplace_back(j, h);
  }
  if (slots.empty()) return std::nullopt;
  ResampleDraws draws;
  for (auto& [m, cols] : slots) {
    std::sort(cols.begin(), cols.end());
    if (cols.size() != response_dim) {
      throw InputError("csv: resample slot r" + std::to_string(m) + "_* has " + std::to_string(cols.size()) +
                       " columns, expected " + std::to_string(response_dim));
    }
    std::vector<std::string> names;
    for (const auto& c : cols) names.push_back(c.second);
    draws.slots.push_back(table.select(names));
  }
  return draws;
}

ClassifierPredictions to_classifier(const CsvTable& table) {
  ClassifierPredictions pred;
  pred.probs = table.select(group(table, {}, "p_"));
  const auto labels = table.column("label");
  pred.labels.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double v = labels[i];
    if (v != std::floor(v) || v < 1.0) {
      throw InputError("csv: " + where(i + 1, "label") + ": labels must be integers >= 1");
    }
    pred.labels[i] = static_cast<std::size_t>(v);
  }
  pred.validate();
  return pred;
}

RegressionInput to_regression(const CsvTable& table, std::optional<double> variance) {
  RegressionInput in;
  in.y = table.column("y");
  in.model.means = table.column("mean");
  if (table.find("var")) {
    in.model.variances = table.column("var");
  } else if (variance) {
    in.model.variances = {*variance};
  } else {
    throw InputError("csv: regression input needs a 'var' column or an explicit variance");
  }
  in.model.validate();
  return in;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& cells) {
  if (header.size() != cells.cols()) throw InputError("csv: header width does not match the data");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < cells.rows(); ++i) {
    for (std::size_t j = 0; j < cells.cols(); ++j) out << (j ? "," : "") << cells(i, j);
    out << '\n';
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const Matrix& cells) {
  std::ofstream out(path);
  if (!out) throw InputError("csv: cannot write '" + path + "'");
  write_csv(out, header, cells);
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < count; ++j) names.push_back(prefix + std::to_string(j));
  return names;
}

}  // namespace ecmmd
