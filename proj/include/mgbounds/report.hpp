#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mgbounds/config.hpp"

namespace mgb {

/// A report value: a number, or a marker such as "Fail", "N/A" or
/// "inapplicable".
using Cell = std::variant<double, std::string>;

struct ReportRow {
  std::string instance;
  std::string case_id;
  double measured = 0.0;
  double param = 0.0;  ///< x coordinate for plotting (alpha, level, ...)
  std::vector<std::pair<std::string, Cell>> cells;
  std::vector<std::pair<std::string, bool>> checks;
  double seconds = 0.0;
  std::string error;

  void set(const std::string& name, Cell value);
  void check(const std::string& name, bool ok);
  const Cell* find(const std::string& name) const;
  /// No error and every check passed.
  bool passed() const;
  std::vector<std::string> failed_checks() const;
};

/// Leading CSV columns, always present in this order.
inline const std::vector<std::string> kFixedColumns{
    "instance", "case", "measured", "lower", "upper", "notay", "fs", "improved_fs", "kappa"};

std::string format_double(double v);

/// CSV text: fixed columns, then the union of remaining cells in
/// first-appearance order, then one column per check and an error column.
/// Timings are excluded so identical inputs give identical bytes.
std::string to_csv(const std::vector<ReportRow>& rows);

/// Whitespace-separated columns: param, measured and every numeric cell.
std::string to_plot_data(const std::vector<ReportRow>& rows);

std::string to_structured(const std::vector<ReportRow>& rows);
std::vector<ReportRow> from_structured(const std::string& text);
std::vector<ReportRow> read_structured(const std::string& path);

/// Writes <dir>/<stem>.csv and/or <dir>/<stem>.json plus <dir>/<stem>_plot.dat;
/// returns the paths written. Throws on empty rows or unwritable paths.
std::vector<std::string> emit(const std::vector<ReportRow>& rows, OutputFormat format,
                              const std::string& dir, const std::string& stem);

}  // namespace mgb
