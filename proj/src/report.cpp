#include "mgbounds/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace mgb {

using ojson = nlohmann::ordered_json;

void ReportRow::set(const std::string& name, Cell value) {
  for (auto& [k, v] : cells) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  cells.emplace_back(name, std::move(value));
}

void ReportRow::check(const std::string& name, bool ok) {
  for (auto& [k, v] : checks) {
    if (k == name) {
      v = ok;
      return;
    }
  }
  checks.emplace_back(name, ok);
}

const Cell* ReportRow::find(const std::string& name) const {
  for (const auto& [k, v] : cells)
    if (k == name) return &v;
  return nullptr;
}

bool ReportRow::passed() const { return error.empty() && failed_checks().empty(); }

std::vector<std::string> ReportRow::failed_checks() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : checks)
    if (!v) out.push_back(k);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

template <typename Getter>
std::vector<std::string> union_names(const std::vector<ReportRow>& rows, Getter get,
                                     const std::vector<std::string>& skip) {
  std::vector<std::string> names;
  auto seen = [&](const std::string& n) {
    for (const auto& s : skip)
      if (s == n) return true;
    for (const auto& s : names)
      if (s == n) return true;
    return false;
  };
  for (const auto& r : rows)
    for (const auto& [k, v] : get(r))
      if (!seen(k)) names.push_back(k);
  return names;
}

void require_rows(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw Error("report: no rows to emit");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("report: cannot open " + path + " for writing");
  os << text;
  if (!os) throw Error("report: write to " + path + " failed");
}

// JSON has no literal for NaN or infinity; those are tagged so they read back
// as numbers rather than as text cells.
ojson number_json(double v) {
  if (std::isfinite(v)) return ojson(v);
  ojson j;
  j["non_finite"] = format_double(v);
  return j;
}

double number_from_json(const ojson& j) {
  if (j.is_object()) {
    const auto s = j.at("non_finite").get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error("report: bad non-finite marker '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

std::string to_csv(const std::vector<ReportRow>& rows) {
  require_rows(rows);
  const auto extra = union_names(rows, [](const ReportRow& r) { return r.cells; }, kFixedColumns);
  const auto checks = union_names(rows, [](const ReportRow& r) { return r.checks; }, {});
  std::ostringstream os;
  for (std::size_t i = 0; i < kFixedColumns.size(); ++i) os << (i ? "," : "") << kFixedColumns[i];
  for (const auto& n : extra) os << ',' << csv_escape(n);
  for (const auto& n : checks) os << ",check_" << csv_escape(n);
  os << ",error\n";
  for (const auto& r : rows) {
    os << csv_escape(r.instance) << ',' << csv_escape(r.case_id) << ',' << format_double(r.measured);
    for (std::size_t i = 3; i < kFixedColumns.size(); ++i) {
      const Cell* c = r.find(kFixedColumns[i]);
      os << ',' << (c ? csv_escape(cell_text(*c)) : "");
    }
    for (const auto& n : extra) {
      const Cell* c = r.find(n);
      os << ',' << (c ? csv_escape(cell_text(*c)) : "");
    }
    for (const auto& n : checks) {
      os << ',';
      for (const auto& [k, v] : r.checks)
        if (k == n) os << (v ? "pass" : "FAIL");
    }
    os << ',' << csv_escape(r.error) << '\n';
  }
  return os.str();
}

std::string to_plot_data(const std::vector<ReportRow>& rows) {
  require_rows(rows);
  std::vector<std::string> series;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.cells)
      if (std::holds_alternative<double>(v) &&
          std::find(series.begin(), series.end(), k) == series.end())
        series.push_back(k);
  std::ostringstream os;
  os << "# param measured";
  for (const auto& s : series) os << ' ' << s;
  os << '\n';
  for (const auto& r : rows) {
    os << format_double(r.param) << ' ' << format_double(r.measured);
    for (const auto& s : series) {
      const Cell* c = r.find(s);
      const double* d = c ? std::get_if<double>(c) : nullptr;
      os << ' ' << (d ? format_double(*d) : "nan");
    }
    os << '\n';
  }
  return os.str();
}

std::string to_structured(const std::vector<ReportRow>& rows) {
  require_rows(rows);
  ojson out = ojson::array();
  for (const auto& r : rows) {
    ojson j;
    j["instance"] = r.instance;
    j["case"] = r.case_id;
    j["measured"] = number_json(r.measured);
    j["param"] = number_json(r.param);
    ojson cells = ojson::object();
    for (const auto& [k, v] : r.cells) {
      if (const double* d = std::get_if<double>(&v)) {
        cells[k] = number_json(*d);
      } else {
        cells[k] = std::get<std::string>(v);
      }
    }
    j["cells"] = std::move(cells);
    ojson checks = ojson::object();
    for (const auto& [k, v] : r.checks) checks[k] = v;
    j["checks"] = std::move(checks);
    j["seconds"] = number_json(r.seconds);
    j["error"] = r.error;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::vector<ReportRow> from_structured(const std::string& text) {
  ojson in;
  try {
    in = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw Error(std::string("report: malformed structured file: ") + e.what());
  }
  if (!in.is_array()) throw Error("report: structured file must hold an array of rows");
  std::vector<ReportRow> rows;
  try {
    for (const auto& j : in) {
      ReportRow r;
      r.instance = j.at("instance").get<std::string>();
      r.case_id = j.at("case").get<std::string>();
      r.measured = number_from_json(j.at("measured"));
      r.param = number_from_json(j.at("param"));
      for (const auto& [k, v] : j.at("cells").items()) {
        if (v.is_number() || v.is_object()) {
          r.cells.emplace_back(k, number_from_json(v));
        } else {
          r.cells.emplace_back(k, v.get<std::string>());
        }
      }
      for (const auto& [k, v] : j.at("checks").items()) r.checks.emplace_back(k, v.get<bool>());
      r.seconds = number_from_json(j.at("seconds"));
      r.error = j.at("error").get<std::string>();
      rows.push_back(std::move(r));
    }
  } catch (const ojson::exception& e) {
    throw Error(std::string("report: malformed row: ") + e.what());
  }
  return rows;
}

std::vector<ReportRow> read_structured(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("report: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_structured(ss.str());
}

std::vector<std::string> emit(const std::vector<ReportRow>& rows, OutputFormat format,
                              const std::string& dir, const std::string& stem) {
  require_rows(rows);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("report: cannot create directory " + dir + ": " + ec.message());
  const std::string base = (std::filesystem::path(dir) / stem).string();
  std::vector<std::string> written;
  if (format == OutputFormat::csv || format == OutputFormat::both) {
    write_file(base + ".csv", to_csv(rows));
    written.push_back(base + ".csv");
  }
  if (format == OutputFormat::structured || format == OutputFormat::both) {
    write_file(base + ".json", to_structured(rows));
    written.push_back(base + ".json");
  }
  write_file(base + "_plot.dat", to_plot_data(rows));
  written.push_back(base + "_plot.dat");
  return written;
}

}  // namespace mgb
