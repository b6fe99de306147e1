#include "boldcal/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "boldcal/errors.hpp"

namespace boldcal {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string quote_csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParseError(1, "missing required column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      // a UTF-8 byte-order mark may precede the header
      if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      for (auto& f : split_csv_line(line)) table.header.emplace_back(trim(f));
      have_header = true;
      continue;
    }
    table.rows.push_back(split_csv_line(line));
  }
  if (!have_header) throw ParseError(0, "empty input: expected a CSV header");
  return table;
}

LabeledPredictions read_predictions(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t x_col = table.column("x");
  const std::size_t y_col = table.column("y");
  std::size_t label_col = table.header.size();
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "label") label_col = i;
  }
  const bool has_label = label_col < table.header.size();

  std::vector<double> xs, ys;
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const std::size_t row = r + 2;  // header is row 1
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw ParseError(row, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                std::to_string(fields.size()));
    }
    double x = 0.0, y = 0.0;
    if (!parse_double(fields[x_col], x)) {
      throw ParseError(row, "prediction '" + fields[x_col] + "' is not a number");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ParseError(row, "prediction " + std::string(trim(fields[x_col])) + " is outside [0, 1]");
    }
    if (!parse_double(fields[y_col], y) || (y != 0.0 && y != 1.0)) {
      throw ParseError(row, "outcome '" + fields[y_col] + "' is not 0 or 1");
    }
    xs.push_back(x);
    ys.push_back(y);
    labels.push_back(has_label ? std::string(fields[label_col]) : std::to_string(xs.size()));
  }
  if (xs.empty()) throw ParseError(0, "input contains a header but no data rows");

  Eigen::ArrayXd x = Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  Eigen::ArrayXd y = Eigen::Map<Eigen::ArrayXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return {PredictionSet(std::move(x), std::move(y)), std::move(labels), has_label};
}

LabeledPredictions read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path.string() + "'");
  return read_predictions(in);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round_significant(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

void write_contour_csv(std::ostream& out, const ContourGrid& grid) {
  out << "delta,gamma,posterior,spread\n";
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      out << format_number(grid.delta_values[static_cast<std::size_t>(i)]) << ','
          << format_number(grid.gamma_values[static_cast<std::size_t>(j)]) << ','
          << format_number(grid.posterior(i, j)) << ',' << format_number(grid.spread(i, j)) << '\n';
    }
  }
}

void write_lineplot_csv(std::ostream& out, const std::vector<std::string>& labels,
                        const Eigen::ArrayXd& y, const std::vector<LineplotColumn>& columns) {
  out << "label,y";
  for (const auto& c : columns) out << ',' << c.name;
  out << '\n';
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    out << quote_csv_field(labels[static_cast<std::size_t>(i)]) << ',' << (y(i) == 1.0 ? 1 : 0);
    for (const auto& c : columns) out << ',' << format_number(c.values(i));
    out << '\n';
  }
}

std::string lineplot_column_name(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "x_t%.10g", t * 100.0);
  return buf;
}

void write_study_csv(std::ostream& out, const StudyTable& table) {
  out << "n,replicate,forecaster,sigma,metric,value\n";
  for (const auto& r : table.records) {
    const std::string prefix = std::to_string(r.n) + ',' + std::to_string(r.replicate) + ',' +
                               quote_csv_field(r.forecaster.name()) + ',' +
                               format_number(r.forecaster.noise_sigma) + ',';
    auto row = [&](const char* metric, double value) {
      out << prefix << metric << ',' << format_number(value) << '\n';
    };
    row("posterior", r.posterior);
    row("lrt_p_value", r.lrt_p_value);
    row("brier", r.brier);
    row("brier_calibration", r.brier_calibration);
    row("ece", r.ece);
    row("auc", r.auc);
    row("diverged", r.diverged ? 1.0 : 0.0);
  }
}

}  // namespace boldcal
