#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boldcal/boldness.hpp"
#include "boldcal/prediction_set.hpp"
#include "boldcal/simulation.hpp"

namespace boldcal {

/// Predictions read from an input file, with per-row labels. Rows without a
/// label column are labelled by their 1-based data row number.
struct LabeledPredictions {
  PredictionSet data;
  std::vector<std::string> labels;
  bool has_label_column = false;
};

/// Reads CSV with header containing `x` and `y` (and optionally `label`), in
/// any column order. Throws ParseError naming the offending row; the header
/// is row 1.
LabeledPredictions read_predictions(std::istream& in);
LabeledPredictions read_predictions(const std::filesystem::path& path);

/// Plain CSV table: header plus rows of raw fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or throws ParseError.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
std::vector<std::string> split_csv_line(std::string_view line);
std::string quote_csv_field(std::string_view field);

/// %.12g formatting used for every number written to CSV; NaN is "NA".
std::string format_number(double v);
/// The value as it reads back after format_number.
double round_significant(double v);

/// Header `delta,gamma,posterior,spread`; rows delta-major.
void write_contour_csv(std::ostream& out, const ContourGrid& grid);

struct LineplotColumn {
  std::string name;  ///< e.g. "x_mle", "x_t95"
  Eigen::ArrayXd values;
};

/// Header `label,y,x_original,x_mle[,x_t...]`, rows in input order.
void write_lineplot_csv(std::ostream& out, const std::vector<std::string>& labels,
                        const Eigen::ArrayXd& y, const std::vector<LineplotColumn>& columns);

/// Column name for a calibration floor: 0.95 -> "x_t95", 0.975 -> "x_t97.5".
std::string lineplot_column_name(double t);

/// Long format: `n,replicate,forecaster,sigma,metric,value`.
void write_study_csv(std::ostream& out, const StudyTable& table);

}  // namespace boldcal
