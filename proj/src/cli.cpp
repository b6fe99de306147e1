#include "boldcal/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "boldcal/assessment.hpp"
#include "boldcal/boldness.hpp"
#include "boldcal/csv.hpp"
#include "boldcal/errors.hpp"
#include "boldcal/report.hpp"
#include "boldcal/simulation.hpp"

namespace boldcal {

namespace {

struct GridFlags {
  int k = 200;
  std::vector<double> delta_range;
  std::vector<double> gamma_range;
  bool auto_grid = false;
  bool refit_cells = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--k", k, "Grid points per axis")->check(CLI::PositiveNumber);
    cmd.add_option("--delta-range", delta_range, "Delta range as MIN,MAX (log-spaced)")
        ->delimiter(',')
        ->expected(2);
    cmd.add_option("--gamma-range", gamma_range, "Gamma range as MIN,MAX (linear)")
        ->delimiter(',')
        ->expected(2);
    cmd.add_flag("--auto", auto_grid, "Centre the grid on the MLE and widen it until covered");
    cmd.add_flag("--refit-cells", refit_cells, "Refit the MLE on every adjusted set");
  }

  bool explicit_ranges() const { return !delta_range.empty() || !gamma_range.empty(); }
};

GridSpec resolve_grid(const GridFlags& flags, const PredictionSet& data, const GridOptions& options,
                      std::vector<std::string>& warnings) {
  if (flags.explicit_ranges() && !flags.auto_grid) {
    if (flags.delta_range.size() != 2 || flags.gamma_range.size() != 2) {
      throw DomainError("--delta-range and --gamma-range must be given together");
    }
    return GridSpec::make(flags.delta_range[0], flags.delta_range[1], flags.gamma_range[0],
                          flags.gamma_range[1], flags.k);
  }
  RefineOptions refine;
  refine.k = flags.k;
  refine.grid = options;
  GridSpec spec = refine_grid(data, fit_mle(data), refine);
  if (spec.warning) warnings.push_back(*spec.warning);
  return spec;
}

// Output sink: a file when a path is given, otherwise the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ParseError(0, "cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  bool is_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

int cmd_assess(const std::string& input, int bins, double prior, bool quiet, std::ostream& out,
               std::ostream& err) {
  const auto in = read_predictions(input);
  const AssessmentReport report = assess(in.data, bins, prior);
  out << to_json(report).dump(2) << '\n';
  if (!quiet) print_table(err, report);
  return kExitSuccess;
}

struct RecalibrateFlags {
  std::string input;
  bool mle = false;
  std::vector<double> levels;
  double prior = 0.5;
  std::string out_path;
  std::string report_path;
  bool quiet = false;
  GridFlags grid;
};

int cmd_recalibrate(const RecalibrateFlags& flags, std::ostream& out, std::ostream& err) {
  for (double t : flags.levels) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("--t levels must lie in (0, 1)");
  }
  const auto in = read_predictions(flags.input);
  const PredictionSet& data = in.data;
  if (data.single_class()) {
    throw DivergenceError("all outcomes belong to one class; recalibration is undefined");
  }

  RecalibrationReport report;
  report.n = data.size();
  report.base_rate = data.base_rate();
  report.prior = flags.prior;

  report.rows.push_back(make_row("original", LLOParams<double>::identity(), data.x(),
                                 posterior_calibration(data, flags.prior).posterior_calibrated));

  const MLEFit mle = fit_mle(data);
  const Eigen::ArrayXd mle_set = llo_adjust(data.x(), mle.params);
  report.rows.push_back(
      make_row("mle", mle.params, mle_set,
               posterior_calibration(data.with_predictions(mle_set), flags.prior).posterior_calibrated));

  std::vector<LineplotColumn> columns = {{"x_original", data.x()}, {"x_mle", mle_set}};

  if (!flags.levels.empty()) {
    GridOptions options;
    options.prior_calibrated = flags.prior;
    if (flags.grid.refit_cells) options.likelihood = CellLikelihood::Refit;
    const GridSpec spec = resolve_grid(flags.grid, data, options, report.warnings);
    const ContourGrid grid = evaluate_grid(data, spec, options);
    report.grid = spec;
    for (double t : flags.levels) {
      const BoldnessResult br = boldness_recalibrate(data, t, grid);
      char name[32];
      std::snprintf(name, sizeof name, "t=%g", t);
      RecalibrationRow row = make_row(name, br.params, br.recalibrated, br.achieved_posterior);
      row.t = t;
      row.feasible = br.feasible;
      if (!br.feasible) {
        report.warnings.push_back(std::string(name) + " is infeasible on this grid; reporting the " +
                                  "maximum-posterior cell");
      }
      report.rows.push_back(row);
      columns.push_back({lineplot_column_name(t), br.recalibrated});
    }
  }

  Sink lineplot(flags.out_path, out);
  write_lineplot_csv(lineplot.stream(), in.labels, data.y(), columns);

  // JSON goes to --report, else stdout when stdout is free, else stderr
  std::ostream& json_fallback = lineplot.is_file() ? out : err;
  Sink json_sink(flags.report_path, json_fallback);
  json_sink.stream() << to_json(report).dump(2) << '\n';
  if (!flags.quiet) print_table(err, report);
  return kExitSuccess;
}

int cmd_contour(const std::string& input, const GridFlags& flags, double prior,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto in = read_predictions(input);
  if (in.data.single_class()) {
    throw DivergenceError("all outcomes belong to one class; the posterior surface is undefined");
  }
  GridOptions options;
  options.prior_calibrated = prior;
  if (flags.refit_cells) options.likelihood = CellLikelihood::Refit;
  std::vector<std::string> warnings;
  const GridSpec spec = resolve_grid(flags, in.data, options, warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  const ContourGrid grid = evaluate_grid(in.data, spec, options);
  Sink sink(out_path, out);
  write_contour_csv(sink.stream(), grid);
  return kExitSuccess;
}

struct SimulateFlags {
  std::vector<int> n_values;
  int reps = 100;
  std::uint64_t seed = MCStudyConfig{}.seed;
  std::vector<double> sigmas;
  std::vector<std::string> types;
  std::string out_path;
};

int cmd_simulate(const SimulateFlags& flags, std::ostream& out) {
  MCStudyConfig config;
  if (!flags.n_values.empty()) config.n_values = flags.n_values;
  config.replicates = flags.reps;
  config.seed = flags.seed;
  const std::vector<double> sigmas = flags.sigmas.empty() ? kDefaultNoiseLevels : flags.sigmas;
  std::vector<ForecasterKind> kinds;
  if (flags.types.empty()) {
    kinds = {ForecasterKind::WellCalibrated, ForecasterKind::Hedger, ForecasterKind::Boaster,
             ForecasterKind::Biased};
  } else {
    for (const auto& t : flags.types) kinds.push_back(parse_forecaster_kind(t));
  }
  for (auto kind : kinds) {
    for (double sigma : sigmas) {
      if (!(sigma >= 0.0)) throw DomainError("--sigma values must be non-negative");
      config.forecasters.push_back(ForecasterSpec::archetype(kind, sigma));
    }
  }
  const StudyTable table = run_mc_study(config);
  Sink sink(flags.out_path, out);
  write_study_csv(sink.stream(), table);
  return kExitSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calibration assessment and boldness-recalibration for binary-event forecasts",
               "boldcal"};
  app.require_subcommand(1);

  std::function<int()> action;

  // assess
  std::string assess_input;
  int bins = 10;
  double assess_prior = 0.5;
  bool assess_quiet = false;
  auto* assess_cmd = app.add_subcommand("assess", "Posterior probability of calibration, LRT and scores");
  assess_cmd->add_option("input", assess_input, "CSV with columns x,y[,label]")->required();
  assess_cmd->add_option("--bins", bins, "Equal-width bins for BSC and ECE")->check(CLI::PositiveNumber);
  assess_cmd->add_option("--prior", assess_prior, "Prior probability of calibration")
      ->check(CLI::Range(0.0, 1.0));
  assess_cmd->add_flag("--quiet", assess_quiet, "Suppress the table on stderr");
  assess_cmd->callback([&] {
    action = [&] { return cmd_assess(assess_input, bins, assess_prior, assess_quiet, out, err); };
  });

  // recalibrate
  RecalibrateFlags rf;
  auto* recal_cmd = app.add_subcommand("recalibrate", "MLE and boldness-recalibration");
  recal_cmd->add_option("input", rf.input, "CSV with columns x,y[,label]")->required();
  recal_cmd->add_flag("--mle", rf.mle, "Report the MLE recalibration (always included)");
  recal_cmd->add_option("--t", rf.levels, "Calibration floor(s) for boldness-recalibration")
      ->delimiter(',');
  recal_cmd->add_option("--prior", rf.prior, "Prior probability of calibration")
      ->check(CLI::Range(0.0, 1.0));
  recal_cmd->add_option("--out", rf.out_path, "Lineplot CSV path (default: stdout)");
  recal_cmd->add_option("--report", rf.report_path, "JSON summary path");
  recal_cmd->add_flag("--quiet", rf.quiet, "Suppress the table on stderr");
  rf.grid.add_to(*recal_cmd);
  recal_cmd->callback([&] {
    action = [&] {
      if (rf.levels.empty() && !rf.mle) throw DomainError("recalibrate needs --mle or at least one --t");
      return cmd_recalibrate(rf, out, err);
    };
  });

  // contour
  std::string contour_input, contour_out;
  double contour_prior = 0.5;
  GridFlags contour_grid;
  auto* contour_cmd = app.add_subcommand("contour", "Posterior and spread over a (delta, gamma) grid");
  contour_cmd->add_option("input", contour_input, "CSV with columns x,y[,label]")->required();
  contour_cmd->add_option("--prior", contour_prior, "Prior probability of calibration")
      ->check(CLI::Range(0.0, 1.0));
  contour_cmd->add_option("--out", contour_out, "Contour CSV path (default: stdout)");
  contour_grid.add_to(*contour_cmd);
  contour_cmd->callback([&] {
    action = [&] { return cmd_contour(contour_input, contour_grid, contour_prior, contour_out, out, err); };
  });

  // simulate
  SimulateFlags sf;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study of the simulated forecasters");
  sim_cmd->add_option("--n", sf.n_values, "Sample size(s)")->delimiter(',')->check(CLI::PositiveNumber);
  sim_cmd->add_option("--reps", sf.reps, "Replicates per sample size")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sf.seed, "Study seed");
  sim_cmd->add_option("--sigma", sf.sigmas, "Log-odds noise level(s)")->delimiter(',');
  sim_cmd->add_option("--types", sf.types, "Forecaster types")
      ->delimiter(',')
      ->check(CLI::IsMember({"well_calibrated", "hedger", "boaster", "biased"}));
  sim_cmd->add_option("--out", sf.out_path, "Study CSV path (default: stdout)");
  sim_cmd->callback([&] { action = [&] { return cmd_simulate(sf, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    return action();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const UndefinedAucError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NonConvergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConsistencyError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace boldcal
