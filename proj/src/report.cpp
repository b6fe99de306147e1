#include "boldcal/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "boldcal/boldness.hpp"
#include "boldcal/csv.hpp"

namespace boldcal {

namespace {

using nlohmann::json;

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

template <typename T, typename F>
json optional_number(const std::optional<T>& v, F&& get) {
  return v ? number(get(*v)) : json(nullptr);
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "NA";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

AssessmentReport assess(const PredictionSet& data, int bins, double prior) {
  if (!(prior > 0.0 && prior < 1.0)) throw DomainError("prior must lie in (0, 1)");
  AssessmentReport r;
  r.n = data.size();
  r.base_rate = data.base_rate();
  r.bins = bins;
  r.prior = prior;
  r.scores = score_report(data, bins);
  if (!r.scores.auc) r.warnings.emplace_back("AUC undefined: all outcomes belong to one class");
  try {
    r.mle = fit_mle(data);
    r.bayes = bayes_assessment(r.n, r.mle->loglik_at_null, r.mle->loglik_at_mle, prior);
    r.lrt = lrt_from_fit(*r.mle);
  } catch (const DivergenceError& e) {
    r.degenerate = true;
    r.mle.reset();
    r.warnings.emplace_back(std::string("degenerate data: ") + e.what() +
                            "; posterior reported as 0");
  }
  return r;
}

RecalibrationRow make_row(std::string name, const LLOParams<double>& params,
                          const Eigen::ArrayXd& adjusted, double posterior) {
  RecalibrationRow row;
  row.name = std::move(name);
  row.params = params;
  row.posterior = posterior;
  row.range_min = adjusted.minCoeff();
  row.range_max = adjusted.maxCoeff();
  row.spread = spread(adjusted);
  return row;
}

nlohmann::json to_json(const AssessmentReport& r) {
  json mle = {
      {"delta", optional_number(r.mle, [](const MLEFit& f) { return f.params.delta; })},
      {"gamma", optional_number(r.mle, [](const MLEFit& f) { return f.params.gamma; })},
      {"loglik", optional_number(r.mle, [](const MLEFit& f) { return f.loglik_at_mle; })},
      {"converged", r.mle ? json(r.mle->converged) : json(nullptr)},
      {"iterations", r.mle ? json(r.mle->iterations) : json(nullptr)},
  };
  json lrt = {
      {"statistic", optional_number(r.lrt, [](const LRTResult& l) { return l.statistic; })},
      {"p_value", optional_number(r.lrt, [](const LRTResult& l) { return l.p_value; })},
      {"dof", 2},
  };
  auto bayes = [&](auto get) { return optional_number(r.bayes, get); };
  return json{
      {"n", r.n},
      {"base_rate", number(r.base_rate)},
      {"bins", r.bins},
      {"prior_calibrated", number(r.prior)},
      {"degenerate", r.degenerate},
      {"posterior_calibrated", number(r.posterior())},
      {"bayes_factor_21", bayes([](const BayesAssessment& b) { return b.bayes_factor_21; })},
      {"log_bayes_factor_21", bayes([](const BayesAssessment& b) { return b.log_bayes_factor_21; })},
      {"bic_null", bayes([](const BayesAssessment& b) { return b.bic_null; })},
      {"bic_mle", bayes([](const BayesAssessment& b) { return b.bic_mle; })},
      {"loglik_null", optional_number(r.mle, [](const MLEFit& f) { return f.loglik_at_null; })},
      {"mle", mle},
      {"lrt", lrt},
      {"brier", number(r.scores.brier)},
      {"brier_calibration", number(r.scores.brier_calibration)},
      {"ece", number(r.scores.ece)},
      {"auc", r.scores.auc ? number(*r.scores.auc) : json(nullptr)},
      {"auc_defined", r.scores.auc.has_value()},
      {"warnings", r.warnings},
  };
}

nlohmann::json to_json(const RecalibrationReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({
        {"name", row.name},
        {"t", row.t ? number(*row.t) : json(nullptr)},
        {"delta", number(row.params.delta)},
        {"gamma", number(row.params.gamma)},
        {"posterior_calibrated", number(row.posterior)},
        {"range_min", number(row.range_min)},
        {"range_max", number(row.range_max)},
        {"spread", number(row.spread)},
        {"feasible", row.feasible},
    });
  }
  json grid = nullptr;
  if (r.grid) {
    grid = {
        {"k_delta", r.grid->delta_values.size()},
        {"k_gamma", r.grid->gamma_values.size()},
        {"delta_min", number(r.grid->delta_values.front())},
        {"delta_max", number(r.grid->delta_values.back())},
        {"gamma_min", number(r.grid->gamma_values.front())},
        {"gamma_max", number(r.grid->gamma_values.back())},
    };
  }
  return json{
      {"n", r.n},
      {"base_rate", number(r.base_rate)},
      {"prior_calibrated", number(r.prior)},
      {"rows", rows},
      {"grid", grid},
      {"warnings", r.warnings},
  };
}

void print_table(std::ostream& out, const AssessmentReport& r) {
  auto line = [&](const char* name, const std::string& value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-22s %s\n", name, value.c_str());
    out << buf;
  };
  out << "calibration assessment (n = " << r.n << ", base rate " << fixed(r.base_rate, 4) << ")\n";
  line("P(calibrated | y)", fixed(r.posterior(), 4) + (r.degenerate ? "  [degenerate]" : ""));
  if (r.mle) {
    line("MLE delta", fixed(r.mle->params.delta, 3));
    line("MLE gamma", fixed(r.mle->params.gamma, 3));
  }
  if (r.lrt) line("LRT p-value", fixed(r.lrt->p_value, 4));
  line("Brier", fixed(r.scores.brier, 4));
  line("Brier calibration", fixed(r.scores.brier_calibration, 4));
  line("ECE", fixed(r.scores.ece, 4));
  line("AUC", r.scores.auc ? fixed(*r.scores.auc, 4) : std::string("undefined"));
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
}

void print_table(std::ostream& out, const RecalibrationReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "  %-10s %8s %8s %10s %8s %8s\n", "set", "delta", "gamma",
                "P(cal|y)", "min", "max");
  out << "recalibration summary (n = " << r.n << ", base rate " << fixed(r.base_rate, 4) << ")\n"
      << buf;
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "  %-10s %8.3f %8.3f %10.4f %8.3f %8.3f%s\n", row.name.c_str(),
                  row.params.delta, row.params.gamma, row.posterior, row.range_min, row.range_max,
                  row.feasible ? "" : "  [infeasible]");
    out << buf;
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
}

}  // namespace boldcal
