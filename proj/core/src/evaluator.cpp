// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/evaluator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "arollout/error.hpp"
#include "arollout/normalization.hpp"

namespace arollout {

EvalReport evaluate_windows(const Forecaster& model, std::span<const SeriesWindow> windows, const RolloutConfig& cfg,
                            ReportScale scale) {
  cfg.validate();
  if (windows.empty()) throw InvalidInput("evaluate: no windows to evaluate");
  const std::size_t n = cfg.steps, t_len = cfg.block, l = cfg.overlap;
  const std::size_t v_count = windows.front().context.cols();

  std::vector<double> sq_sum(n, 0.0), abs_sum(n, 0.0);
  std::vector<std::size_t> pair_violations(n > 1 ? n - 1 : 0, 0);
  std::size_t step_violations = 0, step_pairs = 0;
  std::vector<double> block_mse(n);
  std::vector<double> prev_residual(v_count);

  for (const SeriesWindow& raw : windows) {
    if (raw.future.rows() < cfg.horizon()) throw InvalidInput("evaluate: window future shorter than n*T");
    const NormalizedWindow norm = normalize_window(raw);
    Tensor pred = rollout_predict(model, norm.window.context, cfg).values;
    Tensor truth = norm.window.future;
    if (scale == ReportScale::kRaw) {
      pred = invert_norm(pred, norm.state);
      truth = raw.future;
    }
    for (std::size_t k = 0; k < n; ++k) {
      double block_sq = 0.0;
      for (std::size_t r = 0; r < t_len; ++r) {
        const std::size_t row = k * t_len + r;
        for (std::size_t v = 0; v < v_count; ++v) {
          const double residual = std::abs(pred.at(l + row, v) - truth.at(row, v));
          block_sq += residual * residual;
          abs_sum[k] += residual;
          if (row > 0) {
            ++step_pairs;
            if (residual < prev_residual[v]) ++step_violations;
          }
          prev_residual[v] = residual;
        }
      }
      sq_sum[k] += block_sq;
      block_mse[k] = block_sq / static_cast<double>(t_len * v_count);
    }
    for (std::size_t k = 1; k < n; ++k) {
      if (block_mse[k] < block_mse[k - 1]) ++pair_violations[k - 1];
    }
  }

  EvalReport report;
  report.block_length = t_len;
  report.steps = n;
  report.scale = scale;
  report.window_count = windows.size();
  const double per_block_count = static_cast<double>(windows.size() * t_len * v_count);
  double total_sq = 0.0, total_abs = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    report.per_block.push_back({sq_sum[k] / per_block_count, abs_sum[k] / per_block_count});
    total_sq += sq_sum[k];
    total_abs += abs_sum[k];
  }
  report.cumulative = {total_sq / (per_block_count * static_cast<double>(n)),
                       total_abs / (per_block_count * static_cast<double>(n))};
  std::size_t violated = 0;
  for (std::size_t c : pair_violations) {
    report.pair_violation_rates.push_back(static_cast<double>(c) / static_cast<double>(windows.size()));
    violated += c;
  }
  if (n > 1) {
    report.block_violation_rate = static_cast<double>(violated) / static_cast<double>(windows.size() * (n - 1));
  }
  if (step_pairs > 0) report.step_violation_rate = static_cast<double>(step_violations) / static_cast<double>(step_pairs);
  return report;
}

EvalReport evaluate(const Forecaster& model, const SeriesDataset& ds, Split split, const RolloutConfig& cfg,
                    ReportScale scale) {
  cfg.validate();
  WindowSet set = window_iter(ds, split, cfg.context, cfg.horizon());
  if (set.windows.empty()) {
    throw InvalidInput("evaluate: " + set.warning.value_or(std::string(to_string(split)) + " split is empty"));
  }
  return evaluate_windows(model, set.windows, cfg, scale);
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["block_length"] = report.block_length;
  j["steps"] = report.steps;
  j["scale"] = report.scale == ReportScale::kRaw ? "raw" : "normalized";
  j["window_count"] = report.window_count;
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t k = 0; k < report.per_block.size(); ++k) {
    blocks.push_back({{"block", k + 1},
                      {"prediction_length", (k + 1) * report.block_length},
                      {"mse", report.per_block[k].mse},
                      {"mae", report.per_block[k].mae}});
  }
  j["per_block"] = std::move(blocks);
  j["cumulative"] = {{"mse", report.cumulative.mse}, {"mae", report.cumulative.mae}};
  j["pair_violation_rates"] = report.pair_violation_rates;
  j["block_violation_rate"] = report.block_violation_rate;
  j["step_violation_rate"] = report.step_violation_rate;
  return j;
}

double relative_reduction(double baseline, double candidate) {
  if (baseline == 0.0) throw InvalidInput("relative_reduction: baseline is zero");
  return (baseline - candidate) / baseline;
}

namespace {

ComparisonRow make_row(std::size_t length, std::span<const NamedReport> reports,
                       const std::function<BlockMetrics(const EvalReport&)>& pick) {
  ComparisonRow row;
  row.prediction_length = length;
  const BlockMetrics base = pick(reports.front().report);
  for (const NamedReport& r : reports) {
    const BlockMetrics m = pick(r.report);
    row.mse.push_back(m.mse);
    row.mae.push_back(m.mae);
    row.mse_delta.push_back(m.mse - base.mse);
    row.mse_relative_reduction.push_back(base.mse == 0.0 ? 0.0 : relative_reduction(base.mse, m.mse));
  }
  return row;
}

}  // namespace

ComparisonTable compare(std::span<const NamedReport> reports) {
  if (reports.empty()) throw InvalidInput("compare: no reports given");
  const EvalReport& first = reports.front().report;
  for (const NamedReport& r : reports) {
    if (r.report.block_length != first.block_length || r.report.steps != first.steps) {
      throw InvalidInput("compare: report '" + r.name + "' covers " + std::to_string(r.report.steps) + " x " +
                         std::to_string(r.report.block_length) + " steps, baseline covers " +
                         std::to_string(first.steps) + " x " + std::to_string(first.block_length));
    }
  }
  ComparisonTable table;
  for (const NamedReport& r : reports) table.names.push_back(r.name);
  for (std::size_t k = 0; k < first.steps; ++k) {
    table.rows.push_back(make_row((k + 1) * first.block_length, reports,
                                  [k](const EvalReport& r) { return r.per_block[k]; }));
  }
  table.cumulative =
      make_row(first.steps * first.block_length, reports, [](const EvalReport& r) { return r.cumulative; });
  return table;
}

std::string format_comparison(const ComparisonTable& table) {
  std::string out = "length";
  char cell[64];
  for (const auto& name : table.names) {
    out += "  " + name + ".mse  " + name + ".delta  " + name + ".rel";
  }
  out += "\n";
  auto emit = [&](const ComparisonRow& row, const char* label) {
    std::snprintf(cell, sizeof cell, "%s%zu", label, row.prediction_length);
    out += cell;
    for (std::size_t i = 0; i < row.mse.size(); ++i) {
      std::snprintf(cell, sizeof cell, "  %.6f  %+.6f  %+.1f%%", row.mse[i], row.mse_delta[i],
                    100.0 * row.mse_relative_reduction[i]);
      out += cell;
    }
    out += "\n";
  };
  for (const auto& row : table.rows) emit(row, "");
  emit(table.cumulative, "all:");
  return out;
}

std::string curve_csv(const EvalReport& report) {
  std::string out = "prediction_length,mse,mae,block_violation_rate\n";
  double mse_sum = 0.0, mae_sum = 0.0, viol_sum = 0.0;
  char line[128];
  for (std::size_t k = 0; k < report.per_block.size(); ++k) {
    mse_sum += report.per_block[k].mse;
    mae_sum += report.per_block[k].mae;
    if (k > 0) viol_sum += report.pair_violation_rates[k - 1];
    const double blocks = static_cast<double>(k + 1);
    const double viol = k > 0 ? viol_sum / static_cast<double>(k) : 0.0;
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", (k + 1) * report.block_length, mse_sum / blocks,
                  mae_sum / blocks, viol);
    out += line;
  }
  return out;
}

void export_curve(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << curve_csv(report);
  if (!out) throw IoError("failed writing curve '" + path.string() + "'");
}

}  // namespace arollout
