// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

// Rollout evaluation on held-out windows: per-block and whole-horizon
// MSE/MAE, how often the error shrinks from one block (or timestep) to the
// next, and curve export for error-accumulation plots.

#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "arollout/dataset.hpp"
#include "arollout/forecaster.hpp"
#include "arollout/rollout_loss.hpp"

namespace arollout {

enum class ReportScale { kNormalized, kRaw };

struct BlockMetrics {
  double mse = 0.0;
  double mae = 0.0;
};

struct EvalReport {
  std::size_t block_length = 0;  // T
  std::size_t steps = 0;         // n
  ReportScale scale = ReportScale::kNormalized;
  std::vector<BlockMetrics> per_block;  // k = 1..n
  BlockMetrics cumulative;              // over the full n*T horizon
  // Fraction of windows with e_{k+1} < e_k, for each adjacent pair k.
  std::vector<double> pair_violation_rates;
  double block_violation_rate = 0.0;
  // Fraction of (window, variate, t) with |x_t - x^_t| < |x_{t-1} - x^_{t-1}|.
  double step_violation_rate = 0.0;
  std::size_t window_count = 0;
};

// Rolls the model out over every window of `split` (no future values are
// fed to the model) and averages metrics over windows and variates. Throws
// InvalidInput when the split holds no window.
EvalReport evaluate(const Forecaster& model, const SeriesDataset& ds, Split split, const RolloutConfig& cfg,
                    ReportScale scale = ReportScale::kNormalized);

// Same, on already-extracted raw windows.
EvalReport evaluate_windows(const Forecaster& model, std::span<const SeriesWindow> windows, const RolloutConfig& cfg,
                            ReportScale scale = ReportScale::kNormalized);

nlohmann::json report_to_json(const EvalReport& report);

// (baseline - candidate) / baseline.
double relative_reduction(double baseline, double candidate);

struct ComparisonRow {
  std::size_t prediction_length = 0;  // k*T
  std::vector<double> mse;            // one per report
  std::vector<double> mae;
  std::vector<double> mse_delta;              // report - first report
  std::vector<double> mse_relative_reduction;  // vs first report
};

struct ComparisonTable {
  std::vector<std::string> names;
  std::vector<ComparisonRow> rows;  // one per block
  ComparisonRow cumulative;         // prediction_length = n*T
};

struct NamedReport {
  std::string name;
  EvalReport report;
};

// The first report is the baseline. Throws InvalidInput on an empty list or
// when block length / step count differ.
ComparisonTable compare(std::span<const NamedReport> reports);

std::string format_comparison(const ComparisonTable& table);

// CSV "prediction_length,mse,mae,block_violation_rate" with one row per k.
// Row k holds metrics averaged over the first k blocks, i.e. the error of a
// forecast of length k*T.
std::string curve_csv(const EvalReport& report);
void export_curve(const EvalReport& report, const std::filesystem::path& path);

}  // namespace arollout
