// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

// INI-style run configuration:
//
//   [dataset]  source = sinusoid | ar | csv, plus generator / CSV settings
//   [model]    kind, context_length, block_length, overlap, hidden
//   [rollout]  steps, gamma, beta
//   [train]    objective, lr, adam_beta1, adam_beta2, adam_eps, batch_size,
//              max_epochs, patience, seed
//   [output]   directory
//
// Every key is optional; missing keys take the defaults below.

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arollout/dataset.hpp"
#include "arollout/forecaster.hpp"
#include "arollout/rollout_loss.hpp"
#include "arollout/trainer.hpp"

namespace arollout::cli {

// Invalid or unreadable configuration; always names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataSource { kSinusoid, kAr, kCsv };

struct DatasetSection {
  DataSource source = DataSource::kSinusoid;
  std::size_t length = 2000;
  std::size_t variates = 1;
  std::vector<double> periods{24.0};
  double amplitude = 1.0;
  double noise_std = 0.1;
  std::vector<double> coeffs{0.9};
  std::uint64_t seed = 1;
  std::filesystem::path path;
  bool has_header = true;
  std::string time_column;
  SplitRatios ratios;
};

struct ModelSection {
  ModelKind kind = ModelKind::kLinear;
  std::size_t context_length = 48;
  std::size_t block_length = 12;
  std::size_t overlap = 0;
  std::size_t hidden = 16;
};

struct RunConfig {
  DatasetSection dataset;
  ModelSection model;
  std::size_t steps = 4;
  double gamma = kDefaultGamma;
  double beta = kDefaultBeta;
  TrainConfig train;
  std::filesystem::path output_dir = "arollout-run";

  RolloutConfig rollout() const;
  // Model dims for a dataset with V variates.
  ForecasterDims dims(std::size_t variates) const;
};

// Parses and validates; relative CSV paths resolve against the config file's
// directory. Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = ".");

// Fully-defaulted INI text; parse_run_config(resolved_config_text(c)) == c.
std::string resolved_config_text(const RunConfig& config);

SeriesDataset build_dataset(const RunConfig& config);

}  // namespace arollout::cli
