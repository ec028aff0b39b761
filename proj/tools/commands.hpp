// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace arollout::cli {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitInvalid = 2 };

// Oracle tractability limit for gradcheck.
inline constexpr std::size_t kGradcheckMaxParams = 5000;

struct TrainOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

struct EvalOptions {
  std::filesystem::path config;
  std::filesystem::path checkpoint;
  std::size_t horizon = 0;
  std::optional<std::filesystem::path> out;
  bool raw_scale = false;
};

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path input;
  std::size_t horizon = 0;
  std::optional<std::filesystem::path> out;
  std::optional<std::string> time_column;
};

struct GradcheckOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  // Name of an op whose backward rule is deliberately scaled (negative
  // control); empty for a normal run.
  std::string inject_fault;
};

// Writes checkpoint.arpt, history.csv and resolved_config.ini.
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);
// Writes report.json and curve.csv for the test split.
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);
// Writes forecast.csv.
int cmd_predict(const PredictOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err);

// Message for a horizon that is not a positive multiple of the block length,
// or nullopt when it is valid.
std::optional<std::string> horizon_problem(std::size_t horizon, std::size_t block);

}  // namespace arollout::cli
