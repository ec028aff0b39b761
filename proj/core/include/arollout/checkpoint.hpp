// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

// Binary checkpoint layout (all integers and doubles little-endian):
//
//   "ARPT"                  4 bytes magic
//   version                 u32
//   header_length           u32
//   header                  header_length bytes of "key=value\n" text
//   parameter_count         u64
//   parameters              parameter_count IEEE-754 doubles

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>

#include "arollout/forecaster.hpp"
#include "arollout/rollout_loss.hpp"

namespace arollout {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::string_view kNormPolicy = "per_window_zscore";

struct Checkpoint {
  Forecaster model;
  RolloutConfig rollout;
  Objective objective = Objective::kAr;
  std::string norm_policy = std::string(kNormPolicy);
  std::size_t epoch = 0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

std::string serialize_checkpoint(const Checkpoint& ck);
// Throws FormatError (bad magic, truncation, inconsistent header) or
// VersionError (written by a newer revision).
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace arollout
