// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arollout/tensor.hpp"

namespace arollout {

enum class Split { kTrain, kVal, kTest };

std::string_view to_string(Split split);

// Half-open [begin, end) row range.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - begin; }
};

struct SplitRatios {
  double train = 0.7;
  double val = 0.1;  // test gets the remainder
};

// Full N x V series plus chronological split bounds.
class SeriesDataset {
 public:
  SeriesDataset(std::string name, std::size_t length, std::size_t variates, std::vector<double> values,
                std::vector<std::string> column_names = {}, SplitRatios ratios = {});

  const std::string& name() const { return name_; }
  std::size_t length() const { return length_; }
  std::size_t variates() const { return variates_; }
  double at(std::size_t t, std::size_t v) const { return values_[t * variates_ + v]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

  const IndexRange& range(Split split) const;
  // Rows [begin, end) as a (end - begin) x V tensor.
  Tensor rows(std::size_t begin, std::size_t end) const;

 private:
  std::string name_;
  std::size_t length_;
  std::size_t variates_;
  std::vector<double> values_;
  std::vector<std::string> column_names_;
  IndexRange train_, val_, test_;
};

// x[t, v] = amplitude * sin(2 pi t / periods[v]) + N(0, noise_std^2).
// `periods` is cycled when shorter than V.
SeriesDataset gen_sinusoid(std::size_t length, std::size_t variates, const std::vector<double>& periods,
                           double amplitude, double noise_std, std::uint64_t seed, SplitRatios ratios = {});

// AR(p) driven by Gaussian noise, zero initial state, first 10p samples
// discarded. Throws InvalidInput when the companion matrix has spectral
// radius >= 1.
SeriesDataset gen_ar_process(std::size_t length, std::size_t variates, const std::vector<double>& coeffs,
                             double noise_std, std::uint64_t seed, SplitRatios ratios = {});

// Spectral radius of the AR companion matrix.
double ar_spectral_radius(const std::vector<double>& coeffs);

struct CsvOptions {
  bool has_header = true;
  std::optional<std::string> time_column;
  SplitRatios ratios = {};
};

// Comma-separated numeric table; non-time columns become variates in file
// order. Throws InvalidInput naming row/column on parse failures and ragged
// rows, IoError when the file cannot be read.
SeriesDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

struct SeriesWindow {
  Tensor context;  // S x V
  Tensor future;   // horizon x V
  std::size_t origin_index = 0;  // absolute row of the first context entry
};

struct WindowSet {
  std::vector<SeriesWindow> windows;
  // Set when the split is too short to hold a single window.
  std::optional<std::string> warning;
};

// floor((split_len - S - horizon) / stride) + 1, or 0 when it does not fit.
std::size_t window_count(std::size_t split_len, std::size_t context, std::size_t horizon, std::size_t stride);

// Every window lying entirely inside `split`, advancing by `stride`.
WindowSet window_iter(const SeriesDataset& ds, Split split, std::size_t context, std::size_t horizon,
                      std::size_t stride = 1);

}  // namespace arollout
