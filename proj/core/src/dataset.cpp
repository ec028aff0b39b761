// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/dataset.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "arollout/error.hpp"
#include "arollout/random.hpp"

namespace arollout {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

SeriesDataset::SeriesDataset(std::string name, std::size_t length, std::size_t variates, std::vector<double> values,
                             std::vector<std::string> column_names, SplitRatios ratios)
    : name_(std::move(name)),
      length_(length),
      variates_(variates),
      values_(std::move(values)),
      column_names_(std::move(column_names)) {
  if (length_ == 0 || variates_ == 0) throw InvalidInput("dataset must have at least one row and one variate");
  if (values_.size() != length_ * variates_) throw InvalidInput("dataset value count does not match N x V");
  if (!(ratios.train > 0.0) || ratios.val < 0.0 || ratios.train + ratios.val > 1.0) {
    throw InvalidInput("split ratios must satisfy train > 0, val >= 0, train + val <= 1");
  }
  if (column_names_.empty()) {
    for (std::size_t v = 0; v < variates_; ++v) column_names_.push_back("v" + std::to_string(v));
  }
  if (column_names_.size() != variates_) throw InvalidInput("column name count does not match V");

  const auto n = static_cast<double>(length_);
  // The tolerance keeps 0.7 + 0.1 from flooring one row short.
  const auto train_end = static_cast<std::size_t>(std::floor(n * ratios.train + 1e-9));
  const auto val_end = std::min(length_, static_cast<std::size_t>(std::floor(n * (ratios.train + ratios.val) + 1e-9)));
  train_ = {0, train_end};
  val_ = {train_end, val_end};
  test_ = {val_end, length_};
}

const IndexRange& SeriesDataset::range(Split split) const {
  switch (split) {
    case Split::kTrain: return train_;
    case Split::kVal: return val_;
    case Split::kTest: return test_;
  }
  throw InvalidInput("unknown split");
}

Tensor SeriesDataset::rows(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > length_) throw InvalidInput("row range out of bounds");
  return Tensor({end - begin, variates_},
                std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(begin * variates_),
                                    values_.begin() + static_cast<std::ptrdiff_t>(end * variates_)));
}

SeriesDataset gen_sinusoid(std::size_t length, std::size_t variates, const std::vector<double>& periods,
                           double amplitude, double noise_std, std::uint64_t seed, SplitRatios ratios) {
  if (length == 0) throw InvalidInput("gen_sinusoid: length must be positive");
  if (periods.empty()) throw InvalidInput("gen_sinusoid: at least one period required");
  for (double p : periods) {
    if (!(p > 0.0)) throw InvalidInput("gen_sinusoid: periods must be positive");
  }
  if (noise_std < 0.0) throw InvalidInput("gen_sinusoid: noise_std must be >= 0");
  Xoshiro256 rng(seed);
  std::vector<double> values(length * variates);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t v = 0; v < variates; ++v) {
      const double period = periods[v % periods.size()];
      const double clean = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
      values[t * variates + v] = clean + (noise_std > 0.0 ? noise_std * rng.normal() : 0.0);
    }
  }
  return SeriesDataset("sinusoid", length, variates, std::move(values), {}, ratios);
}

double ar_spectral_radius(const std::vector<double>& coeffs) {
  const auto p = static_cast<Eigen::Index>(coeffs.size());
  if (p == 0) return 0.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) companion(0, i) = coeffs[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

SeriesDataset gen_ar_process(std::size_t length, std::size_t variates, const std::vector<double>& coeffs,
                             double noise_std, std::uint64_t seed, SplitRatios ratios) {
  if (length == 0) throw InvalidInput("gen_ar_process: length must be positive");
  if (coeffs.empty()) throw InvalidInput("gen_ar_process: at least one coefficient required");
  if (noise_std < 0.0) throw InvalidInput("gen_ar_process: noise_std must be >= 0");
  const double radius = ar_spectral_radius(coeffs);
  if (!(radius < 1.0)) {
    throw InvalidInput("gen_ar_process: coefficients are not stationary (companion spectral radius " +
                       std::to_string(radius) + " >= 1)");
  }
  const std::size_t p = coeffs.size();
  const std::size_t burn_in = 10 * p;
  Xoshiro256 rng(seed);
  std::vector<double> values(length * variates);
  for (std::size_t v = 0; v < variates; ++v) {
    std::vector<double> history(p, 0.0);  // history[i] = x_{t-1-i}
    for (std::size_t t = 0; t < burn_in + length; ++t) {
      double x = noise_std * rng.normal();
      for (std::size_t i = 0; i < p; ++i) x += coeffs[i] * history[i];
      for (std::size_t i = p - 1; i > 0; --i) history[i] = history[i - 1];
      history[0] = x;
      if (t >= burn_in) values[(t - burn_in) * variates + v] = x;
    }
  }
  return SeriesDataset("ar" + std::to_string(p), length, variates, std::move(values), {}, ratios);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

SeriesDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file '" + path.string() + "'");

  std::vector<std::string> header;
  std::optional<std::size_t> time_index;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  bool first_line = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (first_line && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    for (auto& f : fields) f = trim(f);

    if (first_line) {
      first_line = false;
      width = fields.size();
      if (options.has_header) {
        header = fields;
        if (options.time_column) {
          for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == *options.time_column) time_index = i;
          }
          if (!time_index) throw InvalidInput("time column '" + *options.time_column + "' not found in header");
        }
        continue;
      }
      if (options.time_column) throw InvalidInput("a time column name requires a header row");
    }

    if (fields.size() != width) {
      throw InvalidInput("row " + std::to_string(line_no) + ": expected " + std::to_string(width) + " columns, got " +
                         std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (time_index && c == *time_index) continue;
      const std::string& cell = fields[c];
      double value = 0.0;
      const char* begin = cell.data();
      const char* end = cell.data() + cell.size();
      if (!cell.empty() && *begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw InvalidInput("row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                           ": cannot parse '" + cell + "' as a finite number");
      }
      values.push_back(value);
    }
    ++rows;
  }
  if (rows == 0) throw InvalidInput("CSV file '" + path.string() + "' has no data rows");

  const std::size_t variates = width - (time_index ? 1 : 0);
  if (variates == 0) throw InvalidInput("CSV file has no value columns");
  std::vector<std::string> names;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!time_index || c != *time_index) names.push_back(header[c]);
    }
  }
  return SeriesDataset(path.stem().string(), rows, variates, std::move(values), std::move(names), options.ratios);
}

std::size_t window_count(std::size_t split_len, std::size_t context, std::size_t horizon, std::size_t stride) {
  if (stride == 0) throw InvalidInput("window stride must be >= 1");
  if (split_len < context + horizon) return 0;
  return (split_len - context - horizon) / stride + 1;
}

WindowSet window_iter(const SeriesDataset& ds, Split split, std::size_t context, std::size_t horizon,
                      std::size_t stride) {
  if (context == 0 || horizon == 0) throw InvalidInput("window context and horizon must be >= 1");
  const IndexRange& range = ds.range(split);
  WindowSet set;
  const std::size_t count = window_count(range.length(), context, horizon, stride);
  if (count == 0) {
    set.warning = std::string(to_string(split)) + " split has " + std::to_string(range.length()) +
                  " rows, fewer than context + horizon = " + std::to_string(context + horizon);
    return set;
  }
  set.windows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t origin = range.begin + i * stride;
    set.windows.push_back(
        {ds.rows(origin, origin + context), ds.rows(origin + context, origin + context + horizon), origin});
  }
  return set;
}

}  // namespace arollout
