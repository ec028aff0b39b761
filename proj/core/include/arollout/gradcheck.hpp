// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace arollout {

// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h for every coordinate.
// Independent of the tape: only forward evaluations of `eval` are used.
std::vector<double> finite_diff_oracle(const std::function<double(std::span<const double>)>& eval,
                                       std::span<const double> params, double h);

// ||a - b|| / max(||a||, ||b||), and 0 when both are exactly zero.
double relative_error(std::span<const double> a, std::span<const double> b);

double l2_norm(std::span<const double> v);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<std::pair<std::string, double>> per_param_errors;
  double step_size = 0.0;
  bool norm_bound_ok = true;
  // Some difference step flipped the sign of a relu/abs argument; the
  // comparison is then meaningless and the caller should resample.
  bool kink_crossed = false;
  // Largest block-error gradient norm seen; empirical stand-in for the
  // bound constant on ||grad e_k||.
  double d_hat = 0.0;
  // Worst ratio ||grad loss|| / sum_k gamma^(k-1) ||grad e_k|| over checked
  // windows (<= 1 when the bound holds).
  double worst_bound_ratio = 0.0;
};

std::string format_report(const GradCheckReport& report);

}  // namespace arollout
