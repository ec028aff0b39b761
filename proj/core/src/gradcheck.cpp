// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "arollout/error.hpp"

namespace arollout {

std::vector<double> finite_diff_oracle(const std::function<double(std::span<const double>)>& eval,
                                       std::span<const double> params, double h) {
  if (!(h > 0.0)) throw InvalidInput("finite_diff_oracle: step must be positive");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double up = eval(p);
    p[i] = saved - h;
    const double down = eval(p);
    p[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("relative_error: length mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - b[i]) * (a[i] - b[i]);
  const double denom = std::max(l2_norm(a), l2_norm(b));
  if (denom == 0.0) return 0.0;
  return std::sqrt(diff) / denom;
}

std::string format_report(const GradCheckReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "step_size       %.3g\n", report.step_size);
  out += line;
  for (const auto& [name, err] : report.per_param_errors) {
    std::snprintf(line, sizeof line, "  %-14s rel_err %.3e\n", name.c_str(), err);
    out += line;
  }
  std::snprintf(line, sizeof line, "max_rel_error   %.3e\n", report.max_rel_error);
  out += line;
  std::snprintf(line, sizeof line, "d_hat           %.6g\n", report.d_hat);
  out += line;
  std::snprintf(line, sizeof line, "bound_ratio     %.6f\n", report.worst_bound_ratio);
  out += line;
  out += std::string("norm_bound_ok   ") + (report.norm_bound_ok ? "true" : "false") + "\n";
  if (report.kink_crossed) out += "kink_crossed    true\n";
  return out;
}

}  // namespace arollout
