// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "arollout/checkpoint.hpp"
#include "arollout/error.hpp"
#include "arollout/evaluator.hpp"
#include "arollout/normalization.hpp"
#include "arollout/rollout_gradcheck.hpp"
#include "arollout/trainer.hpp"
#include "run_config.hpp"

namespace arollout::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kGradcheckTolerance = 1e-5;
constexpr double kGradcheckStep = 1e-4;
constexpr std::size_t kGradcheckWindows = 4;

// Maps the exception taxonomy onto exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

fs::path prepare_out_dir(const fs::path& dir) {
  fs::create_directories(dir);
  return dir;
}

Checkpoint read_checkpoint(const fs::path& path) {
  if (!fs::exists(path)) throw InvalidInput("checkpoint '" + path.string() + "' does not exist");
  return load_checkpoint(path);
}

std::optional<OpKind> parse_op(const std::string& name) {
  for (OpKind op : {OpKind::kAdd, OpKind::kSub, OpKind::kMul, OpKind::kMatMul, OpKind::kRelu, OpKind::kAbs,
                    OpKind::kMean, OpKind::kSum, OpKind::kScale, OpKind::kTranspose, OpKind::kConcat,
                    OpKind::kSlice, OpKind::kSoftmax, OpKind::kLayerNorm}) {
    if (op_name(op) == name) return op;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> horizon_problem(std::size_t horizon, std::size_t block) {
  if (horizon == 0) return "horizon must be a positive multiple of the block length " + std::to_string(block);
  if (horizon % block == 0) return std::nullopt;
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%g", static_cast<double>(horizon) / static_cast<double>(block));
  const std::size_t lower = horizon / block, upper = lower + 1;
  std::string msg = "horizon " + std::to_string(horizon) + " is not a multiple of the block length " +
                    std::to_string(block) + " (" + std::to_string(horizon) + " / " + std::to_string(block) + " = " +
                    ratio + "); a rollout produces whole blocks of " + std::to_string(block) + " steps, use H = k x " +
                    std::to_string(block) + ", e.g. " + std::to_string(upper * block) + " (" +
                    std::to_string(upper) + " steps)";
  if (lower > 0) msg += " or " + std::to_string(lower * block) + " (" + std::to_string(lower) + " steps)";
  return msg;
}

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig config = load_run_config(opts.config);
    if (opts.seed) config.train.seed = *opts.seed;
    if (opts.out) config.output_dir = *opts.out;

    const SeriesDataset ds = build_dataset(config);
    const RolloutConfig rollout = config.rollout();
    const Forecaster model = init_forecaster(config.model.kind, config.dims(ds.variates()), config.train.seed);
    TrainResult result = train(model, ds, rollout, config.train);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";

    const fs::path dir = prepare_out_dir(config.output_dir);
    save_checkpoint(result.best, dir / "checkpoint.arpt");
    write_file(dir / "history.csv", history_csv(result.history));
    write_file(dir / "resolved_config.ini", resolved_config_text(config));

    char line[160];
    std::snprintf(line, sizeof line, "trained %s (%zu params) for %zu epochs; best epoch %zu, val loss %.6g\n",
                  std::string(to_string(model.kind())).c_str(), model.parameter_count(), result.history.size(),
                  result.best.epoch, result.best.val_loss);
    out << line << "wrote " << (dir / "checkpoint.arpt").string() << "\n";
    return kExitOk;
  });
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_run_config(opts.config);
    const Checkpoint ck = read_checkpoint(opts.checkpoint);
    if (auto problem = horizon_problem(opts.horizon, ck.rollout.block)) throw InvalidInput(*problem);

    const SeriesDataset ds = build_dataset(config);
    if (ds.variates() != ck.model.dims().variates) {
      throw InvalidInput("dataset has " + std::to_string(ds.variates()) + " variates, checkpoint expects " +
                         std::to_string(ck.model.dims().variates));
    }
    RolloutConfig rollout = ck.rollout;
    rollout.steps = opts.horizon / rollout.block;
    const EvalReport report =
        evaluate(ck.model, ds, Split::kTest, rollout, opts.raw_scale ? ReportScale::kRaw : ReportScale::kNormalized);

    const fs::path dir = prepare_out_dir(opts.out.value_or(config.output_dir));
    write_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
    export_curve(report, dir / "curve.csv");

    char line[160];
    std::snprintf(line, sizeof line, "evaluated %zu windows, n=%zu: mse %.6g mae %.6g block violations %.3f\n",
                  report.window_count, report.steps, report.cumulative.mse, report.cumulative.mae,
                  report.block_violation_rate);
    out << line;
    return kExitOk;
  });
}

int cmd_predict(const PredictOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Checkpoint ck = read_checkpoint(opts.checkpoint);
    if (auto problem = horizon_problem(opts.horizon, ck.rollout.block)) throw InvalidInput(*problem);
    if (!fs::exists(opts.input)) throw InvalidInput("input '" + opts.input.string() + "' does not exist");

    CsvOptions csv;
    csv.time_column = opts.time_column;
    const SeriesDataset input = load_csv(opts.input, csv);
    const std::size_t s = ck.rollout.context;
    if (input.length() < s) {
      throw InvalidInput("input has " + std::to_string(input.length()) + " rows, the model needs at least S = " +
                         std::to_string(s));
    }
    if (input.variates() != ck.model.dims().variates) {
      throw InvalidInput("input has " + std::to_string(input.variates()) + " value columns, checkpoint expects " +
                         std::to_string(ck.model.dims().variates));
    }

    RolloutConfig rollout = ck.rollout;
    rollout.steps = opts.horizon / rollout.block;
    const Tensor context = input.rows(input.length() - s, input.length());
    const NormState state = compute_norm(context);
    const Tensor pred = invert_norm(rollout_predict(ck.model, apply_norm(context, state), rollout).values, state);

    std::string csv_text;
    for (std::size_t v = 0; v < input.variates(); ++v) csv_text += (v ? "," : "") + input.column_names()[v];
    csv_text += "\n";
    char cell[40];
    for (std::size_t r = 0; r < pred.rows(); ++r) {
      for (std::size_t v = 0; v < pred.cols(); ++v) {
        std::snprintf(cell, sizeof cell, "%s%.17g", v ? "," : "", pred.at(r, v));
        csv_text += cell;
      }
      csv_text += "\n";
    }
    const fs::path dir = prepare_out_dir(opts.out.value_or(fs::path(".")));
    write_file(dir / "forecast.csv", csv_text);
    out << "wrote " << pred.rows() << " forecast rows to " << (dir / "forecast.csv").string() << "\n";
    return kExitOk;
  });
}

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig config = load_run_config(opts.config);
    if (opts.seed) config.train.seed = *opts.seed;
    GradCheckOptions check;
    check.step = kGradcheckStep;
    if (!opts.inject_fault.empty()) {
      auto op = parse_op(opts.inject_fault);
      if (!op) throw InvalidInput("unknown op '" + opts.inject_fault + "' for fault injection");
      check.fault = GradientFault{*op, 1.01};
    }

    const SeriesDataset ds = build_dataset(config);
    const RolloutConfig rollout = config.rollout();
    const ForecasterDims dims = config.dims(ds.variates());
    const std::size_t count = parameter_count(config.model.kind, dims);
    if (count > kGradcheckMaxParams) {
      throw InvalidInput("model has " + std::to_string(count) + " parameters; gradcheck is limited to " +
                         std::to_string(kGradcheckMaxParams));
    }
    const Forecaster model = init_forecaster(config.model.kind, dims, config.train.seed);
    const std::vector<SeriesWindow> windows = prepare_windows(ds, Split::kTrain, rollout);
    if (windows.empty()) throw InvalidInput("train split holds no window of extent S + n*T");

    // Use the first group of windows whose relu/abs arguments stay on one
    // side of their kinks for every difference step.
    std::optional<GradCheckReport> found;
    std::size_t skipped = 0;
    for (std::size_t start = 0; start < windows.size() && !found; start += kGradcheckWindows) {
      std::span<const SeriesWindow> group(windows.data() + start, std::min(kGradcheckWindows, windows.size() - start));
      if (objective_gradient(model, group, rollout).kink_margin <= 10.0 * check.step) {
        ++skipped;
        continue;
      }
      GradCheckReport report = check_ar_gradients(model, group, rollout, check);
      if (report.kink_crossed) {
        ++skipped;
        continue;
      }
      found = std::move(report);
    }
    if (!found) throw std::runtime_error("every candidate window group lies near a relu/abs kink");
    if (skipped > 0) out << "skipped " << skipped << " window group(s) near a relu/abs kink\n";

    const GradCheckReport& report = *found;
    out << format_report(report);
    const bool ok = report.max_rel_error < kGradcheckTolerance && report.norm_bound_ok;
    out << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitRuntime;
  });
}

}  // namespace arollout::cli
