// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "arollout/checkpoint.hpp"
#include "arollout/dataset.hpp"
#include "arollout/evaluator.hpp"
#include "arollout/forecaster.hpp"
#include "arollout/random.hpp"
#include "arollout/rollout_gradcheck.hpp"
#include "arollout/rollout_loss.hpp"
#include "arollout/trainer.hpp"
#include "commands.hpp"

namespace arollout {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
const T& pick(Xoshiro256& rng, const std::vector<T>& xs) {
  return xs[rng.below(xs.size())];
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness

Outcome gradient_correctness() {
  const auto start = Clock::now();
  const double h = 1e-4;
  const std::vector<ModelKind> kinds{ModelKind::kLinear, ModelKind::kMlp, ModelKind::kInvertedAttention};
  const std::vector<std::size_t> steps{1, 2, 4};
  const std::vector<double> betas{0.05, 0.1, 0.3};
  const std::vector<double> gammas{0.3, 0.5, 0.9};

  Xoshiro256 rng(20260101);
  std::size_t configs = 0, failures = 0, resamples = 0;
  double worst = 0.0;
  std::string first_failure;
  // Every (kind, n, beta, gamma) combination: 81 configurations.
  for (ModelKind kind : kinds) {
    for (std::size_t n : steps) {
      for (double beta : betas) {
        for (double gamma : gammas) {
          bool done = false;
          for (int attempt = 0; attempt < 50 && !done; ++attempt) {
            const std::size_t s = 4 + rng.below(5), t = 1 + rng.below(3), v = 1 + rng.below(3);
            const std::size_t l = rng.below(2) * std::min<std::size_t>(s, 2);
            const RolloutConfig cfg{s, t, l, n, gamma, beta};
            const ForecasterDims dims{s, l, t, v, 8 + rng.below(5)};
            const Forecaster model = init_forecaster(kind, dims, rng());
            const SeriesDataset ds = gen_sinusoid(240, v, {17, 9}, 1.0, 0.3, rng());
            const std::vector<SeriesWindow> all = prepare_windows(ds, Split::kTrain, cfg);
            std::vector<SeriesWindow> batch{all[rng.below(all.size())], all[rng.below(all.size())]};

            if (objective_gradient(model, batch, cfg).kink_margin <= 10.0 * h) {
              ++resamples;
              continue;
            }
            const GradCheckReport report = check_ar_gradients(model, batch, cfg, {h, std::nullopt});
            if (report.kink_crossed) {
              ++resamples;
              continue;
            }
            done = true;
            ++configs;
            worst = std::max(worst, report.max_rel_error);
            if (!(report.max_rel_error < 1e-5)) {
              ++failures;
              if (first_failure.empty()) {
                first_failure = fmt(" first failure: %s S=%zu T=%zu L=%zu V=%zu n=%zu err=%.3e",
                                    std::string(to_string(kind)).c_str(), s, t, l, v, n, report.max_rel_error);
              }
            }
          }
          if (!done) ++failures;
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = configs >= 50 && failures == 0 && elapsed < 120.0;
  o.detail = fmt("%zu configs, max rel error %.2e, %zu resampled near a kink, %.1f s", configs, worst, resamples,
                 elapsed) + first_failure;
  return o;
}

// ---------------------------------------------------------------------------
// 2. n = 1 equivalence

Outcome single_step_equivalence() {
  Outcome o;
  double value_gap = 0.0, grad_gap = 0.0;

  // Linear model against a hand-written MSE and its closed-form gradient.
  {
    const std::size_t s = 6, t = 3, v = 2;
    const RolloutConfig cfg{s, t, 0, 1};
    const Forecaster model = init_forecaster(ModelKind::kLinear, {s, 0, t, v, 0}, 11);
    const SeriesDataset ds = gen_sinusoid(200, v, {13}, 1.0, 0.2, 12);
    const std::vector<double> w = model.flat_parameters();
    for (const SeriesWindow& win : prepare_windows(ds, Split::kTrain, cfg)) {
      std::vector<double> resid(t * v);
      double mse = 0.0;
      for (std::size_t r = 0; r < t; ++r) {
        for (std::size_t c = 0; c < v; ++c) {
          double pred = w[t * s + r];
          for (std::size_t j = 0; j < s; ++j) pred += w[r * s + j] * win.context.at(j, c);
          resid[r * v + c] = pred - win.future.at(r, c);
          mse += resid[r * v + c] * resid[r * v + c] / static_cast<double>(t * v);
        }
      }
      std::vector<double> grad(w.size(), 0.0);
      for (std::size_t r = 0; r < t; ++r) {
        for (std::size_t c = 0; c < v; ++c) {
          const double g = 2.0 * resid[r * v + c] / static_cast<double>(t * v);
          for (std::size_t j = 0; j < s; ++j) grad[r * s + j] += g * win.context.at(j, c);
          grad[t * s + r] += g;
        }
      }
      const std::vector<SeriesWindow> one{win};
      const ObjectiveGradient ar = objective_gradient(model, one, cfg, Objective::kAr);
      value_gap = std::max(value_gap, std::abs(ar.value - mse));
      for (std::size_t i = 0; i < grad.size(); ++i) grad_gap = std::max(grad_gap, std::abs(ar.grad[i] - grad[i]));
    }
  }

  // Every kind against the first-block MSE path.
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kMlp, ModelKind::kInvertedAttention}) {
    const RolloutConfig cfg{8, 4, 2, 1};
    const Forecaster model = init_forecaster(kind, {8, 2, 4, 2, 5}, 3);
    const SeriesDataset ds = gen_sinusoid(160, 2, {11, 5}, 1.0, 0.2, 4);
    const std::vector<SeriesWindow> windows = prepare_windows(ds, Split::kTrain, cfg);
    const ObjectiveGradient ar = objective_gradient(model, windows, cfg, Objective::kAr);
    const ObjectiveGradient mse = objective_gradient(model, windows, cfg, Objective::kMse);
    value_gap = std::max(value_gap, std::abs(ar.value - mse.value));
    for (std::size_t i = 0; i < ar.grad.size(); ++i) grad_gap = std::max(grad_gap, std::abs(ar.grad[i] - mse.grad[i]));
  }

  // Seeded training trajectories.
  bool identical = true;
  {
    const RolloutConfig cfg{16, 4, 0, 1};
    const SeriesDataset ds = gen_sinusoid(600, 2, {24, 10}, 1.0, 0.2, 8);
    const Forecaster model = init_forecaster(ModelKind::kMlp, {16, 0, 4, 2, 8}, 5);
    TrainConfig tc;
    tc.max_epochs = 6;
    tc.seed = 5;
    tc.objective = Objective::kAr;
    const TrainResult ar = train(model, ds, cfg, tc);
    tc.objective = Objective::kMse;
    const TrainResult mse = train(model, ds, cfg, tc);
    identical = ar.history.size() == mse.history.size() &&
                ar.best.model.flat_parameters() == mse.best.model.flat_parameters() &&
                ar.initial_val_loss == mse.initial_val_loss;
    for (std::size_t i = 0; identical && i < ar.history.size(); ++i) {
      identical = ar.history[i].train_loss == mse.history[i].train_loss &&
                  ar.history[i].val_loss == mse.history[i].val_loss;
    }
  }

  o.pass = value_gap <= 1e-12 && grad_gap <= 1e-12 && identical;
  o.detail = fmt("value gap %.1e, gradient gap %.1e, trajectories %s", value_gap, grad_gap,
                 identical ? "bit-identical" : "differ");
  return o;
}

// ---------------------------------------------------------------------------
// 3. Stop-gradient coefficients

// Predicted blocks as tape leaves: d loss / d p2 = c * d e2 / d p2.
double leaf_coefficient(double delta1, double delta2, double gamma, double beta) {
  const std::size_t t = 3, v = 2;
  Xoshiro256 rng(31);
  std::vector<double> y1(t * v), y2(t * v), p1(t * v), p2(t * v);
  for (std::size_t i = 0; i < t * v; ++i) {
    y1[i] = rng.normal();
    y2[i] = y1[i];
    p1[i] = y1[i] + delta1;
    p2[i] = y2[i] + delta2;
  }
  Tape tape;
  Tensor b1 = tape.leaf({t, v}, p1), b2 = tape.leaf({t, v}, p2);
  std::vector<Tensor> errors{block_error(b1, Tensor::matrix(t, v, y1)), block_error(b2, Tensor::matrix(t, v, y2))};
  Tensor loss = discounted_objective(errors, gamma, beta);
  const Tensor g = tape.backward(loss).of(b2);
  const Tensor d = tape.backward(errors[1]).of(b2);
  return dot(g.values(), d.values()) / dot(d.values(), d.values());
}

struct ModelCoefficient {
  double coefficient = 0.0;
  double residual = 0.0;  // || grad loss - grad e1 - c grad e2 || / || grad loss ||
};

// A two-step linear rollout whose block-1 targets are placed relative to the
// model's own block-1 prediction so that e1 lands below or above e2.
ModelCoefficient model_coefficient(double offset1, double gamma, double beta) {
  const std::size_t s = 6, t = 2, v = 2;
  const RolloutConfig cfg{s, t, 0, 2, gamma, beta};
  const Forecaster model = init_forecaster(ModelKind::kLinear, {s, 0, t, v, 0}, 17);
  Xoshiro256 rng(18);
  std::vector<double> ctx(s * v);
  for (double& x : ctx) x = rng.normal();
  SeriesWindow w{Tensor::matrix(s, v, ctx), Tensor::zeros({2 * t, v}), 0};
  const RolloutPrediction pred = rollout_predict(model, w.context, cfg);
  std::vector<double> future(2 * t * v);
  for (std::size_t i = 0; i < t * v; ++i) {
    future[i] = pred.blocks[0][i] + offset1;
    future[t * v + i] = pred.blocks[1][i] + 0.5;
  }
  w.future = Tensor::matrix(2 * t, v, future);

  Tape tape;
  const BoundForecaster bound = bind(model, &tape);
  const BlockErrors be = ar_loss(bound, w, cfg);
  const std::vector<double> gl = flat_gradient(tape.backward(be.loss), bound);
  const std::vector<double> g1 = flat_gradient(tape.backward(be.e[0]), bound);
  const std::vector<double> g2 = flat_gradient(tape.backward(be.e[1]), bound);
  std::vector<double> rest(gl.size());
  for (std::size_t i = 0; i < gl.size(); ++i) rest[i] = gl[i] - g1[i];
  ModelCoefficient out;
  out.coefficient = dot(rest, g2) / dot(g2, g2);
  std::vector<double> resid(gl.size());
  for (std::size_t i = 0; i < gl.size(); ++i) resid[i] = rest[i] - out.coefficient * g2[i];
  out.residual = l2_norm(resid) / l2_norm(gl);
  return out;
}

Outcome stop_gradient_coefficients() {
  const double gamma = 0.5, beta = 0.1;
  const double monotone = leaf_coefficient(0.1, 0.3, gamma, beta);
  const double tie = leaf_coefficient(0.2, 0.2, gamma, beta);
  const double violation = leaf_coefficient(0.3, 0.1, gamma, beta);
  const ModelCoefficient m_monotone = model_coefficient(0.1, gamma, beta);
  const ModelCoefficient m_violation = model_coefficient(1.0, gamma, beta);

  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-6; };
  Outcome o;
  o.pass = near(monotone, 0.5) && near(tie, 0.45) && near(violation, 0.4) && near(m_monotone.coefficient, 0.5) &&
           near(m_violation.coefficient, 0.4) && m_monotone.residual < 1e-9 && m_violation.residual < 1e-9;
  o.detail = fmt("leaf %.9f / %.9f / %.9f, model %.9f / %.9f", monotone, tie, violation, m_monotone.coefficient,
                 m_violation.coefficient);
  return o;
}

// ---------------------------------------------------------------------------
// 4. Norm bound

Outcome norm_bound() {
  Xoshiro256 rng(404);
  const std::vector<ModelKind> kinds{ModelKind::kLinear, ModelKind::kMlp, ModelKind::kInvertedAttention};
  const std::size_t draws = 120;
  std::size_t held = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const ModelKind kind = kinds[i % kinds.size()];
    const std::size_t s = 6 + rng.below(6), t = 1 + rng.below(4), v = 1 + rng.below(3), n = 1 + rng.below(5);
    const RolloutConfig cfg{s, t, 0, n, pick(rng, std::vector<double>{0.3, 0.5, 0.9}),
                            pick(rng, std::vector<double>{0.05, 0.1, 0.3})};
    const Forecaster model = init_forecaster(kind, {s, 0, t, v, 6}, rng());
    const SeriesDataset ds = gen_sinusoid(300, v, {21, 8}, 1.0, 0.3, rng());
    const std::vector<SeriesWindow> windows = prepare_windows(ds, Split::kTrain, cfg);
    const NormBoundSample sample = norm_bound_sample(model, windows[rng.below(windows.size())], cfg);
    held += norm_bound_holds(sample);
    worst_ratio = std::max(worst_ratio, sample.loss_grad_norm / sample.discounted_bound);
  }
  Outcome o;
  o.pass = held == draws;
  o.detail = fmt("%zu/%zu draws within both bounds, worst ratio to discounted bound %.4f", held, draws, worst_ratio);
  return o;
}

// ---------------------------------------------------------------------------
// 5. Magnitude factor

Outcome magnitude_factor() {
  Xoshiro256 rng(55);
  double worst = 0.0;
  for (double gamma : {0.3, 0.5, 0.9}) {
    for (std::size_t n = 1; n <= 12; ++n) {
      const double e = rng.uniform(0.01, 2.0);
      std::vector<Tensor> errors(n, Tensor::scalar(e));
      const double ratio = discounted_objective(errors, gamma, 0.0).item() / e;
      const RolloutConfig cfg{1, 1, 0, n, gamma, 0.1};
      worst = std::max(worst, std::abs(ratio - loss_magnitude_factor(cfg)));
      worst = std::max(worst, std::abs(ratio - (1.0 - std::pow(gamma, static_cast<double>(n))) / (1.0 - gamma)));
    }
  }
  const double at_40 = loss_magnitude_factor({1, 1, 0, 40, 0.5, 0.1});
  Outcome o;
  o.pass = worst <= 1e-12 && std::abs(at_40 - 2.0) < 1e-9;
  o.detail = fmt("max gap %.1e; gamma 0.5 gives %.6f at n=4 and %.12f at n=40", worst,
                 loss_magnitude_factor({1, 1, 0, 4, 0.5, 0.1}), at_40);
  return o;
}

// ---------------------------------------------------------------------------
// 6. Trend reproduction on a noisy sinusoid

Outcome trend_reproduction() {
  const auto start = Clock::now();
  const std::size_t seeds = 5;
  const RolloutConfig cfg{48, 12, 0, 4};
  std::size_t improved = 0, lower_mse = 0, fewer_violations = 0;
  std::vector<std::vector<double>> per_block(cfg.steps);
  std::string rows;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const SeriesDataset ds = gen_sinusoid(2000, 1, {150}, 1.0, 0.1, seed);
    const Forecaster init = init_forecaster(ModelKind::kLinear, {48, 0, 12, 1, 0}, seed);
    TrainConfig tc;
    tc.adam.lr = 3e-3;
    tc.batch_size = 32;
    tc.max_epochs = 200;
    tc.patience = 5;
    tc.seed = seed;
    tc.objective = Objective::kAr;
    const TrainResult ar = train(init, ds, cfg, tc);
    tc.objective = Objective::kMse;
    const TrainResult mse = train(init, ds, cfg, tc);
    const EvalReport ra = evaluate(ar.best.model, ds, Split::kTest, cfg);
    const EvalReport rm = evaluate(mse.best.model, ds, Split::kTest, cfg);

    double best_val = ar.initial_val_loss;
    for (const EpochRecord& r : ar.history) best_val = std::min(best_val, r.val_loss);
    improved += best_val < ar.initial_val_loss;
    lower_mse += ra.cumulative.mse < rm.cumulative.mse;
    fewer_violations += ra.block_violation_rate <= rm.block_violation_rate;
    for (std::size_t k = 0; k < cfg.steps; ++k) per_block[k].push_back(ra.per_block[k].mse);
    rows += fmt("\n    seed %llu: rollout mse ar %.5f vs mse %.5f, violation rate ar %.3f vs mse %.3f",
                static_cast<unsigned long long>(seed), ra.cumulative.mse, rm.cumulative.mse, ra.block_violation_rate,
                rm.block_violation_rate);
  }
  std::vector<double> medians;
  for (std::vector<double>& xs : per_block) {
    std::sort(xs.begin(), xs.end());
    medians.push_back(xs[xs.size() / 2]);
  }
  const bool monotone = std::is_sorted(medians.begin(), medians.end());
  const double elapsed = seconds_since(start);

  const bool a = improved == seeds, b = lower_mse >= 4, c = fewer_violations >= 4;
  Outcome o;
  o.pass = a && b && c && monotone && elapsed < 600.0;
  o.detail = fmt("(a) %s %zu/5 improve, (b) %s %zu/5 lower rollout mse, (c) %s %zu/5 violation rate no higher, "
                 "(d) %s median per-block mse %.5f %.5f %.5f %.5f, %.0f s",
                 a ? "ok" : "FAIL", improved, b ? "ok" : "FAIL", lower_mse, c ? "ok" : "FAIL", fewer_violations,
                 monotone ? "ok" : "FAIL", medians[0], medians[1], medians[2], medians[3], elapsed) +
             rows;
  return o;
}

// ---------------------------------------------------------------------------
// 7 and 8 run the command-line pipeline in a scratch directory.

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / "arollout_acceptance") {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }

  fs::path config(const std::string& name, const fs::path& out_dir) const {
    const fs::path p = dir_ / (name + ".ini");
    std::ofstream(p) << "[dataset]\nsource = sinusoid\nlength = 3000\nperiods = 150\nnoise_std = 0.1\n"
                     << "[model]\nkind = linear\ncontext_length = 48\nblock_length = 12\n"
                     << "[rollout]\nsteps = 4\n"
                     << "[train]\nmax_epochs = 20\nlr = 0.003\nseed = 7\n"
                     << "[output]\ndirectory = " << out_dir.string() << "\n";
    return p;
  }

 private:
  fs::path dir_;
};

bool all_finite_csv(const std::string& text, std::size_t skip_columns, std::size_t& rows) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    for (std::size_t col = 0; std::getline(cells, cell, ','); ++col) {
      if (col < skip_columns) continue;
      try {
        if (!std::isfinite(std::stod(cell))) return false;
      } catch (const std::exception&) {
        return false;
      }
    }
  }
  return true;
}

Outcome long_horizon(const Workspace& ws) {
  std::ostringstream out, err;
  Outcome o;
  const fs::path cfg = ws.config("long", ws.dir() / "long");
  if (cli::cmd_train({cfg, {}, {}}, out, err) != cli::kExitOk) return {false, "training failed: " + err.str()};
  const fs::path ck = ws.dir() / "long" / "checkpoint.arpt";
  if (cli::cmd_eval({cfg, ck, 168, ws.dir() / "long_eval", false}, out, err) != cli::kExitOk) {
    return {false, "eval failed: " + err.str()};
  }
  std::size_t curve_rows = 0;
  const bool curve_finite = all_finite_csv(read_file(ws.dir() / "long_eval" / "curve.csv"), 0, curve_rows);

  // Predict from the last 48 rows of the same series.
  const SeriesDataset ds = gen_sinusoid(3000, 1, {150}, 1.0, 0.1, 0);
  std::ofstream(ws.dir() / "recent.csv") << [&] {
    std::string csv = "value\n";
    for (std::size_t t = ds.length() - 48; t < ds.length(); ++t) csv += fmt("%.17g\n", ds.at(t, 0));
    return csv;
  }();
  if (cli::cmd_predict({ck, ws.dir() / "recent.csv", 168, ws.dir() / "long_pred", {}}, out, err) != cli::kExitOk) {
    return {false, "predict failed: " + err.str()};
  }
  std::size_t forecast_rows = 0;
  const bool forecast_finite = all_finite_csv(read_file(ws.dir() / "long_pred" / "forecast.csv"), 0, forecast_rows);

  const Checkpoint loaded = load_checkpoint(ck);
  o.pass = loaded.rollout.block == 12 && curve_rows == 14 && curve_finite && forecast_rows == 168 && forecast_finite;
  o.detail = fmt("T=%zu checkpoint, %zu-row curve (%s), %zu forecast rows (%s), %.1fx the trained block length",
                 loaded.rollout.block, curve_rows, curve_finite ? "finite" : "non-finite", forecast_rows,
                 forecast_finite ? "finite" : "non-finite", 168.0 / static_cast<double>(loaded.rollout.block));
  return o;
}

Outcome determinism(const Workspace& ws) {
  std::ostringstream out, err;
  std::array<std::string, 2> checkpoint, history, report, curve;
  for (int run = 0; run < 2; ++run) {
    const fs::path run_dir = ws.dir() / fmt("det%d", run);
    const fs::path cfg = ws.config(fmt("det%d", run), run_dir);
    if (cli::cmd_train({cfg, {}, {}}, out, err) != cli::kExitOk) return {false, "training failed: " + err.str()};
    if (cli::cmd_eval({cfg, run_dir / "checkpoint.arpt", 96, run_dir / "eval", false}, out, err) != cli::kExitOk) {
      return {false, "eval failed: " + err.str()};
    }
    checkpoint[run] = read_file(run_dir / "checkpoint.arpt");
    history[run] = read_file(run_dir / "history.csv");
    report[run] = read_file(run_dir / "eval" / "report.json");
    curve[run] = read_file(run_dir / "eval" / "curve.csv");
  }
  const bool same_ck = !checkpoint[0].empty() && checkpoint[0] == checkpoint[1];
  const bool same_hist = !history[0].empty() && history[0] == history[1];
  const bool same_report = !report[0].empty() && report[0] == report[1] && curve[0] == curve[1];
  Outcome o;
  o.pass = same_ck && same_hist && same_report;
  o.detail = fmt("checkpoint %s (%zu bytes), history %s, report and curve %s", same_ck ? "identical" : "differs",
                 checkpoint[0].size(), same_hist ? "identical" : "differs", same_report ? "identical" : "differ");
  return o;
}

// ---------------------------------------------------------------------------
// 9. Data layer

Outcome data_layer() {
  Xoshiro256 rng(909);
  std::size_t matched = 0;
  const std::size_t cases = 20;
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t length = 30 + rng.below(400), s = 1 + rng.below(60), h = 1 + rng.below(60),
                      stride = 1 + rng.below(6);
    const std::size_t expected = length >= s + h ? (length - s - h) / stride + 1 : 0;
    const SeriesDataset ds("flat", length, 1, std::vector<double>(length, 1.0), {}, {1.0, 0.0});
    const std::size_t produced = window_iter(ds, Split::kTrain, s, h, stride).windows.size();
    matched += produced == expected && window_count(length, s, h, stride) == expected;
  }

  double worst_gap = 0.0;
  std::string acf;
  for (double phi : {0.9, 0.5, 0.0, -0.5}) {
    const SeriesDataset ds = gen_ar_process(10000, 1, {phi}, 1.0, 99);
    const std::vector<double>& x = ds.values();
    double mean = 0.0;
    for (double e : x) mean += e / static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      den += (x[t] - mean) * (x[t] - mean);
      if (t > 0) num += (x[t] - mean) * (x[t - 1] - mean);
    }
    const double r = num / den;
    worst_gap = std::max(worst_gap, std::abs(r - phi));
    acf += fmt(" %.2f->%.3f", phi, r);
  }
  Outcome o;
  o.pass = matched == cases && worst_gap <= 0.05;
  o.detail = fmt("%zu/%zu window counts match, lag-1 autocorrelation", matched, cases) + acf;
  return o;
}

}  // namespace
}  // namespace arollout

int main() {
  using namespace arollout;
  const Workspace ws;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"single-step equivalence", single_step_equivalence},
      {"stop-gradient coefficients", stop_gradient_coefficients},
      {"gradient norm bound", norm_bound},
      {"loss magnitude factor", magnitude_factor},
      {"trend reproduction", trend_reproduction},
      {"long-horizon forecast", [&] { return long_horizon(ws); }},
      {"determinism", [&] { return determinism(ws); }},
      {"data layer", data_layer},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
