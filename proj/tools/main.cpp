// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace arollout::cli;

  CLI::App app{"arollout: autoregressive-rollout training and evaluation for time-series forecasters"};
  app.require_subcommand(1);

  TrainOptions train;
  std::string train_out;
  std::uint64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "Train a forecaster from a run config");
  train_cmd->add_option("--config", train.config, "Run config (INI)")->required();
  auto* train_out_opt = train_cmd->add_option("--out", train_out, "Output directory (overrides [output])");
  auto* train_seed_opt = train_cmd->add_option("--seed", train_seed, "Override train.seed");

  EvalOptions eval;
  std::string eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint under rollout on the test split");
  eval_cmd->add_option("--config", eval.config, "Run config providing the dataset")->required();
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--horizon", eval.horizon, "Total horizon H (multiple of the block length)")->required();
  auto* eval_out_opt = eval_cmd->add_option("--out", eval_out, "Output directory");
  eval_cmd->add_flag("--raw-scale", eval.raw_scale, "Report metrics on the raw data scale");

  PredictOptions predict;
  std::string predict_out, time_column;
  auto* predict_cmd = app.add_subcommand("predict", "Forecast H steps past the end of a CSV file");
  predict_cmd->add_option("--checkpoint", predict.checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--input", predict.input, "Input CSV with a header row")->required();
  predict_cmd->add_option("--horizon", predict.horizon, "Total horizon H (multiple of the block length)")->required();
  auto* predict_out_opt = predict_cmd->add_option("--out", predict_out, "Output directory");
  auto* time_opt = predict_cmd->add_option("--time-column", time_column, "Column to drop from the input");

  GradcheckOptions grad;
  std::uint64_t grad_seed = 0;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare autodiff gradients of the rollout loss to finite differences");
  grad_cmd->add_option("--config", grad.config, "Run config (INI)")->required();
  auto* grad_seed_opt = grad_cmd->add_option("--seed", grad_seed, "Override train.seed");
  grad_cmd->add_option("--inject-fault", grad.inject_fault, "Corrupt the backward rule of an op (negative control)")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  if (*train_cmd) {
    if (*train_out_opt) train.out = train_out;
    if (*train_seed_opt) train.seed = train_seed;
    return cmd_train(train, std::cout, std::cerr);
  }
  if (*eval_cmd) {
    if (*eval_out_opt) eval.out = eval_out;
    return cmd_eval(eval, std::cout, std::cerr);
  }
  if (*predict_cmd) {
    if (*predict_out_opt) predict.out = predict_out;
    if (*time_opt) predict.time_column = time_column;
    return cmd_predict(predict, std::cout, std::cerr);
  }
  if (*grad_seed_opt) grad.seed = grad_seed;
  return cmd_gradcheck(grad, std::cout, std::cerr);
}
