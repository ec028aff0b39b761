// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "arollout/adam.hpp"
#include "arollout/checkpoint.hpp"
#include "arollout/dataset.hpp"
#include "arollout/error.hpp"
#include "arollout/trainer.hpp"

namespace arollout {
namespace {

TEST(AdamTest, ZeroGradientIsNoOp) {
  std::vector<double> p{1.0, -2.0};
  std::vector<double> g{0.0, 0.0};
  AdamState st(2);
  adam_step(p, g, st, 1, {});
  EXPECT_EQ(p, std::vector<double>({1.0, -2.0}));
  EXPECT_EQ(st.m, std::vector<double>(2, 0.0));
  EXPECT_EQ(st.v, std::vector<double>(2, 0.0));
}

TEST(AdamTest, FirstStepIsSignedLearningRate) {
  AdamConfig cfg;
  cfg.lr = 0.01;
  for (double g : {3.0, -0.2, 1e-3}) {
    std::vector<double> p{0.5};
    std::vector<double> grad{g};
    AdamState st(1);
    adam_step(p, grad, st, 1, cfg);
    // Bias correction makes m_hat = g and v_hat = g^2 on step one.
    EXPECT_NEAR(p[0] - 0.5, -cfg.lr * std::copysign(1.0, g), cfg.lr * cfg.eps / std::abs(g) + 1e-15);
  }
}

TEST(AdamTest, Deterministic) {
  std::vector<double> a{0.1, 0.2}, b{0.1, 0.2}, g{0.3, -0.4};
  AdamState sa(2), sb(2);
  for (std::uint64_t t = 1; t <= 2; ++t) {
    adam_step(a, g, sa, t, {});
    adam_step(b, g, sb, t, {});
  }
  EXPECT_EQ(a, b);
}

TEST(AdamTest, RejectsBadInput) {
  std::vector<double> p{0.0}, g{0.0, 1.0};
  AdamState st(1);
  EXPECT_THROW(adam_step(p, g, st, 1, {}), InvalidInput);
  std::vector<double> g1{0.0};
  EXPECT_THROW(adam_step(p, g1, st, 0, {}), InvalidInput);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.adam.lr = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(TrainTest, ZeroEpochsReturnsInitialModel) {
  SeriesDataset ds = gen_sinusoid(300, 1, {24}, 1.0, 0.1, 1);
  Forecaster m = init_forecaster(ModelKind::kLinear, {24, 0, 6, 1, 0}, 3);
  TrainConfig cfg;
  cfg.max_epochs = 0;
  TrainResult r = train(m, ds, {24, 6, 0, 2}, cfg);
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(r.best.model.flat_parameters(), m.flat_parameters());
  EXPECT_EQ(r.best.val_loss, r.initial_val_loss);
}

TEST(TrainTest, SingleStepObjectivesGiveIdenticalTrajectories) {
  SeriesDataset ds = gen_sinusoid(400, 2, {24, 17}, 1.0, 0.1, 2);
  Forecaster m = init_forecaster(ModelKind::kMlp, {24, 0, 6, 2, 8}, 4);
  TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.seed = 9;
  cfg.objective = Objective::kAr;
  TrainResult ar = train(m, ds, {24, 6, 0, 1}, cfg);
  cfg.objective = Objective::kMse;
  TrainResult mse = train(m, ds, {24, 6, 0, 1}, cfg);
  ASSERT_EQ(ar.history.size(), mse.history.size());
  for (std::size_t i = 0; i < ar.history.size(); ++i) {
    EXPECT_EQ(ar.history[i].train_loss, mse.history[i].train_loss);
    EXPECT_EQ(ar.history[i].val_loss, mse.history[i].val_loss);
  }
  EXPECT_EQ(ar.best.model.flat_parameters(), mse.best.model.flat_parameters());
}

TEST(TrainTest, NoiselessSinusoidIsLearned) {
  SeriesDataset ds = gen_sinusoid(2000, 1, {24}, 1.0, 0.0, 1);
  Forecaster m = init_forecaster(ModelKind::kLinear, {48, 0, 12, 1, 0}, 1);
  TrainConfig cfg;
  cfg.max_epochs = 50;
  cfg.objective = Objective::kMse;
  TrainResult r = train(m, ds, {48, 12, 0, 1}, cfg);
  ASSERT_FALSE(r.history.empty());
  EXPECT_LT(r.history.back().train_loss, 1e-3);
}

TEST(TrainTest, EmptyValSplitFallsBackWithWarning) {
  SeriesDataset ds = gen_sinusoid(200, 1, {24}, 1.0, 0.1, 1, {0.9, 0.0});
  Forecaster m = init_forecaster(ModelKind::kLinear, {16, 0, 4, 1, 0}, 1);
  TrainConfig cfg;
  cfg.max_epochs = 2;
  TrainResult r = train(m, ds, {16, 4, 0, 2}, cfg);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.history.size(), 2u);
}

TEST(TrainTest, TooShortTrainSplitRejected) {
  SeriesDataset ds = gen_sinusoid(40, 1, {24}, 1.0, 0.1, 1);
  Forecaster m = init_forecaster(ModelKind::kLinear, {24, 0, 6, 1, 0}, 1);
  EXPECT_THROW(train(m, ds, {24, 6, 0, 2}, {}), InvalidInput);
}

TEST(TrainTest, HistoryCsvFormat) {
  std::string csv = history_csv({{1, 0.5, 0.25}, {2, 0.125, 0.1}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,train_loss,val_loss");
  EXPECT_NE(csv.find("\n1,0.5,0.25\n"), std::string::npos);
  EXPECT_NE(csv.find("\n2,0.125,0.10000000000000001\n"), std::string::npos);
}

Checkpoint sample_checkpoint() {
  Checkpoint ck{init_forecaster(ModelKind::kInvertedAttention, {8, 2, 4, 3, 4}, 5), {8, 4, 2, 3, 0.3, 0.05}};
  ck.epoch = 7;
  ck.val_loss = 0.123456789012345678;
  ck.seed = 42;
  return ck;
}

TEST(CheckpointTest, RoundTripIsExact) {
  Checkpoint ck = sample_checkpoint();
  Checkpoint back = parse_checkpoint(serialize_checkpoint(ck));
  EXPECT_EQ(back.model.kind(), ck.model.kind());
  EXPECT_EQ(back.model.dims(), ck.model.dims());
  EXPECT_EQ(back.model.flat_parameters(), ck.model.flat_parameters());
  EXPECT_EQ(back.rollout.steps, 3u);
  EXPECT_EQ(back.rollout.gamma, 0.3);
  EXPECT_EQ(back.rollout.beta, 0.05);
  EXPECT_EQ(back.epoch, 7u);
  EXPECT_EQ(back.val_loss, ck.val_loss);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(serialize_checkpoint(back), serialize_checkpoint(ck));

  Tensor ctx = Tensor::filled({8, 3}, 0.5);
  Tensor a = forecast(ck.model, ctx), b = forecast(back.model, ctx);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(CheckpointTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "arollout_ck_roundtrip.arpt";
  Checkpoint ck = sample_checkpoint();
  save_checkpoint(ck, path);
  EXPECT_EQ(load_checkpoint(path).model.flat_parameters(), ck.model.flat_parameters());
  std::filesystem::remove(path);
}

TEST(CheckpointTest, WrongMagic) {
  std::string bytes = serialize_checkpoint(sample_checkpoint());
  bytes[0] = 'X';
  EXPECT_THROW(parse_checkpoint(bytes), FormatError);
}

TEST(CheckpointTest, NewerVersion) {
  std::string bytes = serialize_checkpoint(sample_checkpoint());
  bytes[4] = static_cast<char>(kCheckpointVersion + 1);
  EXPECT_THROW(parse_checkpoint(bytes), VersionError);
}

TEST(CheckpointTest, TruncatedOrPadded) {
  std::string bytes = serialize_checkpoint(sample_checkpoint());
  EXPECT_THROW(parse_checkpoint(bytes.substr(0, bytes.size() - 3)), FormatError);
  EXPECT_THROW(parse_checkpoint(bytes + "x"), FormatError);
  EXPECT_THROW(parse_checkpoint(""), FormatError);
}

}  // namespace
}  // namespace arollout
