// asrlab/tests/test_biapc.cc

// Copyright 2026  asrlab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "asrlab/biapc.hh"

#include <cmath>

#include "doctest.h"

using namespace asrlab;

namespace {

Mat RandomMat(int rows, int cols, Rng *rng, double scale = 1.0) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = scale * rng->Gaussian();
  return m;
}

struct SplitModel {
  BlstmConfig cfg;
  TrunkParams trunk;
  BiApcHeads heads;
};

SplitModel MakeModel(int blocks, int hidden, int dim, uint64_t seed) {
  SplitModel m;
  m.cfg.num_blocks = blocks;
  m.cfg.hidden = hidden;
  m.cfg.input_dim = dim;
  m.cfg.dropout = 0.0;
  Rng rng(seed);
  m.trunk.Init(m.cfg, &rng);
  m.heads.Init(dim, hidden, &rng);
  return m;
}

}  // namespace

TEST_CASE("biapc_targets: counts and slicing identity") {
  Rng rng(1);
  Mat x = RandomMat(10, 4, &rng);
  auto b = BiapcTargets(x, 2);
  CHECK(b.fwd_targets.rows() == 8);
  CHECK(b.bwd_targets.rows() == 8);
  CHECK((b.fwd_targets - x.bottomRows(8)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.bwd_targets - x.topRows(8)).cwiseAbs().maxCoeff() == 0.0);

  auto edge = BiapcTargets(x, 9);
  CHECK(edge.fwd_targets.rows() == 1);
  CHECK(edge.bwd_targets.rows() == 1);

  CHECK_THROWS_AS(BiapcTargets(x, 10), InputError);
  CHECK_THROWS_AS(BiapcTargets(x, 11), InputError);
}

TEST_CASE("biapc_forward: prediction shapes") {
  auto m = MakeModel(2, 6, 5, 2);
  Rng rng(3);
  Mat x = RandomMat(5, 5, &rng);
  TrunkCache cache;
  Mat trunk_out;
  auto preds = BiapcForward(&m.trunk, m.cfg, m.heads, x, 2, TrunkOptions{},
                            &cache, &trunk_out);
  CHECK(preds.fwd.rows() == 3);
  CHECK(preds.fwd.cols() == 5);
  CHECK(preds.bwd.rows() == 3);
  CHECK(preds.bwd.cols() == 5);
  CHECK(trunk_out.rows() == 5);
  CHECK(trunk_out.cols() == 12);
}

TEST_CASE("direction isolation: future perturbations never reach the forward path") {
  // the central Bi-APC property: bit-exact invariance, not approximate
  auto m = MakeModel(3, 5, 4, 4);
  Rng rng(5);
  const int n = 2;
  for (int trial = 0; trial < 20; ++trial) {
    const int T = rng.UniformInt(n + 2, 30);
    Mat x = RandomMat(T, 4, &rng);
    const int cut = rng.UniformInt(0, T - 2);  // perturb frames > cut

    TrunkOptions opts;
    opts.training = trial % 2 == 0;  // both modes must hold
    opts.dropout = opts.training ? 0.2 : 0.0;
    opts.dropout_seed = 99;
    opts.update_running_stats = false;

    TrunkCache c1, c2;
    auto p1 = BiapcForward(&m.trunk, m.cfg, m.heads, x, n, opts, &c1, nullptr);

    Mat y = x;
    for (int t = cut + 1; t < T; ++t)
      for (int d = 0; d < 4; ++d) y(t, d) += rng.Gaussian();
    auto p2 = BiapcForward(&m.trunk, m.cfg, m.heads, y, n, opts, &c2, nullptr);

    // forward predictions at positions <= cut are bit-identical
    const int fwd_rows = std::min(cut + 1, T - n);
    for (int t = 0; t < fwd_rows; ++t)
      CHECK((p1.fwd.row(t) - p2.fwd.row(t)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("direction isolation: past perturbations never reach the backward path") {
  auto m = MakeModel(2, 4, 3, 6);
  Rng rng(7);
  const int n = 2;
  for (int trial = 0; trial < 20; ++trial) {
    const int T = rng.UniformInt(n + 2, 30);
    Mat x = RandomMat(T, 3, &rng);
    const int cut = rng.UniformInt(1, T - 1);  // perturb frames < cut

    TrunkCache c1, c2;
    auto p1 = BiapcForward(&m.trunk, m.cfg, m.heads, x, n, TrunkOptions{}, &c1,
                           nullptr);
    Mat y = x;
    for (int t = 0; t < cut; ++t)
      for (int d = 0; d < 3; ++d) y(t, d) += rng.Gaussian();
    auto p2 = BiapcForward(&m.trunk, m.cfg, m.heads, y, n, TrunkOptions{}, &c2,
                           nullptr);

    // backward prediction rows correspond to positions t = row + n
    for (int row = 0; row < T - n; ++row) {
      if (row + n < cut) continue;  // position saw perturbed frames
      CHECK((p1.bwd.row(row) - p2.bwd.row(row)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("biapc_loss: MAE arithmetic, zero case, homogeneity") {
  BiApcPreds preds;
  BiApcBatch batch;
  preds.fwd.resize(1, 2);
  preds.fwd << 1.0, 2.0;
  batch.fwd_targets.resize(1, 2);
  batch.fwd_targets << 2.0, 4.0;
  preds.bwd = Mat::Constant(1, 2, 3.0);
  batch.bwd_targets = preds.bwd;
  CHECK(BiapcLoss(preds, batch, nullptr, nullptr) ==
        doctest::Approx(1.5).epsilon(1e-12));

  preds.fwd = batch.fwd_targets;
  CHECK(BiapcLoss(preds, batch, nullptr, nullptr) == doctest::Approx(0.0));

  Rng rng(8);
  BiApcPreds p2;
  BiApcBatch b2;
  p2.fwd = RandomMat(4, 3, &rng);
  p2.bwd = RandomMat(4, 3, &rng);
  b2.fwd_targets = RandomMat(4, 3, &rng);
  b2.bwd_targets = RandomMat(4, 3, &rng);
  double base = BiapcLoss(p2, b2, nullptr, nullptr);
  BiApcPreds p3;
  const double c = 2.5;
  p3.fwd = b2.fwd_targets + c * (p2.fwd - b2.fwd_targets);
  p3.bwd = b2.bwd_targets + c * (p2.bwd - b2.bwd_targets);
  CHECK(BiapcLoss(p3, b2, nullptr, nullptr) ==
        doctest::Approx(c * base).epsilon(1e-12));
}

TEST_CASE("biapc loss gradients through the split trunk match finite differences") {
  auto m = MakeModel(2, 4, 5, 9);
  Rng rng(10);
  const int n = 2;
  Mat x = RandomMat(8, 5, &rng);
  auto batch = BiapcTargets(x, n);

  TrunkOptions opts;
  opts.training = true;
  opts.wiring = Wiring::kSplit;
  opts.update_running_stats = false;

  auto loss_fn = [&]() {
    TrunkCache cache;
    auto preds =
        BiapcForward(&m.trunk, m.cfg, m.heads, x, n, opts, &cache, nullptr);
    return BiapcLoss(preds, batch, nullptr, nullptr);
  };

  TrunkCache cache;
  Mat trunk_out;
  auto preds =
      BiapcForward(&m.trunk, m.cfg, m.heads, x, n, opts, &cache, &trunk_out);
  Mat dfwd, dbwd;
  BiapcLoss(preds, batch, &dfwd, &dbwd);

  const int H = m.cfg.hidden, T = 8;
  TrunkGrads tg;
  tg.InitZero(m.trunk);
  BiApcHeadGrads hg;
  hg.InitZero(m.heads);
  Mat d_trunk = Mat::Zero(T, 2 * H);
  Mat dx_f, dx_b;
  LinearBackward(m.heads.fwd_head, trunk_out.leftCols(H).topRows(T - n), dfwd,
                 &hg.fwd_head, &dx_f);
  LinearBackward(m.heads.bwd_head, trunk_out.rightCols(H).bottomRows(T - n),
                 dbwd, &hg.bwd_head, &dx_b);
  d_trunk.topRows(T - n).leftCols(H) += dx_f;
  d_trunk.bottomRows(T - n).rightCols(H) += dx_b;
  TrunkBackward(m.trunk, m.cfg, cache, d_trunk, &tg);

  auto params = TrunkTrainableTensors(&m.trunk);
  AppendTensors(&params, LinearTensors(&m.heads.fwd_head, "bf"));
  AppendTensors(&params, LinearTensors(&m.heads.bwd_head, "bb"));
  auto grads = TrunkGradTensors(&tg);
  AppendTensors(&grads, LinearGradTensors(&hg.fwd_head, "bf"));
  AppendTensors(&grads, LinearGradTensors(&hg.bwd_head, "bb"));

  GradCheckOptions gopts;
  gopts.probes = 200;
  auto report = GradCheck(loss_fn, params, grads, gopts);
  CHECK(report.max_rel_error <= 1e-4);
  CHECK(report.failures.empty());
}

TEST_CASE("transfer: per-direction trunk function is copied exactly") {
  auto pre = MakeModel(2, 6, 5, 11);
  Rng rng(12);
  // perturb the pretrained trunk so it differs from any fresh init
  for (auto &ref : TrunkTrainableTensors(&pre.trunk)) {
    TensorRef r = ref;
    for (int64_t i = 0; i < r.Size(); ++i) r.Data()[i] += 0.01 * rng.Gaussian();
  }

  BlstmConfig sup_cfg = pre.cfg;
  TrunkParams sup;
  Rng rng2(13);
  sup.Init(sup_cfg, &rng2);
  TransferTrunk(pre.trunk, pre.cfg, sup_cfg, &sup);

  Mat x = RandomMat(7, 5, &rng);
  TrunkOptions opts;
  opts.wiring = Wiring::kSplit;
  TrunkCache c1, c2;
  Mat y_pre = TrunkForward(&pre.trunk, pre.cfg, x, opts, &c1);
  Mat y_sup = TrunkForward(&sup, sup_cfg, x, opts, &c2);
  CHECK((y_pre - y_sup).cwiseAbs().maxCoeff() < 1e-12);

  // fresh output heads differ from every pretrained tensor by construction
  LinearParams fresh;
  fresh.Init(5, 6, &rng2);
  CHECK((fresh.w - pre.heads.fwd_head.w).cwiseAbs().maxCoeff() > 0.0);

  BlstmConfig narrow = pre.cfg;
  narrow.hidden = 4;
  TrunkParams bad;
  CHECK_THROWS_WITH_AS(TransferTrunk(pre.trunk, pre.cfg, narrow, &bad),
                       doctest::Contains("trunk.b0.fwd.wx"), ConfigError);
}

TEST_CASE("pretrain: validation, determinism, loss trend") {
  auto make_seqs = [](int count, int T, uint64_t seed) {
    Rng rng(seed);
    std::vector<Mat> seqs;
    for (int i = 0; i < count; ++i) {
      // smooth drifting signals: very predictable two frames ahead
      Mat s(T, 4);
      double phase = rng.Uniform(0.0, 6.28);
      for (int t = 0; t < T; ++t)
        for (int d = 0; d < 4; ++d)
          s(t, d) = std::sin(0.15 * t + phase + d) + 0.05 * rng.Gaussian();
      seqs.push_back(s);
    }
    return seqs;
  };
  auto seqs = make_seqs(10, 24, 55);

  auto m1 = MakeModel(2, 5, 4, 14);
  BiApcTrainConfig tc;
  tc.n = 2;
  tc.epochs = 0;
  CHECK_THROWS_AS(Pretrain(&m1.trunk, m1.cfg, &m1.heads, seqs, tc, 1),
                  ConfigError);
  tc.epochs = 8;
  CHECK_THROWS_AS(Pretrain(&m1.trunk, m1.cfg, &m1.heads, {}, tc, 1),
                  ConfigError);

  tc.lr = 0.02;
  auto r1 = Pretrain(&m1.trunk, m1.cfg, &m1.heads, seqs, tc, 1);
  CHECK(r1.epoch_loss.size() == 8);
  CHECK(r1.epoch_loss.back() <= r1.epoch_loss.front());

  auto m2 = MakeModel(2, 5, 4, 14);
  auto r2 = Pretrain(&m2.trunk, m2.cfg, &m2.heads, seqs, tc, 1);
  CHECK(r1.epoch_loss == r2.epoch_loss);
  CHECK((m1.trunk.blocks[1].fwd.wx - m2.trunk.blocks[1].fwd.wx)
            .cwiseAbs()
            .maxCoeff() == 0.0);
}
