// asrlab/biapc.cc

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

#include <algorithm>
#include <numeric>

namespace asrlab {

BiApcBatch BiapcTargets(const Mat &feats, int n) {
  const int T = static_cast<int>(feats.rows());
  Require(n >= 1, "prediction offset must be >= 1");
  if (T <= n)
    throw InputError(StrCat("sequence of ", T, " frames too short for offset ", n));
  BiApcBatch b;
  b.fwd_targets = feats.bottomRows(T - n);
  b.bwd_targets = feats.topRows(T - n);
  return b;
}

void BiApcHeads::Init(int feat_dim, int hidden, Rng *rng) {
  fwd_head.Init(feat_dim, hidden, rng);
  bwd_head.Init(feat_dim, hidden, rng);
}

void BiApcHeadGrads::InitZero(const BiApcHeads &h) {
  fwd_head.InitZero(h.fwd_head);
  bwd_head.InitZero(h.bwd_head);
}

BiApcPreds BiapcForward(TrunkParams *trunk, const BlstmConfig &config,
                        const BiApcHeads &heads, const Mat &feats, int n,
                        const TrunkOptions &opts, TrunkCache *cache,
                        Mat *trunk_out) {
  const int T = static_cast<int>(feats.rows());
  if (T <= n)
    throw InputError(StrCat("sequence of ", T, " frames too short for offset ", n));
  TrunkOptions split_opts = opts;
  split_opts.wiring = Wiring::kSplit;
  Mat y = TrunkForward(trunk, config, feats, split_opts, cache);
  const int H = config.hidden;
  BiApcPreds preds;
  preds.fwd = LinearForward(heads.fwd_head, y.leftCols(H).topRows(T - n));
  preds.bwd = LinearForward(heads.bwd_head, y.rightCols(H).bottomRows(T - n));
  if (trunk_out) *trunk_out = std::move(y);
  return preds;
}

double BiapcLoss(const BiApcPreds &preds, const BiApcBatch &batch,
                 Mat *dfwd, Mat *dbwd) {
  Require(preds.fwd.rows() == batch.fwd_targets.rows() &&
              preds.fwd.cols() == batch.fwd_targets.cols() &&
              preds.bwd.rows() == batch.bwd_targets.rows() &&
              preds.bwd.cols() == batch.bwd_targets.cols(),
          "prediction/target shape mismatch");
  const double count_f = static_cast<double>(preds.fwd.size());
  const double count_b = static_cast<double>(preds.bwd.size());
  const Mat diff_f = preds.fwd - batch.fwd_targets;
  const Mat diff_b = preds.bwd - batch.bwd_targets;
  const double loss =
      diff_f.cwiseAbs().sum() / count_f + diff_b.cwiseAbs().sum() / count_b;
  if (dfwd) *dfwd = diff_f.array().sign().matrix() / count_f;
  if (dbwd) *dbwd = diff_b.array().sign().matrix() / count_b;
  return loss;
}

PretrainResult Pretrain(TrunkParams *trunk, const BlstmConfig &config,
                        BiApcHeads *heads, const std::vector<Mat> &sequences,
                        const BiApcTrainConfig &train, uint64_t seed) {
  if (sequences.empty()) throw ConfigError("pretraining needs a nonempty corpus");
  if (train.epochs < 1) throw ConfigError("pretraining needs epochs >= 1");
  for (const auto &s : sequences)
    if (static_cast<int>(s.rows()) <= train.n)
      throw InputError(StrCat("pretraining sequence of ", s.rows(),
                              " frames too short for offset ", train.n));

  const int H = config.hidden;
  SgdOptions sgd{train.lr, train.momentum, train.clip_norm};
  SgdState sgd_state;

  PretrainResult result;
  std::vector<int> order(sequences.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < train.epochs; ++epoch) {
    Rng shuffle_rng(DeriveSeed(seed, StrCat("biapc/epoch/", epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng.gen());
    double loss_sum = 0.0;
    for (size_t oi = 0; oi < order.size(); ++oi) {
      const Mat &feats = sequences[order[oi]];
      const int T = static_cast<int>(feats.rows());

      TrunkOptions opts;
      opts.training = true;
      opts.wiring = Wiring::kSplit;
      opts.update_running_stats = true;
      opts.dropout = train.dropout;
      opts.dropout_seed =
          DeriveSeed(seed, StrCat("biapc/drop/", epoch, "/", oi));
      TrunkCache cache;
      Mat trunk_out;
      BiApcPreds preds = BiapcForward(trunk, config, *heads, feats, train.n,
                                      opts, &cache, &trunk_out);
      BiApcBatch batch = BiapcTargets(feats, train.n);
      Mat dfwd, dbwd;
      loss_sum += BiapcLoss(preds, batch, &dfwd, &dbwd);

      TrunkGrads tg;
      tg.InitZero(*trunk);
      BiApcHeadGrads hg;
      hg.InitZero(*heads);
      Mat d_trunk = Mat::Zero(T, 2 * H);
      Mat dx_f, dx_b;
      LinearBackward(heads->fwd_head, trunk_out.leftCols(H).topRows(T - train.n),
                     dfwd, &hg.fwd_head, &dx_f);
      LinearBackward(heads->bwd_head,
                     trunk_out.rightCols(H).bottomRows(T - train.n), dbwd,
                     &hg.bwd_head, &dx_b);
      d_trunk.topRows(T - train.n).leftCols(H) += dx_f;
      d_trunk.bottomRows(T - train.n).rightCols(H) += dx_b;
      TrunkBackward(*trunk, config, cache, d_trunk, &tg);

      auto params = TrunkTrainableTensors(trunk);
      AppendTensors(&params, LinearTensors(&heads->fwd_head, "biapc.fwd"));
      AppendTensors(&params, LinearTensors(&heads->bwd_head, "biapc.bwd"));
      auto grads = TrunkGradTensors(&tg);
      AppendTensors(&grads, LinearGradTensors(&hg.fwd_head, "biapc.fwd"));
      AppendTensors(&grads, LinearGradTensors(&hg.bwd_head, "biapc.bwd"));
      SgdStep(params, grads, &sgd_state, sgd);
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
  }
  return result;
}

void TransferTrunk(const TrunkParams &pretrained, const BlstmConfig &pre_cfg,
                   const BlstmConfig &sup_cfg, TrunkParams *supervised) {
  if (pre_cfg.num_blocks != sup_cfg.num_blocks ||
      pre_cfg.hidden != sup_cfg.hidden ||
      pre_cfg.input_dim != sup_cfg.input_dim ||
      pre_cfg.batch_norm != sup_cfg.batch_norm) {
    // find the first tensor whose shape would differ, for the error message
    TrunkParams probe;
    Rng rng(0);
    probe.Init(sup_cfg, &rng);
    auto pre_refs = TrunkTensors(const_cast<TrunkParams *>(&pretrained));
    auto sup_refs = TrunkTensors(&probe);
    for (size_t i = 0; i < std::min(pre_refs.size(), sup_refs.size()); ++i) {
      if (pre_refs[i].Rows() != sup_refs[i].Rows() ||
          pre_refs[i].Cols() != sup_refs[i].Cols())
        throw ConfigError(StrCat(
            "transfer shape mismatch at ", pre_refs[i].name, ": pretrained ",
            pre_refs[i].Rows(), "x", pre_refs[i].Cols(), " vs supervised ",
            sup_refs[i].Rows(), "x", sup_refs[i].Cols()));
    }
    throw ConfigError("transfer config mismatch (block count)");
  }
  *supervised = pretrained;
}

}  // namespace asrlab
