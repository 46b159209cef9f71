// asrlab/biapc.hh

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

#ifndef ASRLAB_BIAPC_HH_
#define ASRLAB_BIAPC_HH_

#include <vector>

#include "asrlab/matrix.hh"
#include "asrlab/nnet.hh"

namespace asrlab {

// Offset regression targets: the forward path at position t predicts
// x_{t+n} from x_0..x_t, the backward path predicts x_{t-n} from x_t..x_T.
struct BiApcBatch {
  Mat fwd_targets;  // (T-n) x D, rows n..T of the input
  Mat bwd_targets;  // (T-n) x D, rows 0..T-n
};

BiApcBatch BiapcTargets(const Mat &feats, int n);

// One regression head per direction, hidden -> feature dim.
struct BiApcHeads {
  LinearParams fwd_head, bwd_head;
  void Init(int feat_dim, int hidden, Rng *rng);
};

struct BiApcHeadGrads {
  LinearGrads fwd_head, bwd_head;
  void InitZero(const BiApcHeads &h);
};

struct BiApcPreds {
  Mat fwd;  // (T-n) x D, prediction for x_{t+n} at row t
  Mat bwd;  // (T-n) x D, prediction for x_t at row t (made at position t+n)
};

// Runs the trunk in split wiring so neither path sees its reverse context,
// then applies the per-direction heads.  trunk_out receives the T x 2H
// activations for the backward pass.
BiApcPreds BiapcForward(TrunkParams *trunk, const BlstmConfig &config,
                        const BiApcHeads &heads, const Mat &feats, int n,
                        const TrunkOptions &opts, TrunkCache *cache,
                        Mat *trunk_out);

// Sum of the per-direction mean absolute errors (each averaged over all
// elements).  Optional gradients are w.r.t. the predictions.
double BiapcLoss(const BiApcPreds &preds, const BiApcBatch &batch,
                 Mat *dfwd, Mat *dbwd);

struct BiApcTrainConfig {
  int n = 2;
  int epochs = 20;
  double lr = 0.05;
  double momentum = 0.9;
  double clip_norm = 5.0;
  double dropout = 0.0;
};

struct PretrainResult {
  std::vector<double> epoch_loss;  // mean per-sequence loss per epoch
};

// Trains trunk+heads on the given feature sequences (already augmented,
// paired and normalized).  Sequences with T <= n are rejected up front.
PretrainResult Pretrain(TrunkParams *trunk, const BlstmConfig &config,
                        BiApcHeads *heads, const std::vector<Mat> &sequences,
                        const BiApcTrainConfig &train, uint64_t seed);

// Copies every trunk tensor (weights and running statistics) into the
// supervised model; regression heads are dropped by construction.  Shape
// incompatibility is a ConfigError naming the first offending tensor.
void TransferTrunk(const TrunkParams &pretrained, const BlstmConfig &pre_cfg,
                   const BlstmConfig &sup_cfg, TrunkParams *supervised);

}  // namespace asrlab

#endif  // ASRLAB_BIAPC_HH_
