// asrlab/nsdl.cc

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

#include "asrlab/nsdl.hh"

#include <cmath>

namespace asrlab {

void NsdlHeads::Init(const StateInventory &inventory, int hidden, Rng *rng) {
  head1.Init(inventory.Head1Dim(), hidden, rng);
  head2.Init(inventory.num_speech, hidden, rng);
}

void NsdlHeadGrads::InitZero(const NsdlHeads &h) {
  head1.InitZero(h.head1);
  head2.InitZero(h.head2);
}

Mat SoftmaxRows(const Mat &logits) {
  Mat p(logits.rows(), logits.cols());
  for (int t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    p.row(t) = (logits.row(t).array() - m).exp();
    p.row(t) /= p.row(t).sum();
  }
  return p;
}

NsdlOutputs NsdlForward(const NsdlHeads &heads, const Mat &hidden) {
  Require(hidden.cols() == heads.head1.InDim(),
          StrCat("head input dim ", hidden.cols(), " != ", heads.head1.InDim()));
  NsdlOutputs out;
  out.p1 = SoftmaxRows(LinearForward(heads.head1, hidden));
  out.p2 = SoftmaxRows(LinearForward(heads.head2, hidden));
  return out;
}

Vec NonspeechProb(const NsdlOutputs &outputs) {
  const int speech_col = static_cast<int>(outputs.p1.cols()) - 1;
  return (1.0 - outputs.p1.col(speech_col).array()).matrix();
}

std::vector<uint8_t> BuildSpeechMask(const std::vector<int> &alignment,
                                     const StateInventory &inventory) {
  std::vector<uint8_t> mask(alignment.size());
  for (size_t t = 0; t < alignment.size(); ++t)
    mask[t] = inventory.IsSpeech(alignment[t]) ? 1 : 0;
  return mask;
}

int CountEligibleFrames(int total, const std::vector<uint8_t> *frame_mask) {
  if (!frame_mask) return total;
  Require(static_cast<int>(frame_mask->size()) == total, "frame mask length");
  int n = 0;
  for (uint8_t m : *frame_mask) n += m ? 1 : 0;
  return n;
}

double LossL1(const NsdlOutputs &outputs, const std::vector<uint8_t> &speech_mask,
              const std::vector<uint8_t> *frame_mask, double eps, Mat *dlogits1) {
  const int T = static_cast<int>(outputs.p1.rows());
  const int dim = static_cast<int>(outputs.p1.cols());
  const int speech_col = dim - 1;
  Require(static_cast<int>(speech_mask.size()) == T, "speech mask length");
  if (dlogits1 && dlogits1->size() == 0) *dlogits1 = Mat::Zero(T, dim);

  double loss = 0.0;
  for (int t = 0; t < T; ++t) {
    if (frame_mask && !(*frame_mask)[t]) continue;
    const double p_speech = outputs.p1(t, speech_col);
    if (speech_mask[t]) {
      loss -= std::log(std::max(p_speech, eps));
      if (dlogits1) {
        dlogits1->row(t) += outputs.p1.row(t);
        (*dlogits1)(t, speech_col) -= 1.0;
      }
    } else {
      const double q = 1.0 - p_speech;  // sum over S1 of p1
      loss -= std::log(std::max(q, eps));
      if (dlogits1) {
        // d/dlogit_k of -log(sum_{S1} p1) = p1_k - 1{k in S1} p1_k / q
        dlogits1->row(t) += outputs.p1.row(t);
        for (int k = 0; k < speech_col; ++k)
          (*dlogits1)(t, k) -= outputs.p1(t, k) / std::max(q, eps);
      }
    }
  }
  return loss;
}

Mat CombineDistribution(const NsdlOutputs &outputs,
                        const StateInventory &inventory) {
  const int T = static_cast<int>(outputs.p1.rows());
  Require(static_cast<int>(outputs.p1.cols()) == inventory.Head1Dim(),
          "p1 width does not match inventory");
  Require(static_cast<int>(outputs.p2.cols()) == inventory.num_speech,
          "p2 width does not match inventory");
  const int speech_col = inventory.num_nonspeech;
  Mat full(T, inventory.NumStates());
  for (int t = 0; t < T; ++t) {
    full.row(t).head(inventory.num_nonspeech) =
        outputs.p1.row(t).head(inventory.num_nonspeech);
    full.row(t).tail(inventory.num_speech) =
        outputs.p1(t, speech_col) * outputs.p2.row(t);
  }
  return full;
}

double LossL2(const NsdlOutputs &outputs, const std::vector<int> &alignment,
              const StateInventory &inventory, const NsdlLossConfig &config,
              const std::vector<uint8_t> *frame_mask, Mat *dlogits1,
              Mat *dlogits2) {
  const int T = static_cast<int>(outputs.p1.rows());
  const int speech_col = inventory.num_nonspeech;
  Require(static_cast<int>(alignment.size()) == T, "alignment length");
  if (dlogits1 && dlogits1->size() == 0)
    *dlogits1 = Mat::Zero(T, inventory.Head1Dim());
  if (dlogits2 && dlogits2->size() == 0)
    *dlogits2 = Mat::Zero(T, inventory.num_speech);

  double loss = 0.0;
  for (int t = 0; t < T; ++t) {
    if (frame_mask && !(*frame_mask)[t]) continue;
    const int y = alignment[t];
    Require(inventory.IsValid(y), StrCat("alignment state ", y, " out of range"));
    if (!inventory.IsSpeech(y)) {
      const double w = config.weight_nonspeech;
      loss -= w * std::log(std::max(outputs.p1(t, y), config.eps));
      if (dlogits1) {
        dlogits1->row(t) += w * outputs.p1.row(t);
        (*dlogits1)(t, y) -= w;
      }
    } else {
      const double w = config.weight_speech;
      const int j = inventory.SpeechIndex(y);
      // -log(p1(speech) p2(y)) splits into the two heads
      loss -= w * std::log(std::max(outputs.p1(t, speech_col), config.eps));
      loss -= w * std::log(std::max(outputs.p2(t, j), config.eps));
      if (dlogits1) {
        dlogits1->row(t) += w * outputs.p1.row(t);
        (*dlogits1)(t, speech_col) -= w;
      }
      if (dlogits2) {
        dlogits2->row(t) += w * outputs.p2.row(t);
        (*dlogits2)(t, j) -= w;
      }
    }
  }
  return loss;
}

NsdlLossBreakdown LossNsdl(const NsdlOutputs &outputs,
                           const std::vector<int> &alignment,
                           const StateInventory &inventory,
                           const NsdlLossConfig &config,
                           const std::vector<uint8_t> *frame_mask,
                           Mat *dlogits1, Mat *dlogits2) {
  const int T = static_cast<int>(outputs.p1.rows());
  NsdlLossBreakdown out;
  out.eligible_frames = CountEligibleFrames(T, frame_mask);

  const auto speech_mask = BuildSpeechMask(alignment, inventory);
  Mat dl1_l2, dl2;
  out.l1 = LossL1(outputs, speech_mask, frame_mask, config.eps, dlogits1);
  out.l2 = LossL2(outputs, alignment, inventory, config, frame_mask,
                  dlogits1 ? &dl1_l2 : nullptr, dlogits2 ? &dl2 : nullptr);
  out.total = out.l1 + config.lambda * out.l2;
  if (dlogits1) *dlogits1 += config.lambda * dl1_l2;
  if (dlogits2) {
    if (dlogits2->size() == 0) *dlogits2 = Mat::Zero(T, inventory.num_speech);
    *dlogits2 += config.lambda * dl2;
  }
  return out;
}

double CeBaselineLoss(const Mat &logits, const std::vector<int> &alignment,
                      const StateInventory &inventory,
                      const std::vector<uint8_t> *frame_mask, double eps,
                      Mat *dlogits) {
  const int T = static_cast<int>(logits.rows());
  Require(static_cast<int>(logits.cols()) == inventory.NumStates(),
          StrCat("logit dim ", logits.cols(), " != ", inventory.NumStates()));
  Require(static_cast<int>(alignment.size()) == T, "alignment length");
  const Mat p = SoftmaxRows(logits);
  if (dlogits) *dlogits = Mat::Zero(T, logits.cols());
  double loss = 0.0;
  for (int t = 0; t < T; ++t) {
    if (frame_mask && !(*frame_mask)[t]) continue;
    const int y = alignment[t];
    Require(inventory.IsValid(y), StrCat("alignment state ", y, " out of range"));
    loss -= std::log(std::max(p(t, y), eps));
    if (dlogits) {
      dlogits->row(t) = p.row(t);
      (*dlogits)(t, y) -= 1.0;
    }
  }
  return loss;
}

}  // namespace asrlab
