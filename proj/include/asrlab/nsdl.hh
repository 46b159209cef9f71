// asrlab/nsdl.hh

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

#ifndef ASRLAB_NSDL_HH_
#define ASRLAB_NSDL_HH_

#include <cstdint>
#include <vector>

#include "asrlab/matrix.hh"
#include "asrlab/nnet.hh"
#include "asrlab/state-inventory.hh"

namespace asrlab {

// Two output heads over the shared trunk: head1 scores the non-speech states
// plus one "speech" placeholder class, head2 scores the speech states.  The
// placeholder is the last class of head1.
struct NsdlHeads {
  LinearParams head1;  // (|S1|+1) x hidden
  LinearParams head2;  // |S2| x hidden
  void Init(const StateInventory &inventory, int hidden, Rng *rng);
};

struct NsdlHeadGrads {
  LinearGrads head1, head2;
  void InitZero(const NsdlHeads &h);
};

// Per-frame probabilities; every row of p1 and p2 sums to one.
struct NsdlOutputs {
  Mat p1;  // T x (|S1|+1)
  Mat p2;  // T x |S2|
};

struct NsdlLossConfig {
  double lambda = 1.0;            // task ratio for L2
  double weight_nonspeech = 0.9;  // class weight inside L2
  double weight_speech = 1.0;
  double eps = 1e-12;             // floor inside logs
};

Mat SoftmaxRows(const Mat &logits);

NsdlOutputs NsdlForward(const NsdlHeads &heads, const Mat &hidden);

// P(non-speech) per frame: the complement of the speech placeholder.
Vec NonspeechProb(const NsdlOutputs &outputs);

// b_t = 1 iff y_t is a speech state.
std::vector<uint8_t> BuildSpeechMask(const std::vector<int> &alignment,
                                     const StateInventory &inventory);

// Binary speech/non-speech cross entropy summed over eligible frames.
// frame_mask (optional) marks loss-eligible frames; dlogits1 (optional)
// accumulates the gradient of the summed loss w.r.t. head1 logits.
double LossL1(const NsdlOutputs &outputs, const std::vector<uint8_t> &speech_mask,
              const std::vector<uint8_t> *frame_mask, double eps, Mat *dlogits1);

// Full distribution over all states: p1 on S1, p1(speech) * p2 on S2.
Mat CombineDistribution(const NsdlOutputs &outputs,
                        const StateInventory &inventory);

// Class-weighted cross entropy over the combined distribution (sum).
double LossL2(const NsdlOutputs &outputs, const std::vector<int> &alignment,
              const StateInventory &inventory, const NsdlLossConfig &config,
              const std::vector<uint8_t> *frame_mask, Mat *dlogits1,
              Mat *dlogits2);

struct NsdlLossBreakdown {
  double total = 0.0;  // L1 + lambda * L2, summed over eligible frames
  double l1 = 0.0;
  double l2 = 0.0;
  int eligible_frames = 0;
};

NsdlLossBreakdown LossNsdl(const NsdlOutputs &outputs,
                           const std::vector<int> &alignment,
                           const StateInventory &inventory,
                           const NsdlLossConfig &config,
                           const std::vector<uint8_t> *frame_mask,
                           Mat *dlogits1, Mat *dlogits2);

// Single-softmax cross entropy over all states (the non-NSDL baseline).
double CeBaselineLoss(const Mat &logits, const std::vector<int> &alignment,
                      const StateInventory &inventory,
                      const std::vector<uint8_t> *frame_mask, double eps,
                      Mat *dlogits);

int CountEligibleFrames(int total, const std::vector<uint8_t> *frame_mask);

}  // namespace asrlab

#endif  // ASRLAB_NSDL_HH_
