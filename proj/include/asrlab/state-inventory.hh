// asrlab/state-inventory.hh

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

#ifndef ASRLAB_STATE_INVENTORY_HH_
#define ASRLAB_STATE_INVENTORY_HH_

#include <string>

#include "asrlab/common.hh"

namespace asrlab {

// Partition of the acoustic model's output states.  Ids are dense:
// non-speech states occupy [0, num_nonspeech), speech states occupy
// [num_nonspeech, num_nonspeech + num_speech).  The two-head model adds a
// "speech" placeholder as the last class of its first head; the placeholder
// is not a state id.
struct StateInventory {
  int num_nonspeech = 0;
  int num_speech = 0;

  StateInventory() = default;
  StateInventory(int ns, int sp) : num_nonspeech(ns), num_speech(sp) {
    Require(ns > 0 && sp > 0, "StateInventory: both classes must be nonempty");
  }

  int NumStates() const { return num_nonspeech + num_speech; }
  bool IsValid(int state) const { return state >= 0 && state < NumStates(); }
  bool IsSpeech(int state) const {
    Require(IsValid(state), StrCat("state id out of range: ", state));
    return state >= num_nonspeech;
  }
  // Index of a speech state within the speech-only head, in [0, num_speech).
  int SpeechIndex(int state) const {
    Require(IsSpeech(state), "SpeechIndex: not a speech state");
    return state - num_nonspeech;
  }
  // Class count of the first head: all non-speech states plus the placeholder.
  int Head1Dim() const { return num_nonspeech + 1; }

  std::string Serialize() const {
    return StrCat("nonspeech ", num_nonspeech, "\nspeech ", num_speech, "\n");
  }
  static StateInventory Deserialize(const std::string &text);
};

}  // namespace asrlab

#endif  // ASRLAB_STATE_INVENTORY_HH_
