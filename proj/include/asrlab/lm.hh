// asrlab/lm.hh

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

#ifndef ASRLAB_LM_HH_
#define ASRLAB_LM_HH_

#include <string>
#include <vector>

#include "asrlab/matrix.hh"

namespace asrlab {

// Count-based bigram with absolute discounting backing off to a discounted
// unigram over the fixed decode vocabulary.  Next-word distributions sum to
// one for every history, including unseen ones.
class BigramLm {
 public:
  // vocab is the decode vocabulary (lexicon words); sentences may only use
  // words from it.  Sentence-begin/end are implicit.
  static BigramLm Train(const std::vector<std::vector<std::string>> &sentences,
                        const std::vector<std::string> &vocab,
                        double discount = 0.4);

  int NumWords() const { return static_cast<int>(vocab_.size()); }
  const std::vector<std::string> &Vocab() const { return vocab_; }
  int WordId(const std::string &word) const;  // -1 when unknown

  // prev = -1 for sentence begin; next = -1 for sentence end.
  double LogProb(int prev, int next) const;

  double SentenceLogProb(const std::vector<std::string> &words) const;

 private:
  std::vector<std::string> vocab_;
  Mat logprob_;  // (V+1 histories) x (V+1 targets); row 0 = <s>, col V = </s>
};

}  // namespace asrlab

#endif  // ASRLAB_LM_HH_
