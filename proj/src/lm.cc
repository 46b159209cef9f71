// asrlab/lm.cc

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

#include "asrlab/lm.hh"

#include <cmath>
#include <map>

#include "asrlab/common.hh"

namespace asrlab {

BigramLm BigramLm::Train(const std::vector<std::vector<std::string>> &sentences,
                         const std::vector<std::string> &vocab,
                         double discount) {
  if (vocab.empty()) throw ConfigError("bigram vocabulary is empty");
  if (discount <= 0.0 || discount >= 1.0)
    throw ConfigError("absolute discount must be in (0,1)");
  BigramLm lm;
  lm.vocab_ = vocab;
  std::map<std::string, int> ids;
  for (size_t i = 0; i < vocab.size(); ++i) ids[vocab[i]] = static_cast<int>(i);

  const int V = static_cast<int>(vocab.size());
  const int num_hist = V + 1;    // <s> + every word
  const int num_targets = V + 1; // every word + </s>
  Mat counts = Mat::Zero(num_hist, num_targets);
  Vec unigram_counts = Vec::Zero(num_targets);

  for (const auto &sent : sentences) {
    int hist = 0;  // <s>
    for (const auto &w : sent) {
      auto it = ids.find(w);
      if (it == ids.end()) throw InputError("LM training word not in vocabulary: " + w);
      counts(hist, it->second) += 1.0;
      unigram_counts(it->second) += 1.0;
      hist = it->second + 1;
    }
    counts(hist, V) += 1.0;  // </s>
    unigram_counts(V) += 1.0;
  }

  const double total = unigram_counts.sum();
  Require(total > 0, "bigram training needs at least one sentence");
  int observed_targets = 0;
  for (int t = 0; t < num_targets; ++t)
    if (unigram_counts(t) > 0) ++observed_targets;
  // discounted unigram with uniform redistribution of the held-out mass
  Vec unigram(num_targets);
  for (int t = 0; t < num_targets; ++t)
    unigram(t) = (std::max(unigram_counts(t) - discount, 0.0) +
                  discount * observed_targets / num_targets) /
                 total;

  lm.logprob_.resize(num_hist, num_targets);
  for (int h = 0; h < num_hist; ++h) {
    const double hist_count = counts.row(h).sum();
    if (hist_count <= 0) {
      for (int t = 0; t < num_targets; ++t)
        lm.logprob_(h, t) = std::log(unigram(t));
      continue;
    }
    int seen = 0;
    for (int t = 0; t < num_targets; ++t)
      if (counts(h, t) > 0) ++seen;
    for (int t = 0; t < num_targets; ++t) {
      const double p = (std::max(counts(h, t) - discount, 0.0) +
                        discount * seen * unigram(t)) /
                       hist_count;
      lm.logprob_(h, t) = std::log(p);
    }
  }
  return lm;
}

int BigramLm::WordId(const std::string &word) const {
  for (size_t i = 0; i < vocab_.size(); ++i)
    if (vocab_[i] == word) return static_cast<int>(i);
  return -1;
}

double BigramLm::LogProb(int prev, int next) const {
  const int V = NumWords();
  Require(prev >= -1 && prev < V, "bad history id");
  Require(next >= -1 && next < V, "bad target id");
  const int h = prev + 1;
  const int t = next < 0 ? V : next;
  return logprob_(h, t);
}

double BigramLm::SentenceLogProb(const std::vector<std::string> &words) const {
  double acc = 0.0;
  int prev = -1;
  for (const auto &w : words) {
    int id = WordId(w);
    if (id < 0) throw InputError("sentence word not in vocabulary: " + w);
    acc += LogProb(prev, id);
    prev = id;
  }
  return acc + LogProb(prev, -1);
}

}  // namespace asrlab
