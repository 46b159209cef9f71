// asrlab/decoder.hh

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

#ifndef ASRLAB_DECODER_HH_
#define ASRLAB_DECODER_HH_

#include <string>
#include <vector>

#include "asrlab/lm.hh"
#include "asrlab/matrix.hh"
#include "asrlab/state-inventory.hh"

namespace asrlab {

// Pronunciations over an indexed phone set; phone p owns the three
// consecutive HMM states starting at inventory.num_nonspeech + 3p.
struct Lexicon {
  std::vector<std::string> phone_names;
  std::vector<std::string> words;
  std::vector<std::vector<int>> word_phones;

  int WordId(const std::string &word) const;  // -1 when unknown
  int NumPhones() const { return static_cast<int>(phone_names.size()); }
  void Validate(const StateInventory &inventory) const;
};

void SaveLexicon(const std::string &path, const Lexicon &lexicon);
Lexicon LoadLexicon(const std::string &path);

struct GraphOptions {
  double self_loop_prob = 0.6;      // speech states
  double ns_self_loop_prob = 0.88;  // non-speech states
  double ns_switch_prob = 0.3;      // staying inside the cluster on exit
  bool allow_nonspeech_between_words = true;
  double ns_insertion_prob = 0.5;   // taking the non-speech detour
};

struct GraphArc {
  int to = -1;
  double weight = 0.0;  // log domain
  int word = -1;        // word emitted when entering its first state
};

struct StartArc {
  int node = -1;
  double weight = 0.0;
  int word = -1;
};

struct DecodingGraph {
  std::vector<int> node_state;               // emitting HMM state id per node
  std::vector<std::vector<GraphArc>> arcs;   // outgoing per node
  std::vector<StartArc> start_arcs;
  std::vector<double> final_weight;          // -inf when not final

  int NumNodes() const { return static_cast<int>(node_state.size()); }
  // Reachability and co-reachability; throws ContractError on violation.
  void Audit() const;
};

// Full bigram decode graph: 3-state left-to-right phone chains, LM weights
// on word-entry arcs, optional non-speech clusters at utterance boundaries
// and between words (one cluster per LM history).
DecodingGraph BuildDecodingGraph(const Lexicon &lexicon, const BigramLm &lm,
                                 const StateInventory &inventory,
                                 const GraphOptions &opts);

// Linear graph for a fixed transcript (with optional non-speech gaps).  LM
// weights are included when lm is non-null so that constrained scores stay
// comparable to (and never exceed) free-decode scores.
DecodingGraph BuildAlignGraph(const Lexicon &lexicon,
                              const StateInventory &inventory,
                              const std::vector<std::string> &words,
                              const BigramLm *lm, const GraphOptions &opts);

// Hybrid acoustic score: scale * (log posterior - prior_scale * log prior).
struct AcousticScoring {
  double acoustic_scale = 1.0;
  double prior_scale = 1.0;
  const Vec *log_priors = nullptr;  // optional
};

struct DecodeResult {
  bool ok = false;
  std::vector<int> word_ids;
  std::vector<int> alignment;  // HMM state per frame
  double log_score = 0.0;      // acoustic + graph
  double acoustic_score = 0.0;
  double graph_score = 0.0;    // transitions + LM
};

// Exact max-sum dynamic program over the graph; no pruning.
DecodeResult ViterbiDecode(const DecodingGraph &graph, const Mat &log_post,
                           const AcousticScoring &scoring);

struct NbestHypothesis {
  std::vector<int> word_ids;
  double total_score = 0.0;
  double acoustic_score = 0.0;
  double graph_score = 0.0;  // transitions + first-pass LM
  std::vector<int> alignment;
};

struct NBestList {
  std::vector<NbestHypothesis> hyps;  // distinct word sequences, best first
};

// Exact top-N distinct word sequences via per-node token lists with
// word-history merging; hypothesis 1 equals the Viterbi result.
NBestList NbestDecode(const DecodingGraph &graph, const Mat &log_post,
                      const AcousticScoring &scoring, int n);

DecodeResult ForceAlign(const Lexicon &lexicon, const StateInventory &inventory,
                        const std::vector<std::string> &words,
                        const BigramLm *lm, const GraphOptions &opts,
                        const Mat &log_post, const AcousticScoring &scoring);

// Geometric mean of the decoded path's framewise posteriors, in [0,1].
// `posteriors` are probabilities (not logs).
double UtteranceConfidence(const std::vector<int> &alignment,
                           const Mat &posteriors);

struct WerCounts {
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;
  int ref_words = 0;

  int Edits() const { return substitutions + deletions + insertions; }
  double Percent() const {
    return ref_words > 0 ? 100.0 * Edits() / ref_words : 0.0;
  }
  WerCounts &operator+=(const WerCounts &o);
};

// Unit-cost Levenshtein alignment; ties prefer substitutions over
// insertion+deletion pairs.  Empty reference is a contract error.
WerCounts ScoreWer(const std::vector<std::string> &ref,
                   const std::vector<std::string> &hyp);

// Smoothed state priors from training alignments, as log probabilities.
Vec EstimateLogPriors(const std::vector<std::vector<int>> &alignments,
                      const StateInventory &inventory, double smoothing = 0.5);

}  // namespace asrlab

#endif  // ASRLAB_DECODER_HH_
