// asrlab/decoder.cc

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

#include "asrlab/decoder.hh"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "asrlab/common.hh"

namespace asrlab {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();
constexpr int kNumNs = 3;  // non-speech states 0..2

int PhoneStateBase(const StateInventory &inv, int phone) {
  return inv.num_nonspeech + 3 * phone;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lexicon

int Lexicon::WordId(const std::string &word) const {
  for (size_t i = 0; i < words.size(); ++i)
    if (words[i] == word) return static_cast<int>(i);
  return -1;
}

void Lexicon::Validate(const StateInventory &inventory) const {
  Require(!words.empty(), "lexicon has no words");
  Require(words.size() == word_phones.size(), "lexicon table mismatch");
  for (size_t w = 0; w < words.size(); ++w) {
    if (word_phones[w].empty())
      throw ConfigError("empty pronunciation for word " + words[w]);
    for (int p : word_phones[w]) {
      if (p < 0 || p >= NumPhones())
        throw ConfigError(StrCat("word ", words[w], " uses unknown phone ", p));
      const int last_state = PhoneStateBase(inventory, p) + 2;
      if (last_state >= inventory.NumStates())
        throw ConfigError(StrCat("phone ", p, " exceeds the state inventory"));
    }
  }
}

void SaveLexicon(const std::string &path, const Lexicon &lexicon) {
  std::ostringstream os;
  os << "#phones";
  for (const auto &p : lexicon.phone_names) os << '\t' << p;
  os << '\n';
  for (size_t w = 0; w < lexicon.words.size(); ++w) {
    os << lexicon.words[w];
    for (int p : lexicon.word_phones[w]) os << '\t' << lexicon.phone_names.at(p);
    os << '\n';
  }
  WriteTextFile(path, os.str());
}

Lexicon LoadLexicon(const std::string &path) {
  Lexicon lex;
  std::istringstream is(ReadTextFile(path));
  std::string line;
  std::map<std::string, int> phone_ids;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = SplitString(line, '\t');
    if (fields[0] == "#phones") {
      for (size_t i = 1; i < fields.size(); ++i) {
        phone_ids[fields[i]] = static_cast<int>(lex.phone_names.size());
        lex.phone_names.push_back(fields[i]);
      }
      continue;
    }
    if (fields.size() < 2) throw InputError("bad lexicon line: " + line);
    lex.words.push_back(fields[0]);
    std::vector<int> phones;
    for (size_t i = 1; i < fields.size(); ++i) {
      auto it = phone_ids.find(fields[i]);
      if (it == phone_ids.end())
        throw InputError("lexicon uses undeclared phone: " + fields[i]);
      phones.push_back(it->second);
    }
    lex.word_phones.push_back(std::move(phones));
  }
  if (lex.words.empty()) throw InputError("empty lexicon: " + path);
  return lex;
}

// ---------------------------------------------------------------------------
// Graph construction

namespace {

class GraphBuilder {
 public:
  explicit GraphBuilder(const GraphOptions &opts) : opts_(opts) {}

  int AddNode(int state) {
    g_.node_state.push_back(state);
    g_.arcs.emplace_back();
    g_.final_weight.push_back(kLogZero);
    return g_.NumNodes() - 1;
  }

  void AddArc(int from, int to, double weight, int word = -1) {
    g_.arcs[from].push_back({to, weight, word});
  }

  void AddStart(int node, double weight, int word = -1) {
    g_.start_arcs.push_back({node, weight, word});
  }

  void AddFinal(int node, double weight) {
    double &fw = g_.final_weight[node];
    fw = fw == kLogZero ? weight : std::max(fw, weight);
  }

  // 3-state left-to-right chain for a word; returns (first, last).
  std::pair<int, int> AddWordChain(const Lexicon &lex,
                                   const StateInventory &inv, int word) {
    const double loop = std::log(opts_.self_loop_prob);
    const double step = std::log(1.0 - opts_.self_loop_prob);
    int first = -1, prev = -1;
    for (int p : lex.word_phones[word]) {
      for (int k = 0; k < 3; ++k) {
        int node = AddNode(PhoneStateBase(inv, p) + k);
        AddArc(node, node, loop);
        if (prev >= 0) AddArc(prev, node, step);
        if (first < 0) first = node;
        prev = node;
      }
    }
    return {first, prev};
  }

  // Ergodic 3-node non-speech cluster; returns the node ids.  ExitMass() of
  // each node is reserved for the caller's outgoing arcs.
  std::vector<int> AddNsCluster() {
    const double loop = std::log(opts_.ns_self_loop_prob);
    const double switch_w = std::log((1.0 - opts_.ns_self_loop_prob) *
                                     opts_.ns_switch_prob / (kNumNs - 1));
    std::vector<int> nodes;
    for (int i = 0; i < kNumNs; ++i) nodes.push_back(AddNode(i));
    for (int i = 0; i < kNumNs; ++i) {
      AddArc(nodes[i], nodes[i], loop);
      for (int j = 0; j < kNumNs; ++j)
        if (j != i) AddArc(nodes[i], nodes[j], switch_w);
    }
    return nodes;
  }

  double ExitMass() const {
    return (1.0 - opts_.ns_self_loop_prob) * (1.0 - opts_.ns_switch_prob);
  }

  double WordExitMass() const { return 1.0 - opts_.self_loop_prob; }

  DecodingGraph Take() { return std::move(g_); }

 private:
  const GraphOptions &opts_;
  DecodingGraph g_;
};

}  // namespace

DecodingGraph BuildDecodingGraph(const Lexicon &lexicon, const BigramLm &lm,
                                 const StateInventory &inventory,
                                 const GraphOptions &opts) {
  lexicon.Validate(inventory);
  if (lm.NumWords() != static_cast<int>(lexicon.words.size()))
    throw ConfigError(StrCat("LM vocabulary (", lm.NumWords(),
                             ") does not match lexicon (",
                             lexicon.words.size(), ")"));
  for (size_t w = 0; w < lexicon.words.size(); ++w)
    if (lm.WordId(lexicon.words[w]) != static_cast<int>(w))
      throw ConfigError("LM vocabulary order differs from lexicon: " +
                        lexicon.words[w]);

  GraphBuilder gb(opts);
  const int V = static_cast<int>(lexicon.words.size());
  std::vector<int> first(V), last(V);
  for (int w = 0; w < V; ++w) {
    auto [f, l] = gb.AddWordChain(lexicon, inventory, w);
    first[w] = f;
    last[w] = l;
  }

  const double ins = opts.ns_insertion_prob;
  const double log_ins_entry = std::log(ins / kNumNs);
  const double log_direct = std::log(1.0 - ins);
  const double exit_mass = gb.ExitMass();
  const bool between = opts.allow_nonspeech_between_words;

  // sentence-begin cluster: leading non-speech before the first word
  auto begin_cluster = gb.AddNsCluster();
  for (int w = 0; w < V; ++w)
    gb.AddStart(first[w], log_direct + lm.LogProb(-1, w), w);
  for (int node : begin_cluster) gb.AddStart(node, log_ins_entry);
  for (int node : begin_cluster) {
    for (int w = 0; w < V; ++w)
      gb.AddArc(node, first[w], std::log(exit_mass) + lm.LogProb(-1, w), w);
    gb.AddFinal(node, std::log(exit_mass) + lm.LogProb(-1, -1));
  }

  // per-history clusters: trailing non-speech and optional between-word gaps
  for (int w = 0; w < V; ++w) {
    const double leave = std::log(gb.WordExitMass());
    auto cluster = gb.AddNsCluster();
    for (int node : cluster) gb.AddArc(last[w], node, leave + log_ins_entry);
    for (int w2 = 0; w2 < V; ++w2)
      gb.AddArc(last[w], first[w2], leave + log_direct + lm.LogProb(w, w2), w2);
    gb.AddFinal(last[w], leave + log_direct + lm.LogProb(w, -1));
    for (int node : cluster) {
      if (between)
        for (int w2 = 0; w2 < V; ++w2)
          gb.AddArc(node, first[w2], std::log(exit_mass) + lm.LogProb(w, w2), w2);
      gb.AddFinal(node, std::log(exit_mass) + lm.LogProb(w, -1));
    }
  }

  DecodingGraph g = gb.Take();
  g.Audit();
  return g;
}

DecodingGraph BuildAlignGraph(const Lexicon &lexicon,
                              const StateInventory &inventory,
                              const std::vector<std::string> &words,
                              const BigramLm *lm, const GraphOptions &opts) {
  lexicon.Validate(inventory);
  std::vector<int> ids;
  for (const auto &w : words) {
    int id = lexicon.WordId(w);
    if (id < 0) throw InputError("transcript word not in lexicon: " + w);
    ids.push_back(id);
  }

  GraphBuilder gb(opts);
  const double ins = opts.ns_insertion_prob;
  const double log_ins_entry = std::log(ins / kNumNs);
  const double log_direct = std::log(1.0 - ins);
  const double log_exit = std::log(gb.ExitMass());
  auto lm_prob = [&](int prev, int next) {
    return lm ? lm->LogProb(prev < 0 ? -1 : prev,
                            next < 0 ? -1 : next)
              : 0.0;
  };

  if (ids.empty()) {
    auto cluster = gb.AddNsCluster();
    for (int node : cluster) gb.AddStart(node, log_ins_entry);
    for (int node : cluster) gb.AddFinal(node, log_exit + lm_prob(-1, -1));
    DecodingGraph g = gb.Take();
    g.Audit();
    return g;
  }

  std::vector<int> first(ids.size()), last(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    auto [f, l] = gb.AddWordChain(lexicon, inventory, ids[i]);
    first[i] = f;
    last[i] = l;
  }

  // leading gap
  auto begin_cluster = gb.AddNsCluster();
  gb.AddStart(first[0], log_direct + lm_prob(-1, ids[0]), ids[0]);
  for (int node : begin_cluster) gb.AddStart(node, log_ins_entry);
  for (int node : begin_cluster)
    gb.AddArc(node, first[0], log_exit + lm_prob(-1, ids[0]), ids[0]);

  for (size_t i = 0; i < ids.size(); ++i) {
    const double leave = std::log(gb.WordExitMass());
    const bool is_last = i + 1 == ids.size();
    auto cluster = gb.AddNsCluster();
    for (int node : cluster) gb.AddArc(last[i], node, leave + log_ins_entry);
    if (is_last) {
      gb.AddFinal(last[i], leave + log_direct + lm_prob(ids[i], -1));
      for (int node : cluster) gb.AddFinal(node, log_exit + lm_prob(ids[i], -1));
    } else {
      const double w_lm = lm_prob(ids[i], ids[i + 1]);
      gb.AddArc(last[i], first[i + 1], leave + log_direct + w_lm, ids[i + 1]);
      for (int node : cluster)
        gb.AddArc(node, first[i + 1], log_exit + w_lm, ids[i + 1]);
    }
  }
  DecodingGraph g = gb.Take();
  g.Audit();
  return g;
}

void DecodingGraph::Audit() const {
  const int n = NumNodes();
  Require(n > 0, "graph has no nodes");
  std::vector<char> reach(n, 0), coreach(n, 0);
  std::deque<int> queue;
  for (const auto &s : start_arcs)
    if (!reach[s.node]) {
      reach[s.node] = 1;
      queue.push_back(s.node);
    }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (const auto &a : arcs[v])
      if (!reach[a.to]) {
        reach[a.to] = 1;
        queue.push_back(a.to);
      }
  }
  std::vector<std::vector<int>> rev(n);
  for (int v = 0; v < n; ++v)
    for (const auto &a : arcs[v]) rev[a.to].push_back(v);
  for (int v = 0; v < n; ++v)
    if (final_weight[v] != kLogZero) {
      coreach[v] = 1;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : rev[v])
      if (!coreach[u]) {
        coreach[u] = 1;
        queue.push_back(u);
      }
  }
  for (int v = 0; v < n; ++v) {
    if (!reach[v]) throw ContractError(StrCat("graph node ", v, " unreachable"));
    if (!coreach[v])
      throw ContractError(StrCat("graph node ", v, " cannot reach a final node"));
  }
}

// ---------------------------------------------------------------------------
// Viterbi

namespace {

double AcScore(const Mat &log_post, const AcousticScoring &sc, int state, int t) {
  double v = log_post(t, state);
  if (sc.log_priors) v -= sc.prior_scale * (*sc.log_priors)(state);
  return sc.acoustic_scale * v;
}

}  // namespace

DecodeResult ViterbiDecode(const DecodingGraph &graph, const Mat &log_post,
                           const AcousticScoring &scoring) {
  const int T = static_cast<int>(log_post.rows());
  const int n = graph.NumNodes();
  Require(T >= 1, "decode needs at least one frame");
  Require(log_post.allFinite(), "non-finite posteriors");

  std::vector<double> score(n, kLogZero), next(n, kLogZero);
  std::vector<std::vector<int32_t>> bp_node(T, std::vector<int32_t>(n, -1));
  std::vector<std::vector<int32_t>> bp_word(T, std::vector<int32_t>(n, -1));

  for (const auto &s : graph.start_arcs) {
    const double cand = s.weight + AcScore(log_post, scoring, graph.node_state[s.node], 0);
    if (cand > score[s.node]) {
      score[s.node] = cand;
      bp_word[0][s.node] = s.word;
    }
  }
  for (int t = 1; t < T; ++t) {
    std::fill(next.begin(), next.end(), kLogZero);
    for (int v = 0; v < n; ++v) {
      if (score[v] == kLogZero) continue;
      for (const auto &a : graph.arcs[v]) {
        const double cand =
            score[v] + a.weight +
            AcScore(log_post, scoring, graph.node_state[a.to], t);
        if (cand > next[a.to]) {
          next[a.to] = cand;
          bp_node[t][a.to] = v;
          bp_word[t][a.to] = a.word;
        }
      }
    }
    score.swap(next);
  }

  DecodeResult res;
  int best_node = -1;
  double best = kLogZero;
  for (int v = 0; v < n; ++v) {
    if (score[v] == kLogZero || graph.final_weight[v] == kLogZero) continue;
    const double cand = score[v] + graph.final_weight[v];
    if (cand > best) {
      best = cand;
      best_node = v;
    }
  }
  if (best_node < 0) return res;  // decode failure, reported by the caller

  res.ok = true;
  res.log_score = best;
  res.alignment.resize(T);
  int v = best_node;
  for (int t = T - 1; t >= 0; --t) {
    res.alignment[t] = graph.node_state[v];
    res.acoustic_score += AcScore(log_post, scoring, graph.node_state[v], t);
    const int w = bp_word[t][v];
    if (w >= 0) res.word_ids.push_back(w);
    v = t > 0 ? bp_node[t][v] : -1;
  }
  std::reverse(res.word_ids.begin(), res.word_ids.end());
  res.graph_score = res.log_score - res.acoustic_score;
  return res;
}

// ---------------------------------------------------------------------------
// N-best

namespace {

struct WordSeq {
  int word;
  std::shared_ptr<const WordSeq> prev;
  uint64_t hash;
  int length;
};
using WordSeqPtr = std::shared_ptr<const WordSeq>;

uint64_t SeqHash(const WordSeqPtr &p) {
  return p ? p->hash : 0x9e3779b97f4a7c15ull;
}
int SeqLen(const WordSeqPtr &p) { return p ? p->length : 0; }

WordSeqPtr SeqPush(const WordSeqPtr &p, int word) {
  return std::make_shared<const WordSeq>(WordSeq{
      word, p, HashMix(SeqHash(p), static_cast<uint64_t>(word) + 1), SeqLen(p) + 1});
}

bool SeqEqual(const WordSeqPtr &a, const WordSeqPtr &b) {
  if (SeqHash(a) != SeqHash(b) || SeqLen(a) != SeqLen(b)) return false;
  const WordSeq *x = a.get(), *y = b.get();
  while (x && y) {
    if (x == y) return true;
    if (x->word != y->word) return false;
    x = x->prev.get();
    y = y->prev.get();
  }
  return x == y;
}

std::vector<int> SeqToVector(const WordSeqPtr &p) {
  std::vector<int> out;
  for (const WordSeq *x = p.get(); x; x = x->prev.get()) out.push_back(x->word);
  std::reverse(out.begin(), out.end());
  return out;
}

struct Token {
  double total = kLogZero;
  double acoustic = 0.0;
  int node = -1;
  int parent = -1;  // flat index into the previous frame's token vector
  WordSeqPtr seq;
};

// Keeps at most `cap` tokens per node with pairwise-distinct word sequences.
void InsertToken(std::vector<Token> *bucket, Token tok, int cap) {
  for (auto &existing : *bucket) {
    if (SeqEqual(existing.seq, tok.seq)) {
      if (tok.total > existing.total) existing = std::move(tok);
      return;
    }
  }
  bucket->push_back(std::move(tok));
  std::sort(bucket->begin(), bucket->end(),
            [](const Token &a, const Token &b) { return a.total > b.total; });
  if (static_cast<int>(bucket->size()) > cap) bucket->resize(cap);
}

}  // namespace

NBestList NbestDecode(const DecodingGraph &graph, const Mat &log_post,
                      const AcousticScoring &scoring, int nbest) {
  Require(nbest >= 1, "n-best size must be >= 1");
  const int T = static_cast<int>(log_post.rows());
  const int n = graph.NumNodes();
  Require(T >= 1, "decode needs at least one frame");

  // tokens per frame, flat; per-node buckets index into them per frame
  std::vector<std::vector<Token>> frame_tokens(T);
  std::vector<std::vector<Token>> buckets(n);

  for (const auto &s : graph.start_arcs) {
    Token tok;
    tok.node = s.node;
    tok.acoustic = AcScore(log_post, scoring, graph.node_state[s.node], 0);
    tok.total = s.weight + tok.acoustic;
    tok.seq = s.word >= 0 ? SeqPush(nullptr, s.word) : nullptr;
    InsertToken(&buckets[s.node], std::move(tok), nbest);
  }
  for (int v = 0; v < n; ++v)
    for (auto &tok : buckets[v]) frame_tokens[0].push_back(std::move(tok));

  for (int t = 1; t < T; ++t) {
    for (auto &b : buckets) b.clear();
    const auto &prev = frame_tokens[t - 1];
    for (int pi = 0; pi < static_cast<int>(prev.size()); ++pi) {
      const Token &src = prev[pi];
      for (const auto &a : graph.arcs[src.node]) {
        Token tok;
        tok.node = a.to;
        const double ac = AcScore(log_post, scoring, graph.node_state[a.to], t);
        tok.acoustic = src.acoustic + ac;
        tok.total = src.total + a.weight + ac;
        tok.parent = pi;
        tok.seq = a.word >= 0 ? SeqPush(src.seq, a.word) : src.seq;
        InsertToken(&buckets[a.to], std::move(tok), nbest);
      }
    }
    for (int v = 0; v < n; ++v)
      for (auto &tok : buckets[v]) frame_tokens[t].push_back(std::move(tok));
  }

  // collect final hypotheses, merged across nodes by word sequence
  std::vector<std::pair<Token, int>> finals;  // token (+final weight), flat idx
  const auto &last = frame_tokens[T - 1];
  for (int i = 0; i < static_cast<int>(last.size()); ++i) {
    const Token &tok = last[i];
    if (graph.final_weight[tok.node] == kLogZero) continue;
    Token f = tok;
    f.total += graph.final_weight[tok.node];
    bool merged = false;
    for (auto &[existing, idx] : finals) {
      if (SeqEqual(existing.seq, f.seq)) {
        if (f.total > existing.total) {
          existing = f;
          idx = i;
        }
        merged = true;
        break;
      }
    }
    if (!merged) finals.emplace_back(f, i);
  }
  std::sort(finals.begin(), finals.end(),
            [](const auto &a, const auto &b) { return a.first.total > b.first.total; });
  if (static_cast<int>(finals.size()) > nbest) finals.resize(nbest);

  NBestList list;
  for (const auto &[tok, flat_idx] : finals) {
    NbestHypothesis hyp;
    hyp.total_score = tok.total;
    hyp.acoustic_score = tok.acoustic;
    hyp.graph_score = tok.total - tok.acoustic;
    hyp.word_ids = SeqToVector(tok.seq);
    hyp.alignment.resize(T);
    int idx = flat_idx;
    for (int t = T - 1; t >= 0; --t) {
      const Token &cur = frame_tokens[t][idx];
      hyp.alignment[t] = graph.node_state[cur.node];
      idx = cur.parent;
    }
    list.hyps.push_back(std::move(hyp));
  }
  return list;
}

DecodeResult ForceAlign(const Lexicon &lexicon, const StateInventory &inventory,
                        const std::vector<std::string> &words,
                        const BigramLm *lm, const GraphOptions &opts,
                        const Mat &log_post, const AcousticScoring &scoring) {
  DecodingGraph graph = BuildAlignGraph(lexicon, inventory, words, lm, opts);
  return ViterbiDecode(graph, log_post, scoring);
}

double UtteranceConfidence(const std::vector<int> &alignment,
                           const Mat &posteriors) {
  Require(!alignment.empty(), "empty alignment");
  Require(static_cast<int>(alignment.size()) == posteriors.rows(),
          "alignment/posterior length mismatch");
  double acc = 0.0;
  for (size_t t = 0; t < alignment.size(); ++t)
    acc += std::log(std::max(posteriors(static_cast<int>(t), alignment[t]),
                             1e-300));
  return std::exp(acc / static_cast<double>(alignment.size()));
}

WerCounts &WerCounts::operator+=(const WerCounts &o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_words += o.ref_words;
  return *this;
}

WerCounts ScoreWer(const std::vector<std::string> &ref,
                   const std::vector<std::string> &hyp) {
  Require(!ref.empty(), "WER reference must be nonempty");
  const int R = static_cast<int>(ref.size());
  const int H = static_cast<int>(hyp.size());
  Mat dp(R + 1, H + 1);
  for (int i = 0; i <= R; ++i) dp(i, 0) = i;
  for (int j = 0; j <= H; ++j) dp(0, j) = j;
  for (int i = 1; i <= R; ++i)
    for (int j = 1; j <= H; ++j) {
      const double sub = dp(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const double del = dp(i - 1, j) + 1;
      const double ins = dp(i, j - 1) + 1;
      dp(i, j) = std::min({sub, del, ins});
    }

  WerCounts c;
  c.ref_words = R;
  int i = R, j = H;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        dp(i, j) == dp(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++c.substitutions;  // diagonal preferred
      --i;
      --j;
    } else if (i > 0 && dp(i, j) == dp(i - 1, j) + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

Vec EstimateLogPriors(const std::vector<std::vector<int>> &alignments,
                      const StateInventory &inventory, double smoothing) {
  Vec counts = Vec::Constant(inventory.NumStates(), smoothing);
  for (const auto &ali : alignments)
    for (int s : ali) {
      Require(inventory.IsValid(s), StrCat("prior state ", s, " out of range"));
      counts(s) += 1.0;
    }
  const double total = counts.sum();
  return (counts / total).array().log().matrix();
}

}  // namespace asrlab
