// asrlab/nnet.hh

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

#ifndef ASRLAB_NNET_HH_
#define ASRLAB_NNET_HH_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "asrlab/common.hh"
#include "asrlab/matrix.hh"

namespace asrlab {

// ---------------------------------------------------------------------------
// Parameter containers

struct LinearParams {
  Mat w;  // out x in
  Vec b;
  void Init(int out_dim, int in_dim, Rng *rng);
  int OutDim() const { return static_cast<int>(w.rows()); }
  int InDim() const { return static_cast<int>(w.cols()); }
};

struct LinearGrads {
  Mat dw;
  Vec db;
  void InitZero(const LinearParams &p);
};

Mat LinearForward(const LinearParams &p, const Mat &x);
// dx may be null when input gradients are not needed.
void LinearBackward(const LinearParams &p, const Mat &x, const Mat &dy,
                    LinearGrads *g, Mat *dx);

// Gate packing order within the 4H axis: input, forget, cell, output.
struct LstmParams {
  Mat wx;  // 4H x in
  Mat wh;  // 4H x H
  Vec b;   // 4H, forget-gate slice initialized to +1
  void Init(int in_dim, int hidden, Rng *rng);
  int Hidden() const { return static_cast<int>(wh.cols()); }
};

struct LstmGrads {
  Mat dwx, dwh;
  Vec db;
  void InitZero(const LstmParams &p);
};

struct BatchNormParams {
  Vec gamma, beta, running_mean, running_var;
  void Init(int dim);
  int Dim() const { return static_cast<int>(gamma.size()); }
};

struct BatchNormGrads {
  Vec dgamma, dbeta;
  void InitZero(const BatchNormParams &p);
};

// ---------------------------------------------------------------------------
// BLSTM trunk

struct BlstmConfig {
  int num_blocks = 4;
  int hidden = 48;  // per direction (paper scale: 512)
  int input_dim = 160;
  double dropout = 0.3;
  bool batch_norm = true;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;

  int OutputDim() const { return 2 * hidden; }
  std::string Serialize() const;
};

struct BlstmBlockParams {
  LstmParams fwd, bwd;
  BatchNormParams bn;
};

struct TrunkParams {
  std::vector<BlstmBlockParams> blocks;
  void Init(const BlstmConfig &config, Rng *rng);
};

struct TrunkGrads {
  struct Block {
    LstmGrads fwd, bwd;
    BatchNormGrads bn;
  };
  std::vector<Block> blocks;
  void InitZero(const TrunkParams &p);
};

// Initial / final recurrent state, one vector per block and direction.
struct TrunkState {
  std::vector<Vec> fwd_h, fwd_c, bwd_h, bwd_c;
  bool Empty() const { return fwd_h.empty(); }
};

// Joint wiring is the supervised BLSTM: each block reads the concatenated
// bidirectional output of the block below.  Split wiring keeps the two
// directions in separate towers (forward blocks read only forward outputs),
// which is what keeps each pretraining path blind to its reverse context.
enum class Wiring { kJoint, kSplit };

struct TrunkOptions {
  bool training = false;  // batch-stat normalization + dropout
  Wiring wiring = Wiring::kJoint;
  bool update_running_stats = false;
  double dropout = 0.0;
  uint64_t dropout_seed = 0;
  const TrunkState *initial = nullptr;
  TrunkState *final_state = nullptr;  // filled when non-null
};

struct LstmCache {
  Mat input;  // T x in_used (the consumed slice)
  Mat gates;  // T x 4H, post-nonlinearity
  Mat cells;  // T x H
  Mat outs;   // T x H
  Mat hprev;  // T x H, previous-step output per time row
  Mat cprev;  // T x H
  bool reverse = false;
  int col_offset = 0;  // columns of wx consumed
};

struct BnCache {
  Mat xhat;
  Vec invstd;
  bool batch_stats = false;
};

struct BlockCache {
  LstmCache fwd, bwd;
  BnCache bn;
  Mat drop_mask;  // empty when dropout off
  Mat out;
};

struct TrunkCache {
  Mat input;
  std::vector<BlockCache> blocks;
  bool training = false;
  Wiring wiring = Wiring::kJoint;
  bool batch_norm = false;
  double dropout = 0.0;
};

// Runs the stack on a T x input_dim sequence and returns T x 2H activations.
// Throws NumericError (naming block and frame) on non-finite activations.
// Mutates only the running statistics, and only when requested.
Mat TrunkForward(TrunkParams *params, const BlstmConfig &config,
                 const Mat &input, const TrunkOptions &opts,
                 TrunkCache *cache);

// Exact reverse-mode gradients of the recorded forward; d_input is optional.
void TrunkBackward(const TrunkParams &params, const BlstmConfig &config,
                   const TrunkCache &cache, const Mat &d_out,
                   TrunkGrads *grads, Mat *d_input = nullptr);

// Low-level single-direction pieces (used by the trunk and the LM).
void LstmForward(const LstmParams &p, const Mat &x, int col_offset,
                 bool reverse, const Vec *h0, const Vec *c0, LstmCache *cache);
void LstmBackward(const LstmParams &p, const LstmCache &cache, const Mat &dh,
                  LstmGrads *g, Mat *dx);

enum class BnMode { kBatch, kRunning };
void BatchNormForward(BatchNormParams *p, const Mat &x, BnMode mode,
                      bool update_running, double momentum, double eps,
                      Mat *y, BnCache *cache);
void BatchNormBackward(const BatchNormParams &p, const BnCache &cache,
                       const Mat &dy, BatchNormGrads *g, Mat *dx);

Mat DropoutMask(int rows, int cols, double rate, uint64_t seed);

// ---------------------------------------------------------------------------
// Named tensor plumbing: checkpoints, optimizer, gradient checking

struct TensorRef {
  std::string name;
  Mat *mat = nullptr;
  Vec *vec = nullptr;

  TensorRef(std::string n, Mat *m) : name(std::move(n)), mat(m) {}
  TensorRef(std::string n, Vec *v) : name(std::move(n)), vec(v) {}
  int64_t Size() const;
  int Rows() const;
  int Cols() const;
  double *Data();
  const double *Data() const;
};

// All tensors (checkpoint view) and the trainable subset (optimizer view);
// running statistics are saved but never updated by the optimizer.
std::vector<TensorRef> TrunkTensors(TrunkParams *p,
                                    const std::string &prefix = "trunk");
std::vector<TensorRef> TrunkTrainableTensors(TrunkParams *p,
                                             const std::string &prefix = "trunk");
std::vector<TensorRef> TrunkGradTensors(TrunkGrads *g,
                                        const std::string &prefix = "trunk");
std::vector<TensorRef> LinearTensors(LinearParams *p, const std::string &prefix);
std::vector<TensorRef> LinearGradTensors(LinearGrads *g, const std::string &prefix);

void AppendTensors(std::vector<TensorRef> *dst, std::vector<TensorRef> more);

struct Checkpoint {
  std::string stage;
  std::string config_digest;
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, Mat>> tensors;

  const Mat *Find(const std::string &name) const;
};

void SaveCheckpoint(const std::string &path, const std::string &stage,
                    const std::string &config_digest,
                    const std::map<std::string, std::string> &meta,
                    const std::vector<TensorRef> &tensors);
Checkpoint LoadCheckpoint(const std::string &path);
// Copies checkpoint tensors into refs by name; a missing name or shape
// mismatch is a ConfigError naming the offending tensor.
void AssignTensors(const Checkpoint &ckpt, const std::vector<TensorRef> &refs);

struct SgdOptions {
  double lr = 0.05;
  double momentum = 0.9;
  double clip_norm = 5.0;
};

struct SgdState {
  std::map<std::string, Vec> velocity;
};

struct SgdStepInfo {
  double grad_norm = 0.0;
  double clip_scale = 1.0;
  bool skipped = false;  // non-finite gradient
};

// Global-norm clipping, then v <- mu v + g, p <- p - lr v.
SgdStepInfo SgdStep(const std::vector<TensorRef> &params,
                    const std::vector<TensorRef> &grads, SgdState *state,
                    const SgdOptions &opts);

struct GradCheckOptions {
  int probes = 200;
  double step = 1e-3;
  double tolerance = 1e-4;
  uint64_t seed = 1;
};

struct GradCheckFailure {
  std::string tensor;
  int64_t index = 0;
  double analytic = 0.0, numeric = 0.0, rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  int probes_run = 0;
  std::vector<GradCheckFailure> failures;
};

// Central finite differences against precomputed analytic gradients.
// loss_fn must be a pure function of the referenced parameters; it is
// evaluated twice up front and a mismatch is a contract error.
GradCheckReport GradCheck(const std::function<double()> &loss_fn,
                          const std::vector<TensorRef> &params,
                          const std::vector<TensorRef> &grads,
                          const GradCheckOptions &opts);

}  // namespace asrlab

#endif  // ASRLAB_NNET_HH_
