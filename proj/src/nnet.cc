// asrlab/nnet.cc

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

#include "asrlab/nnet.hh"

#include <cmath>
#include <cstring>
#include <fstream>

namespace asrlab {

namespace {

using RowVec = Eigen::RowVectorXd;
using RowArr = Eigen::Array<double, 1, Eigen::Dynamic>;

RowArr Sigmoid(const RowArr &x) { return 1.0 / (1.0 + (-x).exp()); }

double UniformInitScale(int fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); }

void FillUniform(Mat *m, double scale, Rng *rng) {
  for (int r = 0; r < m->rows(); ++r)
    for (int c = 0; c < m->cols(); ++c) (*m)(r, c) = rng->Uniform(-scale, scale);
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear

void LinearParams::Init(int out_dim, int in_dim, Rng *rng) {
  w.resize(out_dim, in_dim);
  FillUniform(&w, UniformInitScale(in_dim), rng);
  b = Vec::Zero(out_dim);
}

void LinearGrads::InitZero(const LinearParams &p) {
  dw = Mat::Zero(p.w.rows(), p.w.cols());
  db = Vec::Zero(p.b.size());
}

Mat LinearForward(const LinearParams &p, const Mat &x) {
  Require(x.cols() == p.w.cols(),
          StrCat("linear input dim ", x.cols(), " != ", p.w.cols()));
  Mat y = x * p.w.transpose();
  y.rowwise() += p.b.transpose();
  return y;
}

void LinearBackward(const LinearParams &p, const Mat &x, const Mat &dy,
                    LinearGrads *g, Mat *dx) {
  g->dw += dy.transpose() * x;
  g->db += dy.colwise().sum().transpose();
  if (dx) *dx = dy * p.w;
}

// ---------------------------------------------------------------------------
// LSTM

void LstmParams::Init(int in_dim, int hidden, Rng *rng) {
  wx.resize(4 * hidden, in_dim);
  wh.resize(4 * hidden, hidden);
  FillUniform(&wx, UniformInitScale(in_dim), rng);
  FillUniform(&wh, UniformInitScale(hidden), rng);
  b = Vec::Zero(4 * hidden);
  b.segment(hidden, hidden).setOnes();  // forget-gate bias
}

void LstmGrads::InitZero(const LstmParams &p) {
  dwx = Mat::Zero(p.wx.rows(), p.wx.cols());
  dwh = Mat::Zero(p.wh.rows(), p.wh.cols());
  db = Vec::Zero(p.b.size());
}

void LstmForward(const LstmParams &p, const Mat &x, int col_offset,
                 bool reverse, const Vec *h0, const Vec *c0, LstmCache *cache) {
  const int T = static_cast<int>(x.rows());
  const int H = p.Hidden();
  const int in_used = static_cast<int>(x.cols());
  Require(col_offset >= 0 && col_offset + in_used <= p.wx.cols(),
          "LstmForward: input slice exceeds wx columns");
  cache->input = x;
  cache->reverse = reverse;
  cache->col_offset = col_offset;
  cache->gates.resize(T, 4 * H);
  cache->cells.resize(T, H);
  cache->outs.resize(T, H);
  cache->hprev.resize(T, H);
  cache->cprev.resize(T, H);

  const Mat xw = x * p.wx.middleCols(col_offset, in_used).transpose();
  RowVec h = h0 ? RowVec(h0->transpose()) : RowVec(RowVec::Zero(H));
  RowVec c = c0 ? RowVec(c0->transpose()) : RowVec(RowVec::Zero(H));
  Require(h.size() == H && c.size() == H, "initial state size mismatch");

  for (int k = 0; k < T; ++k) {
    const int t = reverse ? T - 1 - k : k;
    cache->hprev.row(t) = h;
    cache->cprev.row(t) = c;
    RowVec pre = xw.row(t) + h * p.wh.transpose() + p.b.transpose();
    RowArr gi = Sigmoid(pre.segment(0, H).array());
    RowArr gf = Sigmoid(pre.segment(H, H).array());
    RowArr gg = pre.segment(2 * H, H).array().tanh();
    RowArr go = Sigmoid(pre.segment(3 * H, H).array());
    RowArr cc = gf * c.array() + gi * gg;
    RowArr hh = go * cc.tanh();
    cache->gates.row(t).segment(0, H) = gi.matrix();
    cache->gates.row(t).segment(H, H) = gf.matrix();
    cache->gates.row(t).segment(2 * H, H) = gg.matrix();
    cache->gates.row(t).segment(3 * H, H) = go.matrix();
    c = cc.matrix();
    h = hh.matrix();
    cache->cells.row(t) = c;
    cache->outs.row(t) = h;
  }
}

void LstmBackward(const LstmParams &p, const LstmCache &cache, const Mat &dh_in,
                  LstmGrads *g, Mat *dx) {
  const int T = static_cast<int>(cache.outs.rows());
  const int H = p.Hidden();
  Mat dpre(T, 4 * H);
  RowArr dh_rec = RowArr::Zero(H);
  RowArr dc_rec = RowArr::Zero(H);

  for (int k = T - 1; k >= 0; --k) {
    const int t = cache.reverse ? T - 1 - k : k;
    const RowArr gi = cache.gates.row(t).segment(0, H).array();
    const RowArr gf = cache.gates.row(t).segment(H, H).array();
    const RowArr gg = cache.gates.row(t).segment(2 * H, H).array();
    const RowArr go = cache.gates.row(t).segment(3 * H, H).array();
    const RowArr tc = cache.cells.row(t).array().tanh();

    const RowArr dh = dh_in.row(t).array() + dh_rec;
    const RowArr dgo = dh * tc;
    const RowArr dc = dc_rec + dh * go * (1.0 - tc.square());
    const RowArr dgi = dc * gg;
    const RowArr dgf = dc * cache.cprev.row(t).array();
    const RowArr dgg = dc * gi;

    dpre.row(t).segment(0, H) = (dgi * gi * (1.0 - gi)).matrix();
    dpre.row(t).segment(H, H) = (dgf * gf * (1.0 - gf)).matrix();
    dpre.row(t).segment(2 * H, H) = (dgg * (1.0 - gg.square())).matrix();
    dpre.row(t).segment(3 * H, H) = (dgo * go * (1.0 - go)).matrix();

    dh_rec = (dpre.row(t) * p.wh).array();
    dc_rec = dc * gf;
  }

  g->dwx.middleCols(cache.col_offset, cache.input.cols()) +=
      dpre.transpose() * cache.input;
  g->dwh += dpre.transpose() * cache.hprev;
  g->db += dpre.colwise().sum().transpose();
  if (dx) *dx = dpre * p.wx.middleCols(cache.col_offset, cache.input.cols());
}

// ---------------------------------------------------------------------------
// Batch normalization (per feature over the time axis)

void BatchNormParams::Init(int dim) {
  gamma = Vec::Ones(dim);
  beta = Vec::Zero(dim);
  running_mean = Vec::Zero(dim);
  running_var = Vec::Ones(dim);
}

void BatchNormGrads::InitZero(const BatchNormParams &p) {
  dgamma = Vec::Zero(p.Dim());
  dbeta = Vec::Zero(p.Dim());
}

void BatchNormForward(BatchNormParams *p, const Mat &x, BnMode mode,
                      bool update_running, double momentum, double eps,
                      Mat *y, BnCache *cache) {
  const int W = static_cast<int>(x.cols());
  Require(p->Dim() == W, "batch-norm width mismatch");
  RowVec mean, var;
  if (mode == BnMode::kBatch) {
    mean = x.colwise().mean();
    var = (x.rowwise() - mean).array().square().colwise().mean();
  } else {
    mean = p->running_mean.transpose();
    var = p->running_var.transpose();
  }
  RowArr invstd = 1.0 / (var.array() + eps).sqrt();
  cache->xhat = ((x.rowwise() - mean).array().rowwise() * invstd).matrix();
  cache->invstd = invstd.transpose();
  cache->batch_stats = mode == BnMode::kBatch;
  *y = ((cache->xhat.array().rowwise() * p->gamma.transpose().array())
            .rowwise() +
        p->beta.transpose().array())
           .matrix();
  if (update_running) {
    RowVec bmean = x.colwise().mean();
    RowVec bvar = (x.rowwise() - bmean).array().square().colwise().mean();
    p->running_mean = (1.0 - momentum) * p->running_mean + momentum * bmean.transpose();
    p->running_var = (1.0 - momentum) * p->running_var + momentum * bvar.transpose();
  }
}

void BatchNormBackward(const BatchNormParams &p, const BnCache &cache,
                       const Mat &dy, BatchNormGrads *g, Mat *dx) {
  g->dgamma += (dy.array() * cache.xhat.array()).colwise().sum().matrix().transpose();
  g->dbeta += dy.colwise().sum().transpose();
  if (!dx) return;
  const RowArr scale = (p.gamma.array() * cache.invstd.array()).transpose();
  if (cache.batch_stats) {
    const RowArr mean_dy = dy.colwise().mean().array();
    const RowArr mean_dyxhat =
        (dy.array() * cache.xhat.array()).colwise().mean();
    *dx = (((dy.array().rowwise() - mean_dy) -
            cache.xhat.array().rowwise() * mean_dyxhat)
               .rowwise() *
           scale)
              .matrix();
  } else {
    *dx = (dy.array().rowwise() * scale).matrix();
  }
}

Mat DropoutMask(int rows, int cols, double rate, uint64_t seed) {
  Require(rate >= 0.0 && rate < 1.0, "dropout rate must be in [0,1)");
  Mat mask(rows, cols);
  Rng rng(seed);
  const double keep = 1.0 - rate;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      mask(r, c) = rng.Uniform(0.0, 1.0) < rate ? 0.0 : 1.0 / keep;
  return mask;
}

// ---------------------------------------------------------------------------
// Trunk

std::string BlstmConfig::Serialize() const {
  return StrCat("blocks=", num_blocks, " hidden=", hidden,
                " input=", input_dim, " dropout=", FormatFixed(dropout, 4),
                " bn=", batch_norm ? 1 : 0);
}

void TrunkParams::Init(const BlstmConfig &config, Rng *rng) {
  Require(config.num_blocks >= 1 && config.hidden > 0, "bad trunk config");
  Require(config.dropout >= 0.0 && config.dropout < 1.0, "bad dropout rate");
  blocks.resize(config.num_blocks);
  for (int b = 0; b < config.num_blocks; ++b) {
    const int in_dim = b == 0 ? config.input_dim : 2 * config.hidden;
    blocks[b].fwd.Init(in_dim, config.hidden, rng);
    blocks[b].bwd.Init(in_dim, config.hidden, rng);
    blocks[b].bn.Init(2 * config.hidden);
  }
}

void TrunkGrads::InitZero(const TrunkParams &p) {
  blocks.resize(p.blocks.size());
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    blocks[b].fwd.InitZero(p.blocks[b].fwd);
    blocks[b].bwd.InitZero(p.blocks[b].bwd);
    blocks[b].bn.InitZero(p.blocks[b].bn);
  }
}

Mat TrunkForward(TrunkParams *params, const BlstmConfig &config,
                 const Mat &input, const TrunkOptions &opts,
                 TrunkCache *cache) {
  Require(static_cast<int>(params->blocks.size()) == config.num_blocks,
          "trunk params do not match config");
  Require(input.cols() == config.input_dim,
          StrCat("trunk input dim ", input.cols(), " != config ",
                 config.input_dim));
  if (!input.allFinite()) throw NumericError("non-finite trunk input");

  const int H = config.hidden;
  const double rate = opts.training ? opts.dropout : 0.0;
  cache->input = input;
  cache->blocks.assign(config.num_blocks, BlockCache());
  cache->training = opts.training;
  cache->wiring = opts.wiring;
  cache->batch_norm = config.batch_norm;
  cache->dropout = rate;
  if (opts.final_state) {
    opts.final_state->fwd_h.assign(config.num_blocks, Vec());
    opts.final_state->fwd_c.assign(config.num_blocks, Vec());
    opts.final_state->bwd_h.assign(config.num_blocks, Vec());
    opts.final_state->bwd_c.assign(config.num_blocks, Vec());
  }

  Mat cur = input;
  for (int b = 0; b < config.num_blocks; ++b) {
    BlockCache &bc = cache->blocks[b];
    const Vec *fh0 = nullptr, *fc0 = nullptr, *bh0 = nullptr, *bc0 = nullptr;
    if (opts.initial && !opts.initial->Empty()) {
      fh0 = &opts.initial->fwd_h.at(b);
      fc0 = &opts.initial->fwd_c.at(b);
      bh0 = &opts.initial->bwd_h.at(b);
      bc0 = &opts.initial->bwd_c.at(b);
    }
    if (opts.wiring == Wiring::kSplit && b > 0) {
      LstmForward(params->blocks[b].fwd, cur.leftCols(H), 0, false, fh0, fc0,
                  &bc.fwd);
      LstmForward(params->blocks[b].bwd, cur.rightCols(H), H, true, bh0, bc0,
                  &bc.bwd);
    } else {
      LstmForward(params->blocks[b].fwd, cur, 0, false, fh0, fc0, &bc.fwd);
      LstmForward(params->blocks[b].bwd, cur, 0, true, bh0, bc0, &bc.bwd);
    }
    const int T = static_cast<int>(cur.rows());
    Mat concat(T, 2 * H);
    concat.leftCols(H) = bc.fwd.outs;
    concat.rightCols(H) = bc.bwd.outs;

    Mat y;
    if (config.batch_norm) {
      // Split wiring normalizes frame-locally with running statistics so
      // that neither path can see across time through pooled stats.
      const BnMode mode = (opts.training && opts.wiring == Wiring::kJoint)
                              ? BnMode::kBatch
                              : BnMode::kRunning;
      const bool update = opts.training && opts.update_running_stats;
      BatchNormForward(&params->blocks[b].bn, concat, mode, update,
                       config.bn_momentum, config.bn_eps, &y, &bc.bn);
    } else {
      y = concat;
    }
    if (rate > 0.0) {
      bc.drop_mask = DropoutMask(T, 2 * H, rate,
                                 DeriveSeed(opts.dropout_seed, StrCat("dropout/", b)));
      y = y.cwiseProduct(bc.drop_mask);
    }
    if (!y.allFinite()) {
      int bad_frame = -1;
      for (int t = 0; t < y.rows() && bad_frame < 0; ++t)
        if (!y.row(t).allFinite()) bad_frame = t;
      throw NumericError(StrCat("non-finite activation in block ", b,
                                " at frame ", bad_frame));
    }
    bc.out = y;
    if (opts.final_state) {
      opts.final_state->fwd_h[b] = bc.fwd.outs.row(T - 1).transpose();
      opts.final_state->fwd_c[b] = bc.fwd.cells.row(T - 1).transpose();
      opts.final_state->bwd_h[b] = bc.bwd.outs.row(0).transpose();
      opts.final_state->bwd_c[b] = bc.bwd.cells.row(0).transpose();
    }
    cur = bc.out;
  }
  return cur;
}

void TrunkBackward(const TrunkParams &params, const BlstmConfig &config,
                   const TrunkCache &cache, const Mat &d_out,
                   TrunkGrads *grads, Mat *d_input) {
  const int H = config.hidden;
  Require(static_cast<int>(cache.blocks.size()) == config.num_blocks,
          "cache does not match config");
  Mat d = d_out;
  for (int b = config.num_blocks - 1; b >= 0; --b) {
    const BlockCache &bc = cache.blocks[b];
    TrunkGrads::Block &gb = grads->blocks[b];
    if (bc.drop_mask.size() > 0) d = d.cwiseProduct(bc.drop_mask);

    Mat d_concat;
    if (cache.batch_norm) {
      BatchNormBackward(params.blocks[b].bn, bc.bn, d, &gb.bn, &d_concat);
    } else {
      d_concat = std::move(d);
    }
    const Mat dh_f = d_concat.leftCols(H);
    const Mat dh_b = d_concat.rightCols(H);

    const bool need_dx = b > 0 || d_input != nullptr;
    Mat dx_f, dx_b;
    LstmBackward(params.blocks[b].fwd, bc.fwd, dh_f, &gb.fwd,
                 need_dx ? &dx_f : nullptr);
    LstmBackward(params.blocks[b].bwd, bc.bwd, dh_b, &gb.bwd,
                 need_dx ? &dx_b : nullptr);
    if (!need_dx) return;

    if (cache.wiring == Wiring::kSplit && b > 0) {
      Mat d_prev = Mat::Zero(dx_f.rows(), 2 * H);
      d_prev.leftCols(H) = dx_f;
      d_prev.rightCols(H) = dx_b;
      d = std::move(d_prev);
    } else {
      d = dx_f + dx_b;
    }
  }
  if (d_input) *d_input = std::move(d);
}

// ---------------------------------------------------------------------------
// Tensor plumbing

int64_t TensorRef::Size() const {
  return mat ? static_cast<int64_t>(mat->size()) : static_cast<int64_t>(vec->size());
}
int TensorRef::Rows() const {
  return mat ? static_cast<int>(mat->rows()) : static_cast<int>(vec->size());
}
int TensorRef::Cols() const { return mat ? static_cast<int>(mat->cols()) : 1; }
double *TensorRef::Data() { return mat ? mat->data() : vec->data(); }
const double *TensorRef::Data() const { return mat ? mat->data() : vec->data(); }

void AppendTensors(std::vector<TensorRef> *dst, std::vector<TensorRef> more) {
  for (auto &t : more) dst->push_back(std::move(t));
}

namespace {

void AppendLstm(std::vector<TensorRef> *out, LstmParams *p,
                const std::string &prefix) {
  out->emplace_back(prefix + ".wx", &p->wx);
  out->emplace_back(prefix + ".wh", &p->wh);
  out->emplace_back(prefix + ".b", &p->b);
}

void AppendLstmGrads(std::vector<TensorRef> *out, LstmGrads *g,
                     const std::string &prefix) {
  out->emplace_back(prefix + ".wx", &g->dwx);
  out->emplace_back(prefix + ".wh", &g->dwh);
  out->emplace_back(prefix + ".b", &g->db);
}

}  // namespace

std::vector<TensorRef> TrunkTensors(TrunkParams *p, const std::string &prefix) {
  std::vector<TensorRef> out = TrunkTrainableTensors(p, prefix);
  for (size_t b = 0; b < p->blocks.size(); ++b) {
    const std::string bp = StrCat(prefix, ".b", b);
    out.emplace_back(bp + ".bn.running_mean", &p->blocks[b].bn.running_mean);
    out.emplace_back(bp + ".bn.running_var", &p->blocks[b].bn.running_var);
  }
  return out;
}

std::vector<TensorRef> TrunkTrainableTensors(TrunkParams *p,
                                             const std::string &prefix) {
  std::vector<TensorRef> out;
  for (size_t b = 0; b < p->blocks.size(); ++b) {
    const std::string bp = StrCat(prefix, ".b", b);
    AppendLstm(&out, &p->blocks[b].fwd, bp + ".fwd");
    AppendLstm(&out, &p->blocks[b].bwd, bp + ".bwd");
    out.emplace_back(bp + ".bn.gamma", &p->blocks[b].bn.gamma);
    out.emplace_back(bp + ".bn.beta", &p->blocks[b].bn.beta);
  }
  return out;
}

std::vector<TensorRef> TrunkGradTensors(TrunkGrads *g, const std::string &prefix) {
  std::vector<TensorRef> out;
  for (size_t b = 0; b < g->blocks.size(); ++b) {
    const std::string bp = StrCat(prefix, ".b", b);
    AppendLstmGrads(&out, &g->blocks[b].fwd, bp + ".fwd");
    AppendLstmGrads(&out, &g->blocks[b].bwd, bp + ".bwd");
    out.emplace_back(bp + ".bn.gamma", &g->blocks[b].bn.dgamma);
    out.emplace_back(bp + ".bn.beta", &g->blocks[b].bn.dbeta);
  }
  return out;
}

std::vector<TensorRef> LinearTensors(LinearParams *p, const std::string &prefix) {
  return {{prefix + ".w", &p->w}, {prefix + ".b", &p->b}};
}

std::vector<TensorRef> LinearGradTensors(LinearGrads *g, const std::string &prefix) {
  return {{prefix + ".w", &g->dw}, {prefix + ".b", &g->db}};
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr uint32_t kCkptMagic = 0x414c434b;  // "ALCK"
constexpr uint32_t kCkptVersion = 1;

void PutU32(std::ofstream &out, uint32_t v) {
  out.write(reinterpret_cast<const char *>(&v), 4);
}
uint32_t GetU32(std::ifstream &in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char *>(&v), 4);
  return v;
}
void PutString(std::ofstream &out, const std::string &s) {
  PutU32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string GetString(std::ifstream &in) {
  uint32_t n = GetU32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

}  // namespace

void SaveCheckpoint(const std::string &path, const std::string &stage,
                    const std::string &config_digest,
                    const std::map<std::string, std::string> &meta,
                    const std::vector<TensorRef> &tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  PutU32(out, kCkptMagic);
  PutU32(out, kCkptVersion);
  PutString(out, stage);
  PutString(out, config_digest);
  PutU32(out, static_cast<uint32_t>(meta.size()));
  for (const auto &[k, v] : meta) {
    PutString(out, k);
    PutString(out, v);
  }
  PutU32(out, static_cast<uint32_t>(tensors.size()));
  for (const auto &t : tensors) {
    PutString(out, t.name);
    PutU32(out, static_cast<uint32_t>(t.Rows()));
    PutU32(out, static_cast<uint32_t>(t.Cols()));
    out.put(0);  // dtype f64
    out.write(reinterpret_cast<const char *>(t.Data()),
              static_cast<std::streamsize>(t.Size() * sizeof(double)));
  }
  if (!out) throw InputError("write failed for " + path);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  if (GetU32(in) != kCkptMagic) throw InputError("bad checkpoint magic: " + path);
  if (GetU32(in) != kCkptVersion)
    throw InputError("unsupported checkpoint version: " + path);
  Checkpoint ckpt;
  ckpt.stage = GetString(in);
  ckpt.config_digest = GetString(in);
  const uint32_t num_meta = GetU32(in);
  for (uint32_t i = 0; i < num_meta; ++i) {
    std::string k = GetString(in);
    ckpt.meta[k] = GetString(in);
  }
  const uint32_t num_tensors = GetU32(in);
  for (uint32_t i = 0; i < num_tensors; ++i) {
    std::string name = GetString(in);
    uint32_t rows = GetU32(in), cols = GetU32(in);
    char dtype = 0;
    in.get(dtype);
    if (dtype != 0) throw InputError("unsupported tensor dtype in " + path);
    Mat m(rows, cols);
    in.read(reinterpret_cast<char *>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw InputError("truncated checkpoint: " + path);
    ckpt.tensors.emplace_back(std::move(name), std::move(m));
  }
  return ckpt;
}

const Mat *Checkpoint::Find(const std::string &name) const {
  for (const auto &[n, m] : tensors)
    if (n == name) return &m;
  return nullptr;
}

void AssignTensors(const Checkpoint &ckpt, const std::vector<TensorRef> &refs) {
  for (const auto &ref : refs) {
    const Mat *src = ckpt.Find(ref.name);
    if (!src) throw ConfigError("checkpoint missing tensor " + ref.name);
    if (src->rows() != ref.Rows() || src->cols() != ref.Cols())
      throw ConfigError(StrCat("shape mismatch for ", ref.name, ": checkpoint ",
                               src->rows(), "x", src->cols(), " vs model ",
                               ref.Rows(), "x", ref.Cols()));
    TensorRef mutable_ref = ref;
    std::memcpy(mutable_ref.Data(), src->data(),
                static_cast<size_t>(src->size()) * sizeof(double));
  }
}

// ---------------------------------------------------------------------------
// Optimizer

SgdStepInfo SgdStep(const std::vector<TensorRef> &params,
                    const std::vector<TensorRef> &grads, SgdState *state,
                    const SgdOptions &opts) {
  Require(params.size() == grads.size(), "param/grad count mismatch");
  SgdStepInfo info;
  double sq = 0.0;
  for (size_t i = 0; i < grads.size(); ++i) {
    Require(params[i].name == grads[i].name && params[i].Size() == grads[i].Size(),
            "param/grad tensor mismatch at " + params[i].name);
    Eigen::Map<const Vec> g(grads[i].Data(), grads[i].Size());
    sq += g.squaredNorm();
  }
  info.grad_norm = std::sqrt(sq);
  if (!std::isfinite(info.grad_norm)) {
    info.skipped = true;
    return info;
  }
  if (opts.clip_norm > 0.0 && info.grad_norm > opts.clip_norm)
    info.clip_scale = opts.clip_norm / info.grad_norm;

  for (size_t i = 0; i < params.size(); ++i) {
    TensorRef pref = params[i];
    Eigen::Map<Vec> p(pref.Data(), pref.Size());
    Eigen::Map<const Vec> g(grads[i].Data(), grads[i].Size());
    Vec &v = state->velocity[params[i].name];
    if (v.size() != pref.Size()) v = Vec::Zero(pref.Size());
    v = opts.momentum * v + info.clip_scale * g;
    p -= opts.lr * v;
  }
  return info;
}

// ---------------------------------------------------------------------------
// Gradient checking

GradCheckReport GradCheck(const std::function<double()> &loss_fn,
                          const std::vector<TensorRef> &params,
                          const std::vector<TensorRef> &grads,
                          const GradCheckOptions &opts) {
  Require(params.size() == grads.size(), "param/grad count mismatch");
  const double l1 = loss_fn();
  const double l2 = loss_fn();
  if (l1 != l2)
    throw ContractError(StrCat("loss is not deterministic: ", l1, " vs ", l2));

  int64_t total = 0;
  std::vector<int64_t> cumulative;
  for (const auto &p : params) {
    total += p.Size();
    cumulative.push_back(total);
  }
  Require(total > 0, "no parameters to probe");

  GradCheckReport report;
  Rng rng(opts.seed);
  for (int probe = 0; probe < opts.probes; ++probe) {
    const int64_t flat = static_cast<int64_t>(rng.Raw() % static_cast<uint64_t>(total));
    size_t ti = 0;
    while (cumulative[ti] <= flat) ++ti;
    const int64_t idx = flat - (ti == 0 ? 0 : cumulative[ti - 1]);

    TensorRef pref = params[ti];
    double *slot = pref.Data() + idx;
    const double saved = *slot;
    *slot = saved + opts.step;
    const double lp = loss_fn();
    *slot = saved - opts.step;
    const double lm = loss_fn();
    *slot = saved;

    const double numeric = (lp - lm) / (2.0 * opts.step);
    const double analytic = grads[ti].Data()[idx];
    const double rel = std::abs(analytic - numeric) /
                       std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    report.max_rel_error = std::max(report.max_rel_error, rel);
    ++report.probes_run;
    if (rel > opts.tolerance)
      report.failures.push_back({params[ti].name, idx, analytic, numeric, rel});
  }
  return report;
}

}  // namespace asrlab
