// asrlab/tests/test_nnet.cc

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

#include "asrlab/frontend.hh"
#include "doctest.h"
#include "test_util.hh"

using namespace asrlab;

namespace {

Mat RandomMat(int rows, int cols, Rng *rng, double scale = 1.0) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = scale * rng->Gaussian();
  return m;
}

}  // namespace

TEST_CASE("trunk forward: output shape is T x 2H") {
  BlstmConfig cfg;
  cfg.num_blocks = 4;
  cfg.hidden = 32;
  cfg.input_dim = 20;
  Rng rng(1);
  TrunkParams params;
  params.Init(cfg, &rng);
  Mat x = RandomMat(7, 20, &rng);
  TrunkCache cache;
  Mat y = TrunkForward(&params, cfg, x, TrunkOptions{}, &cache);
  CHECK(y.rows() == 7);
  CHECK(y.cols() == 64);
}

TEST_CASE("trunk forward: all-zero parameters give all-zero output") {
  BlstmConfig cfg;
  cfg.num_blocks = 2;
  cfg.hidden = 8;
  cfg.input_dim = 6;
  Rng rng(2);
  TrunkParams params;
  params.Init(cfg, &rng);
  for (auto &ref : TrunkTensors(&params)) {
    TensorRef r = ref;
    for (int64_t i = 0; i < r.Size(); ++i) r.Data()[i] = 0.0;
  }
  Mat x = RandomMat(5, 6, &rng);
  TrunkCache cache;
  Mat y = TrunkForward(&params, cfg, x, TrunkOptions{}, &cache);
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trunk forward: directional symmetry under parameter swap") {
  BlstmConfig cfg;
  cfg.num_blocks = 2;
  cfg.hidden = 5;
  cfg.input_dim = 4;
  Rng rng(3);
  TrunkParams a;
  a.Init(cfg, &rng);
  // make BN stats asymmetric so the swap actually matters
  for (auto &blk : a.blocks) {
    for (int i = 0; i < blk.bn.Dim(); ++i) {
      blk.bn.gamma(i) = 0.5 + 0.1 * i;
      blk.bn.running_mean(i) = 0.05 * i;
      blk.bn.running_var(i) = 1.0 + 0.02 * i;
    }
  }
  const int H = cfg.hidden;
  TrunkParams b = a;
  for (size_t blk = 0; blk < b.blocks.size(); ++blk) {
    std::swap(b.blocks[blk].fwd, b.blocks[blk].bwd);
    auto swap_halves = [&](Vec *v) {
      Vec tmp = v->head(H);
      v->head(H) = v->tail(H);
      v->tail(H) = tmp;
    };
    swap_halves(&b.blocks[blk].bn.gamma);
    swap_halves(&b.blocks[blk].bn.beta);
    swap_halves(&b.blocks[blk].bn.running_mean);
    swap_halves(&b.blocks[blk].bn.running_var);
    if (blk > 0) {
      // inputs to later blocks arrive with halves swapped too
      auto swap_wx_cols = [&](Mat *wx) {
        Mat tmp = wx->leftCols(H);
        wx->leftCols(H) = wx->rightCols(H);
        wx->rightCols(H) = tmp;
      };
      swap_wx_cols(&b.blocks[blk].fwd.wx);
      swap_wx_cols(&b.blocks[blk].bwd.wx);
    }
  }
  Mat x = RandomMat(6, 4, &rng);
  Mat rx = x.colwise().reverse();
  TrunkCache ca, cb;
  Mat ya = TrunkForward(&a, cfg, x, TrunkOptions{}, &ca);
  Mat yb = TrunkForward(&b, cfg, rx, TrunkOptions{}, &cb);
  Mat expected(ya.rows(), ya.cols());
  expected.leftCols(H) = ya.rightCols(H).colwise().reverse();
  expected.rightCols(H) = ya.leftCols(H).colwise().reverse();
  CHECK((yb - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trunk backward matches finite differences") {
  BlstmConfig cfg;
  cfg.num_blocks = 2;
  cfg.hidden = 6;
  cfg.input_dim = 10;
  cfg.dropout = 0.0;
  Rng rng(4);
  TrunkParams params;
  params.Init(cfg, &rng);
  Mat x = RandomMat(9, 10, &rng);
  // fixed projection to a scalar; modest loss magnitude keeps the
  // finite-difference roundoff well below the tolerance
  Mat probe = RandomMat(9, 12, &rng, 0.05);

  TrunkOptions opts;
  opts.training = true;  // batch-stat normalization path
  opts.update_running_stats = false;

  auto loss_fn = [&]() {
    TrunkCache cache;
    Mat y = TrunkForward(&params, cfg, x, opts, &cache);
    return (y.array() * probe.array()).sum();
  };

  TrunkCache cache;
  Mat y = TrunkForward(&params, cfg, x, opts, &cache);
  TrunkGrads grads;
  grads.InitZero(params);
  Mat d_input;
  TrunkBackward(params, cfg, cache, probe, &grads, &d_input);
  CHECK(d_input.rows() == 9);
  CHECK(d_input.cols() == 10);

  // batch-stat normalization has strong curvature: verify h^2 convergence
  // (exact analytic gradients) rather than a single-step bound
  GradCheckOptions coarse, fine;
  coarse.probes = 250;
  coarse.step = 1e-3;
  coarse.tolerance = 1e30;
  fine = coarse;
  fine.step = 1e-4;
  auto rc = GradCheck(loss_fn, TrunkTrainableTensors(&params),
                      TrunkGradTensors(&grads), coarse);
  auto rf = GradCheck(loss_fn, TrunkTrainableTensors(&params),
                      TrunkGradTensors(&grads), fine);
  CHECK(rf.max_rel_error <= 1e-4);
  // truncation-dominated: shrinking the step 10x cuts the error ~100x
  CHECK(rf.max_rel_error < 0.05 * rc.max_rel_error);
}

TEST_CASE("trunk backward with split wiring matches finite differences") {
  BlstmConfig cfg;
  cfg.num_blocks = 3;
  cfg.hidden = 4;
  cfg.input_dim = 6;
  Rng rng(5);
  TrunkParams params;
  params.Init(cfg, &rng);
  Mat x = RandomMat(7, 6, &rng);
  Mat probe = RandomMat(7, 8, &rng, 0.05);

  TrunkOptions opts;
  opts.training = true;
  opts.wiring = Wiring::kSplit;
  opts.update_running_stats = false;

  auto loss_fn = [&]() {
    TrunkCache cache;
    Mat y = TrunkForward(&params, cfg, x, opts, &cache);
    return (y.array() * probe.array()).sum();
  };
  TrunkCache cache;
  TrunkForward(&params, cfg, x, opts, &cache);
  TrunkGrads grads;
  grads.InitZero(params);
  TrunkBackward(params, cfg, cache, probe, &grads, nullptr);

  GradCheckOptions gopts;
  gopts.probes = 250;
  auto report = GradCheck(loss_fn, TrunkTrainableTensors(&params),
                          TrunkGradTensors(&grads), gopts);
  CHECK(report.max_rel_error <= 1e-4);
}

TEST_CASE("grad_check harness: analytic anchors") {
  // f(x) = sum sigmoid(x) at x = 0: gradient 0.25 everywhere
  Mat x = Mat::Zero(3, 4);
  Mat g(3, 4);
  auto loss = [&]() { return (1.0 / (1.0 + (-x.array()).exp())).sum(); };
  g.setConstant(0.25);
  std::vector<TensorRef> params = {{"x", &x}};
  std::vector<TensorRef> grads = {{"g", &g}};
  GradCheckOptions opts;
  opts.probes = 12;
  opts.step = 1e-5;  // truncation at 1e-3 would dominate the 1e-9 bound
  auto report = GradCheck(loss, params, grads, opts);
  CHECK(report.max_rel_error < 1e-9);

  // f(x) = x^2 at x = 3: numeric derivative 6 within 1e-6
  Mat x2(1, 1), g2(1, 1);
  x2(0, 0) = 3.0;
  g2(0, 0) = 6.0;
  auto loss2 = [&]() { return x2(0, 0) * x2(0, 0); };
  auto report2 = GradCheck(loss2, {{"x", &x2}}, {{"g", &g2}}, opts);
  CHECK(report2.max_rel_error < 1e-6);
}

TEST_CASE("grad_check harness: rejects non-deterministic losses") {
  Mat x = Mat::Zero(1, 1), g = Mat::Zero(1, 1);
  int calls = 0;
  auto loss = [&]() { return static_cast<double>(calls++); };
  CHECK_THROWS_AS(GradCheck(loss, {{"x", &x}}, {{"g", &g}}, GradCheckOptions{}),
                  ContractError);
}

TEST_CASE("sgd_step: update arithmetic, clipping, momentum") {
  Mat p(1, 1), g(1, 1);
  p.setZero();
  g.setConstant(1.0);
  SgdState st;
  SgdOptions opts;
  opts.lr = 0.1;
  opts.momentum = 0.0;
  opts.clip_norm = 0.0;  // off
  SgdStep({{"p", &p}}, {{"p", &g}}, &st, opts);
  CHECK(p(0, 0) == doctest::Approx(-0.1));

  // clip norm 1 on a gradient of norm 5 scales by 0.2
  Mat p2 = Mat::Zero(1, 2), g2(1, 2);
  g2 << 3.0, 4.0;
  SgdState st2;
  SgdOptions o2;
  o2.lr = 1.0;
  o2.momentum = 0.0;
  o2.clip_norm = 1.0;
  auto info = SgdStep({{"p", &p2}}, {{"p", &g2}}, &st2, o2);
  CHECK(info.grad_norm == doctest::Approx(5.0));
  CHECK(info.clip_scale == doctest::Approx(0.2));
  CHECK(p2(0, 0) == doctest::Approx(-0.6));
  CHECK(p2(0, 1) == doctest::Approx(-0.8));

  // momentum 0.9: second update is 1.9 lr g
  Mat p3 = Mat::Zero(1, 1), g3(1, 1);
  g3.setConstant(1.0);
  SgdState st3;
  SgdOptions o3;
  o3.lr = 0.1;
  o3.momentum = 0.9;
  o3.clip_norm = 0.0;
  SgdStep({{"p", &p3}}, {{"p", &g3}}, &st3, o3);
  const double after_first = p3(0, 0);
  SgdStep({{"p", &p3}}, {{"p", &g3}}, &st3, o3);
  CHECK(after_first == doctest::Approx(-0.1));
  CHECK(p3(0, 0) - after_first == doctest::Approx(-0.19));

  // non-finite gradients skip the step
  Mat p4 = Mat::Zero(1, 1), g4(1, 1);
  g4.setConstant(std::numeric_limits<double>::quiet_NaN());
  SgdState st4;
  auto info4 = SgdStep({{"p", &p4}}, {{"p", &g4}}, &st4, SgdOptions{});
  CHECK(info4.skipped);
  CHECK(p4(0, 0) == 0.0);
}

TEST_CASE("dropout: inverted scaling preserves expectation within 2 percent") {
  const double rate = 0.3;
  double acc = 0.0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    Mat m = DropoutMask(1, 1, rate, 1000 + i);
    acc += m(0, 0);
  }
  CHECK(acc / trials == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("eval forward is deterministic and frame-local in context") {
  // chunk whose contexts cover the whole utterance reproduces the
  // full-sequence output on the core frames
  BlstmConfig cfg;
  cfg.num_blocks = 2;
  cfg.hidden = 8;
  cfg.input_dim = 12;
  Rng rng(6);
  TrunkParams params;
  params.Init(cfg, &rng);
  Mat x = RandomMat(40, 12, &rng);

  TrunkCache c1, c2;
  Mat full = TrunkForward(&params, cfg, x, TrunkOptions{}, &c1);
  Mat again = TrunkForward(&params, cfg, x, TrunkOptions{}, &c2);
  CHECK((full - again).cwiseAbs().maxCoeff() == 0.0);

  ChunkSpec spec;
  spec.core_length = 15;
  spec.context_length = 40;  // full coverage
  auto chunks = ChunkSequence(40, spec);
  for (const auto &ch : chunks) {
    Mat slice = x.middleRows(ch.left_begin, ch.TotalFrames());
    TrunkCache cc;
    Mat y = TrunkForward(&params, cfg, slice, TrunkOptions{}, &cc);
    Mat core = y.middleRows(ch.CoreOffset(), ch.CoreFrames());
    Mat ref = full.middleRows(ch.core_begin, ch.CoreFrames());
    CHECK((core - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("trunk forward: final states recoverable, initial states honored") {
  BlstmConfig cfg;
  cfg.num_blocks = 2;
  cfg.hidden = 4;
  cfg.input_dim = 5;
  Rng rng(7);
  TrunkParams params;
  params.Init(cfg, &rng);
  Mat x = RandomMat(6, 5, &rng);

  TrunkState final;
  TrunkOptions opts;
  opts.final_state = &final;
  TrunkCache cache;
  TrunkForward(&params, cfg, x, opts, &cache);
  REQUIRE(final.fwd_h.size() == 2);
  CHECK((final.fwd_h[0].transpose() - cache.blocks[0].fwd.outs.row(5))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((final.bwd_h[1].transpose() - cache.blocks[1].bwd.outs.row(0))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // zero initial state equals the default
  TrunkState zeros;
  for (int b = 0; b < 2; ++b) {
    zeros.fwd_h.push_back(Vec::Zero(4));
    zeros.fwd_c.push_back(Vec::Zero(4));
    zeros.bwd_h.push_back(Vec::Zero(4));
    zeros.bwd_c.push_back(Vec::Zero(4));
  }
  TrunkOptions with_init;
  with_init.initial = &zeros;
  TrunkCache c2;
  Mat y_init = TrunkForward(&params, cfg, x, with_init, &c2);
  TrunkCache c3;
  Mat y_plain = TrunkForward(&params, cfg, x, TrunkOptions{}, &c3);
  CHECK((y_init - y_plain).cwiseAbs().maxCoeff() == 0.0);

  // nonzero initial state changes the output
  zeros.fwd_h[0].setConstant(0.5);
  TrunkCache c4;
  Mat y_warm = TrunkForward(&params, cfg, x, with_init, &c4);
  CHECK((y_warm - y_plain).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("trunk forward: numeric error on non-finite input") {
  BlstmConfig cfg;
  cfg.num_blocks = 1;
  cfg.hidden = 4;
  cfg.input_dim = 3;
  Rng rng(8);
  TrunkParams params;
  params.Init(cfg, &rng);
  Mat x = Mat::Zero(4, 3);
  x(2, 1) = std::numeric_limits<double>::infinity();
  TrunkCache cache;
  CHECK_THROWS_AS(TrunkForward(&params, cfg, x, TrunkOptions{}, &cache),
                  NumericError);
}

TEST_CASE("checkpoint: round-trip, digest, and shape validation") {
  test::TempDir dir("ckpt");
  BlstmConfig cfg;
  cfg.num_blocks = 2;
  cfg.hidden = 4;
  cfg.input_dim = 5;
  Rng rng(9);
  TrunkParams params;
  params.Init(cfg, &rng);
  auto tensors = TrunkTensors(&params);
  SaveCheckpoint(dir.Path("m.ckpt"), "am-test", "digest123",
                 {{"note", "unit"}}, tensors);

  auto ckpt = LoadCheckpoint(dir.Path("m.ckpt"));
  CHECK(ckpt.stage == "am-test");
  CHECK(ckpt.config_digest == "digest123");
  CHECK(ckpt.meta.at("note") == "unit");

  TrunkParams restored;
  Rng rng2(77);
  restored.Init(cfg, &rng2);
  AssignTensors(ckpt, TrunkTensors(&restored));
  CHECK((restored.blocks[1].fwd.wx - params.blocks[1].fwd.wx)
            .cwiseAbs()
            .maxCoeff() == 0.0);

  BlstmConfig other = cfg;
  other.hidden = 6;
  TrunkParams wrong;
  wrong.Init(other, &rng2);
  CHECK_THROWS_AS(AssignTensors(ckpt, TrunkTensors(&wrong)), ConfigError);
}
