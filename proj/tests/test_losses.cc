// tests/test_losses.cc

// Copyright 2026  Front-End Adapter Toolkit Authors

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fea/core/error.h"
#include "fea/core/rng.h"
#include "fea/losses/ctc.h"
#include "fea/losses/losses.h"
#include "oracles.h"

using namespace fea;

namespace {

// random log-normalized rows
Mat random_logp(int t, int v, uint64_t seed) {
  Rng rng(seed);
  Mat logits(t, v);
  for (size_t i = 0; i < logits.size(); ++i)
    logits.data()[i] = 2.0 * (2.0 * rng.next_double() - 1.0);
  Mat logp(t, v);
  for (int r = 0; r < t; ++r) {
    double m = logits(r, 0);
    for (int c = 1; c < v; ++c) m = std::max(m, logits(r, c));
    double z = 0.0;
    for (int c = 0; c < v; ++c) z += std::exp(logits(r, c) - m);
    const double lse = m + std::log(z);
    for (int c = 0; c < v; ++c) logp(r, c) = logits(r, c) - lse;
  }
  return logp;
}

std::vector<int> random_target(int max_len, int v, uint64_t seed) {
  Rng rng(seed);
  const int len = static_cast<int>(rng.next_below(max_len + 1));
  std::vector<int> t;
  for (int i = 0; i < len; ++i)
    t.push_back(1 + static_cast<int>(rng.next_below(v - 1)));
  return t;
}

}  // namespace

TEST_CASE("ctc hand example: T=2 uniform over {blank,a}, target a") {
  // paths {(a,-),(-,a),(a,a)}: P = 3 * 0.25, loss = -ln(0.75)
  Mat logp(2, 2, std::log(0.5));
  const double loss = ctc_loss_value(logp, {1});
  CHECK(loss == doctest::Approx(-std::log(0.75)).epsilon(1e-9));
  CHECK(loss == doctest::Approx(0.2876820724517809).epsilon(1e-9));
  CHECK(testing::ctc_enum_oracle(logp, {1}) ==
        doctest::Approx(loss).epsilon(1e-9));
}

TEST_CASE("ctc certain path has zero loss") {
  // prob 1 on 'a' every frame (log-normalized within 1e-6 by construction)
  const double tiny = -40.0;
  Mat logp(3, 3, tiny);
  for (int r = 0; r < 3; ++r) logp(r, 1) = 0.0;
  CHECK(ctc_loss_value(logp, {1}) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("ctc matches the exhaustive enumeration oracle on random "
          "instances") {
  int checked = 0;
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    const int t = 1 + static_cast<int>(seed % 6);
    const int v = 2 + static_cast<int>(seed % 3);
    const Mat logp = random_logp(t, v, seed);
    const auto target = random_target(3, v, seed * 13 + 1);
    if (static_cast<int>(target.size()) == 0) continue;
    if (ctc_min_frames(target) > t) {
      CHECK_THROWS_AS(ctc_loss_value(logp, target), CtcInfeasibleError);
      continue;
    }
    const double fast = ctc_loss_value(logp, target);
    const double slow = testing::ctc_enum_oracle(logp, target);
    CHECK(std::fabs(fast - slow) < 1e-6);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("ctc rejects infeasible targets with a defined error") {
  Mat logp = random_logp(2, 3, 5);
  CHECK_THROWS_AS(ctc_loss_value(logp, {1, 1, 2}), CtcInfeasibleError);
  // repeated labels need a separating blank: "aa" needs 3 frames
  CHECK_THROWS_AS(ctc_loss_value(logp, {1, 1}), CtcInfeasibleError);
  CHECK(ctc_min_frames({1, 1}) == 3);
  CHECK(ctc_min_frames({1, 2}) == 2);
  CHECK(ctc_min_frames({}) == 0);
}

TEST_CASE("ctc gradient matches central finite differences") {
  // run through the autodiff wrapper on a small instance
  const int t = 5, v = 4;
  Param logits("logits", Mat(t, v));
  Rng rng(77);
  for (size_t i = 0; i < logits.value.size(); ++i)
    logits.value.data()[i] = 2.0 * rng.next_double() - 1.0;
  const std::vector<int> target = {1, 2, 1};

  auto loss_fn = [&]() {
    auto lp = ad::log_softmax_rows(ad::leaf(&logits));
    return ad::scalar_of(ctc_loss(lp, target));
  };
  logits.zero_grad();
  {
    auto lp = ad::log_softmax_rows(ad::leaf(&logits));
    auto loss = ctc_loss(lp, target);
    ad::backward(loss);
  }
  CHECK(testing::max_grad_rel_error({&logits}, loss_fn) < 1e-4);
}

TEST_CASE("greedy decode collapses repeats and drops blanks") {
  auto mk = [](const std::vector<int>& argmaxes, int v) {
    Mat logp(static_cast<int>(argmaxes.size()), v, -10.0);
    for (size_t r = 0; r < argmaxes.size(); ++r)
      logp(static_cast<int>(r), argmaxes[r]) = -0.01;
    return logp;
  };
  const auto& vocab = letter_vocab();
  const int a = vocab.id_of('a'), b = vocab.id_of('b');
  CHECK(ctc_greedy_decode(mk({0, a, a, 0, b}, 29)).text == "ab");
  CHECK(ctc_greedy_decode(mk({0, 0, 0}, 29)).text.empty());
  CHECK(ctc_greedy_decode(mk({a, 0, a}, 29)).text == "aa");
}

TEST_CASE("greedy decode is invariant to per-row monotone transforms") {
  const Mat logp = random_logp(12, 6, 9);
  Mat scaled = logp;
  for (int r = 0; r < scaled.rows(); ++r)
    for (int c = 0; c < scaled.cols(); ++c)
      scaled(r, c) = 3.0 * scaled(r, c) + 0.25 * r;  // monotone per row
  CHECK(ctc_greedy_decode(logp).token_ids ==
        ctc_greedy_decode(scaled).token_ids);
}

TEST_CASE("l2 front-end loss: identical inputs give zero") {
  Mat x(4, 3, 0.7);
  auto a = ad::constant(x);
  auto b = ad::constant(x);
  CHECK(ad::scalar_of(l2_frontend_loss(a, b)) == 0.0);
}

TEST_CASE("l2 front-end loss: zeros vs ones over 4x3 gives exactly 1") {
  auto wave = ad::constant(Mat(4, 3, 0.0));
  auto fbank = ad::constant(Mat(4, 3, 1.0));
  CHECK(ad::scalar_of(l2_frontend_loss(wave, fbank)) == doctest::Approx(1.0));
}

TEST_CASE("l2 loss value is symmetric; gradient is one-sided") {
  const int t = 4, d = 3;
  Param wave("wave", Mat(t, d));
  Param fbank("fbank", Mat(t, d));
  Rng rng(123);
  for (size_t i = 0; i < wave.value.size(); ++i) {
    wave.value.data()[i] = rng.next_gaussian();
    fbank.value.data()[i] = rng.next_gaussian();
  }

  auto loss_ab = l2_frontend_loss(ad::leaf(&wave), ad::leaf(&fbank));
  auto loss_ba = l2_frontend_loss(ad::leaf(&fbank), ad::leaf(&wave));
  CHECK(ad::scalar_of(loss_ab) == doctest::Approx(ad::scalar_of(loss_ba)));

  wave.zero_grad();
  fbank.zero_grad();
  ad::backward(loss_ab);
  // teacher side: exactly zero everywhere
  for (size_t i = 0; i < wave.grad.size(); ++i)
    CHECK(wave.grad.data()[i] == 0.0);
  // student side: 2 (fbank - wave) / (T D), checked directly and by FD
  for (int r = 0; r < t; ++r)
    for (int c = 0; c < d; ++c) {
      const double expect =
          2.0 * (fbank.value(r, c) - wave.value(r, c)) / (t * d);
      CHECK(fbank.grad(r, c) == doctest::Approx(expect).epsilon(1e-12));
    }
  auto loss_fn = [&]() {
    return ad::scalar_of(l2_frontend_loss(ad::leaf(&wave), ad::leaf(&fbank)));
  };
  CHECK(testing::max_grad_rel_error({&fbank}, loss_fn) < 1e-4);
}

TEST_CASE("l2 loss rejects shape mismatches") {
  auto a = ad::constant(Mat(4, 3, 0.0));
  auto b = ad::constant(Mat(5, 3, 0.0));
  CHECK_THROWS_AS(l2_frontend_loss(a, b), Error);
}

TEST_CASE("masked cross entropy: empty mask is exactly zero with no grad") {
  Param logits("logits", Mat(5, 4, 0.3));
  auto node = masked_cross_entropy(ad::leaf(&logits), {0, 1, 2, 3, 0}, {});
  CHECK(ad::scalar_of(node) == 0.0);
  CHECK_FALSE(node->requires_grad);
}

TEST_CASE("masked cross entropy: uniform logits give ln(K)") {
  const int k = 7;
  auto logits = ad::constant(Mat(3, k, 0.0));
  auto node = masked_cross_entropy(logits, {1, 2, 3}, {1});
  CHECK(ad::scalar_of(node) == doctest::Approx(std::log(k)).epsilon(1e-12));
}

TEST_CASE("masked cross entropy matches a direct-summation oracle and FD") {
  const int t = 6, k = 5;
  Param logits("logits", Mat(t, k));
  Rng rng(31);
  for (size_t i = 0; i < logits.value.size(); ++i)
    logits.value.data()[i] = rng.next_gaussian();
  const std::vector<int> labels = {0, 3, 1, 4, 2, 2};
  const std::vector<int> mask = {1, 3, 5};

  // literal formula: mean over masked rows of (logsumexp(row) - row[label])
  double expect = 0.0;
  for (int r : mask) {
    double m = logits.value(r, 0);
    for (int c = 1; c < k; ++c) m = std::max(m, logits.value(r, c));
    double z = 0.0;
    for (int c = 0; c < k; ++c) z += std::exp(logits.value(r, c) - m);
    expect += m + std::log(z) - logits.value(r, labels[r]);
  }
  expect /= mask.size();

  auto node = masked_cross_entropy(ad::leaf(&logits), labels, mask);
  CHECK(ad::scalar_of(node) == doctest::Approx(expect).epsilon(1e-9));

  logits.zero_grad();
  ad::backward(masked_cross_entropy(ad::leaf(&logits), labels, mask));
  auto loss_fn = [&]() {
    return ad::scalar_of(
        masked_cross_entropy(ad::leaf(&logits), labels, mask));
  };
  CHECK(testing::max_grad_rel_error({&logits}, loss_fn) < 1e-4);
}

TEST_CASE("wer hand examples") {
  CHECK(wer("the cat sat", "the cat sat") == doctest::Approx(0.0));
  CHECK(wer("the cat", "the cat sat") == doctest::Approx(1.0 / 3.0));
  // 2 substitutions + 1 insertion over 2 reference words: WER may exceed 1
  CHECK(wer("x y z", "a b") == doctest::Approx(1.5));
  const auto c = wer_counts("x y z", "a b");
  CHECK(c.substitutions == 2);
  CHECK(c.insertions == 1);
  CHECK(c.deletions == 0);
  CHECK(c.ref_words == 2);
}

TEST_CASE("wer of identical random word strings is zero") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::string text;
    const int words = 1 + static_cast<int>(rng.next_below(6));
    for (int w = 0; w < words; ++w) {
      if (w) text += ' ';
      const int len = 1 + static_cast<int>(rng.next_below(5));
      for (int i = 0; i < len; ++i)
        text += static_cast<char>('a' + rng.next_below(26));
    }
    CHECK(wer(text, text) == 0.0);
  }
}

TEST_CASE("wer requires a non-empty reference") {
  CHECK_THROWS_AS(wer("something", ""), DataError);
  CHECK_THROWS_AS(wer("something", "   "), DataError);
}

TEST_CASE("wer summary line format") {
  WerCounts c;
  c.substitutions = 2;
  c.deletions = 1;
  c.insertions = 0;
  c.ref_words = 12;
  CHECK(wer_summary_line(c) == "WER 25.00 S=2 D=1 I=0 N=12");
}

TEST_CASE("loss breakdown regime invariant: totals recompose exactly") {
  LossBreakdown warm;
  warm.regime = Regime::kWarmup;
  warm.l_ctc = 1.7;
  warm.l_l2 = 0.3;
  warm.l_total = warm.l_ctc + warm.l_l2;
  CHECK(warm.l_total == warm.l_ctc + warm.l_l2);
  LossBreakdown fine;
  fine.regime = Regime::kFinetune;
  fine.l_ctc = 0.9;
  fine.l_total = fine.l_ctc;
  CHECK(fine.l_total == fine.l_ctc);
}

TEST_CASE("transcript round-trips text and ids without blanks") {
  const auto t = Transcript::from_text("hello world");
  for (int id : t.token_ids) CHECK(id != LetterVocab::kBlankId);
  CHECK(Transcript::from_ids(t.token_ids).text == "hello world");
  CHECK(letter_vocab().size() == 29);
}

TEST_CASE("text normalization lowercases, strips, and collapses") {
  int stripped = 0;
  CHECK(letter_vocab().normalize("Hello, World", &stripped) == "hello world");
  CHECK(stripped == 1);
  CHECK(letter_vocab().normalize("  A   B  ") == "a b");
  CHECK(letter_vocab().normalize("it's") == "it's");
  // idempotent
  const std::string once = letter_vocab().normalize("Mixed  CASE?! ok");
  CHECK(letter_vocab().normalize(once) == once);
}
