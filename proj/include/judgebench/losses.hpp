/*
 * Copyright 2026 The judgebench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Reference implementation of the judge training objective.
//
// Each training sample is one accepted judgment: the log-probabilities of its
// tokens plus the logits over the answer vocabulary at the prediction
// position k. The per-sample loss is
//
//   -sum_{t != k} log pi(y_t) + g(position logits)
//
// and the batch loss is its mean over all samples. g is one of three mappings
// of the ground-truth answer's log-probability:
//
//   DPO          -log sigmoid(beta * (log pi(y*) - log pi(y-)))
//   Temperature  -log softmax(log pi / tau)[y*]
//   Margin       sum over the top_k wrong answers y- of
//                max(0, gamma - log pi(y*) + log pi(y-))
//
// Every mapping returns its analytic gradient with respect to the raw logits.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "judgebench/error.hpp"

namespace judgebench::losses {

struct LossParams {
  double beta = 0.1;
  double tau = 5.0;
  double gamma = 10.0;

  void validate() const {
    if (!(beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be > 0");
    if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
    if (!(gamma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be >= 0");
  }
};

// Logits over the candidate answer vocabulary at the prediction position.
struct PositionLogits {
  std::vector<double> logits;
  std::size_t true_index = 0;
  std::size_t wrong_index = 1;
  std::size_t top_k = 10;

  void validate() const {
    if (logits.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two answer logits");
    if (true_index >= logits.size() || wrong_index >= logits.size())
      throw Error(ErrorCode::kInvalidArgument, "answer index out of range");
    if (true_index == wrong_index)
      throw Error(ErrorCode::kInvalidArgument, "true and wrong answer must differ");
    for (double z : logits)
      if (!std::isfinite(z)) throw Error(ErrorCode::kInvalidArgument, "logits must be finite");
  }
};

struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;  // d value / d logits
};

enum class Mapping { DPO, Temperature, Margin };

inline std::string_view to_string(Mapping m) {
  switch (m) {
    case Mapping::DPO: return "dpo";
    case Mapping::Temperature: return "temperature";
    case Mapping::Margin: return "margin";
  }
  return "dpo";
}

inline double log_sum_exp(std::span<const double> x) {
  const double hi = *std::max_element(x.begin(), x.end());
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

inline std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double lse = log_sum_exp(logits);
  std::vector<double> out(logits.size());
  std::transform(logits.begin(), logits.end(), out.begin(), [lse](double z) { return z - lse; });
  return out;
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Negative sum of the token log-probabilities, skipping the prediction
// position.
inline double sft_term(std::span<const double> sequence_logprobs, std::size_t k) {
  if (k >= sequence_logprobs.size())
    throw Error(ErrorCode::kInvalidArgument, "prediction position outside the sequence");
  double sum = 0.0;
  for (std::size_t t = 0; t < sequence_logprobs.size(); ++t)
    if (t != k) sum += sequence_logprobs[t];
  return -sum;
}

// The answer softmax normalizer cancels in log pi(y*) - log pi(y-), so the
// pairwise loss equals DPO restricted to the two candidate answers.
inline LossValue dpo_map(const PositionLogits& pl, const LossParams& p) {
  pl.validate();
  const double gap = pl.logits[pl.true_index] - pl.logits[pl.wrong_index];
  LossValue out;
  out.value = softplus(-p.beta * gap);
  out.gradient.assign(pl.logits.size(), 0.0);
  const double s = p.beta * sigmoid(-p.beta * gap);
  out.gradient[pl.true_index] = -s;
  out.gradient[pl.wrong_index] = s;
  return out;
}

inline LossValue temperature_map(const PositionLogits& pl, const LossParams& p) {
  pl.validate();
  const auto logp = log_softmax(pl.logits);
  std::vector<double> scaled(logp.size());
  std::transform(logp.begin(), logp.end(), scaled.begin(), [&](double v) { return v / p.tau; });
  const double lse = log_sum_exp(scaled);

  LossValue out;
  out.value = lse - scaled[pl.true_index];
  // d/dz_i = (q_i - [i == true]) / tau with q = softmax(log pi / tau); the
  // log-softmax Jacobian term vanishes because q sums to one.
  out.gradient.resize(logp.size());
  for (std::size_t i = 0; i < logp.size(); ++i)
    out.gradient[i] = (std::exp(scaled[i] - lse) - (i == pl.true_index ? 1.0 : 0.0)) / p.tau;
  return out;
}

// Indices of the top_k highest-logit answers other than the true one; equal
// logits are taken in index order.
inline std::vector<std::size_t> margin_negatives(const PositionLogits& pl) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pl.logits.size(); ++i)
    if (i != pl.true_index) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return pl.logits[a] > pl.logits[b]; });
  idx.resize(std::min(pl.top_k, idx.size()));
  return idx;
}

inline LossValue margin_map(const PositionLogits& pl, const LossParams& p) {
  pl.validate();
  if (pl.top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  LossValue out;
  out.gradient.assign(pl.logits.size(), 0.0);
  for (std::size_t j : margin_negatives(pl)) {
    // log pi(y-) - log pi(y*) = z_j - z_true: the normalizer drops out, and
    // leaving it out keeps unrelated logits from adding rounding noise.
    const double hinge = p.gamma - (pl.logits[pl.true_index] - pl.logits[j]);
    if (hinge > 0.0) {
      out.value += hinge;
      out.gradient[j] += 1.0;
      out.gradient[pl.true_index] -= 1.0;
    }
  }
  return out;
}

inline LossValue apply_mapping(Mapping m, const PositionLogits& pl, const LossParams& p) {
  switch (m) {
    case Mapping::DPO: return dpo_map(pl, p);
    case Mapping::Temperature: return temperature_map(pl, p);
    case Mapping::Margin: return margin_map(pl, p);
  }
  return dpo_map(pl, p);
}

// One accepted judgment.
struct LossSample {
  std::vector<double> sequence_logprobs;
  std::size_t prediction_position = 0;
  PositionLogits at_prediction;
};

inline double sample_loss(const LossSample& s, Mapping m, const LossParams& p) {
  return sft_term(s.sequence_logprobs, s.prediction_position) + apply_mapping(m, s.at_prediction, p).value;
}

// Mean over every sample in the batch (all M_i candidates of all N
// instructions), i.e. the 1/(NM) normalization with per-instruction counts.
inline double total_loss(std::span<const LossSample> batch, Mapping m, const LossParams& p) {
  p.validate();
  if (batch.empty()) throw Error(ErrorCode::kEmptyInput, "empty loss batch");
  double sum = 0.0;
  for (const auto& s : batch) sum += sample_loss(s, m, p);
  return sum / static_cast<double>(batch.size());
}

// Smallest |hinge argument| over the selected negatives, and the logit gap
// between the k-th and (k+1)-th negative (where the selection changes).
// grad_check is only meaningful when both are comfortably positive.
inline double margin_kink_distance(const PositionLogits& pl, const LossParams& p) {
  double dist = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < pl.logits.size(); ++i)
    if (i != pl.true_index) all.push_back(i);
  std::stable_sort(all.begin(), all.end(),
                   [&](std::size_t a, std::size_t b) { return pl.logits[a] > pl.logits[b]; });
  const std::size_t k = std::min(pl.top_k, all.size());
  for (std::size_t n = 0; n < k; ++n)
    dist = std::min(dist, std::abs(p.gamma - (pl.logits[pl.true_index] - pl.logits[all[n]])));
  if (k < all.size()) dist = std::min(dist, pl.logits[all[k - 1]] - pl.logits[all[k]]);
  return dist;
}

using MappingFn = std::function<LossValue(const PositionLogits&, const LossParams&)>;

// Max over coordinates of |analytic - numeric| / max(|analytic|, |numeric|, 1e-6),
// with the numeric gradient from central differences.
inline double grad_check(const MappingFn& fn, const PositionLogits& pl, const LossParams& p,
                         double step = 1e-5) {
  const auto analytic = fn(pl, p).gradient;
  double worst = 0.0;
  PositionLogits probe = pl;
  for (std::size_t i = 0; i < pl.logits.size(); ++i) {
    probe.logits[i] = pl.logits[i] + step;
    const double up = fn(probe, p).value;
    probe.logits[i] = pl.logits[i] - step;
    const double down = fn(probe, p).value;
    probe.logits[i] = pl.logits[i];
    const double numeric = (up - down) / (2.0 * step);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

inline double grad_check(Mapping m, const PositionLogits& pl, const LossParams& p, double step = 1e-5) {
  return grad_check([m](const PositionLogits& x, const LossParams& q) { return apply_mapping(m, x, q); },
                    pl, p, step);
}

// Random test point for grad_check: N(0, 3^2) logits, distinct true and wrong
// answers, and at least `min_gap` away from every margin kink.
inline PositionLogits random_check_point(std::mt19937_64& rng, std::size_t vocab, const LossParams& p,
                                         double min_gap = 1e-3) {
  std::normal_distribution<double> logit(0.0, 3.0);
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  for (;;) {
    PositionLogits pl;
    pl.logits.resize(vocab);
    for (auto& z : pl.logits) z = logit(rng);
    pl.true_index = pick(rng);
    do pl.wrong_index = pick(rng);
    while (pl.wrong_index == pl.true_index);
    if (margin_kink_distance(pl, p) > min_gap) return pl;
  }
}

}  // namespace judgebench::losses
