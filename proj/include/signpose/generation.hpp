/*
 * Copyright 2026 The signpose Authors.
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

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "signpose/error.hpp"
#include "signpose/pose.hpp"
#include "signpose/vocabulary.hpp"

namespace signpose {

/// Step size used for the last step, where the schedule difference is
/// undefined.
inline constexpr double kFinalStepSize = 0.1;

/// Generation timetable for T steps: delta(t) = log_T(T - t) falls from 1 at
/// t = 0 to 0 at t = T - 1, and alpha(t) = delta(t) - delta(t + 1).
class GenerationSchedule {
 public:
  explicit GenerationSchedule(int steps) : steps_(steps) {
    if (steps < 2) throw Error(ErrorCode::kInvalidT, "schedule needs T >= 2");
    const double log_t = std::log(static_cast<double>(steps));
    delta_.resize(steps);
    for (int t = 0; t < steps; ++t) delta_[t] = std::log(static_cast<double>(steps - t)) / log_t;
    alpha_.resize(steps);
    for (int t = 0; t + 1 < steps; ++t) alpha_[t] = delta_[t] - delta_[t + 1];
    alpha_[steps - 1] = kFinalStepSize;
  }

  int steps() const { return steps_; }
  double delta(int t) const { return delta_.at(static_cast<size_t>(t)); }
  double alpha(int t) const { return alpha_.at(static_cast<size_t>(t)); }
  std::span<const double> deltas() const { return delta_; }
  std::span<const double> alphas() const { return alpha_; }

 private:
  int steps_;
  std::vector<double> delta_;
  std::vector<double> alpha_;
};

inline GenerationSchedule schedule(int steps) { return GenerationSchedule(steps); }

/// Scale applied to the refinement loss so that a full generation cycle
/// weighs the same for every T.
inline double loss_scale(int steps) {
  if (steps < 2) throw Error(ErrorCode::kInvalidT, "loss scale needs T >= 2");
  const double l = std::log(static_cast<double>(steps));
  return l * l;
}

/// alpha_t * p_t + (1 - alpha_t) * previous on coordinates; confidences come
/// from `previous`.
template <class Scalar>
PoseSequence<Scalar> blend_step(const PoseSequence<Scalar>& predicted,
                                const PoseSequence<Scalar>& previous, int t,
                                const GenerationSchedule& sched) {
  require_same_shape(predicted, previous, "blend_step");
  const Scalar a = static_cast<Scalar>(sched.alpha(t));
  const Scalar b = static_cast<Scalar>(1.0 - sched.alpha(t));
  PoseSequence<Scalar> out = previous;
  // Equal inputs are passed through so the blend has an exact fixed point.
  out.x() = (predicted.x() == previous.x()).select(previous.x(), a * predicted.x() + b * previous.x());
  out.y() = (predicted.y() == previous.y()).select(previous.y(), a * predicted.y() + b * previous.y());
  return out;
}

/// delta_t * s0 + (1 - delta_t) * previous; confidences come from `previous`.
template <class Scalar>
PoseSequence<Scalar> gt_interpolate(const PoseSequence<Scalar>& target,
                                    const PoseSequence<Scalar>& previous, int t,
                                    const GenerationSchedule& sched) {
  require_same_shape(target, previous, "gt_interpolate");
  const Scalar d = static_cast<Scalar>(sched.delta(t));
  const Scalar e = static_cast<Scalar>(1.0 - sched.delta(t));
  PoseSequence<Scalar> out = previous;
  out.x() = (target.x() == previous.x()).select(previous.x(), d * target.x() + e * previous.x());
  out.y() = (target.y() == previous.y()).select(previous.y(), d * target.y() + e * previous.y());
  return out;
}

/// Confidence-weighted squared error: mean over frames of the mean over
/// keypoints of c * |s - s_hat|^2. Zero-weight keypoints are skipped, so
/// their (NaN) coordinates never reach the sum.
template <class Scalar, class DerivedC>
double refinement_loss(const PoseSequence<Scalar>& target, const PoseSequence<Scalar>& predicted,
                       const Eigen::ArrayBase<DerivedC>& confidence) {
  require_same_shape(target, predicted, "refinement_loss");
  if (confidence.rows() != target.frames() || confidence.cols() != target.keypoints()) {
    throw Error(ErrorCode::kShapeMismatch, "refinement_loss: confidence plane shape");
  }
  require_non_empty(target, "refinement_loss on an empty sequence");
  double total = 0;
  for (Index f = 0; f < target.frames(); ++f) {
    double frame_sum = 0;
    for (Index k = 0; k < target.keypoints(); ++k) {
      const double c = confidence(f, k);
      if (c == 0.0) continue;
      const double dx = target.x()(f, k) - predicted.x()(f, k);
      const double dy = target.y()(f, k) - predicted.y()(f, k);
      frame_sum += c * (dx * dx + dy * dy);
    }
    total += frame_sum / static_cast<double>(target.keypoints());
  }
  return total / static_cast<double>(target.frames());
}

/// Uses the target's own confidences as weights.
template <class Scalar>
double refinement_loss(const PoseSequence<Scalar>& target, const PoseSequence<Scalar>& predicted) {
  return refinement_loss(target, predicted, target.confidence());
}

inline constexpr double kDefaultLengthLossWeight = 2e-5;

/// Sum over steps of ln(T)^2 * L_p + gamma * (N_real - N_pred)^2.
inline double total_loss(std::span<const double> refinement_losses, double real_length,
                         double predicted_length, int steps,
                         double gamma = kDefaultLengthLossWeight) {
  const double scale = loss_scale(steps);
  const double diff = real_length - predicted_length;
  double total = 0;
  for (double lp : refinement_losses) total += scale * lp + gamma * diff * diff;
  return total;
}

/// Architecture constants of the neural refiner, kept for reference only.
struct ModelConstants {
  int embedding_dim = 128;
  int attention_heads = 2;
  int text_encoder_depth = 2;
  int pose_encoder_depth = 4;
  int feedforward_dim = 2048;
};

struct GenerationConfig {
  int steps = 10;
  double epsilon = 1e-4;
  double teacher_forcing_p = 0.5;
  std::uint64_t seed = 0;
  double gamma = kDefaultLengthLossWeight;
  /// Adds epsilon * z after every blend during text2pose.
  bool inference_noise = false;
  ModelConstants model;
};

template <class Scalar>
void add_noise(PoseSequence<Scalar>& seq, double epsilon, std::mt19937_64& rng) {
  if (epsilon == 0.0) return;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index k = 0; k < seq.keypoints(); ++k) {
    for (Index f = 0; f < seq.frames(); ++f) {
      seq.x()(f, k) += static_cast<Scalar>(epsilon * normal(rng));
      seq.y()(f, k) += static_cast<Scalar>(epsilon * normal(rng));
    }
  }
}

/// Training-time step: with probability `p` the ground-truth interpolation,
/// otherwise the model blend; either way plus epsilon * z.
template <class Scalar>
PoseSequence<Scalar> teacher_forcing_step(const PoseSequence<Scalar>& target,
                                          const PoseSequence<Scalar>& previous,
                                          const PoseSequence<Scalar>& predicted, int t,
                                          const GenerationSchedule& sched, std::mt19937_64& rng,
                                          double p = 0.5, double epsilon = 1e-4) {
  require_same_shape(target, previous, "teacher_forcing_step");
  require_same_shape(predicted, previous, "teacher_forcing_step");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
  std::bernoulli_distribution coin(p);
  PoseSequence<Scalar> out = coin(rng) ? gt_interpolate(target, previous, t, sched)
                                       : blend_step(predicted, previous, t, sched);
  add_noise(out, epsilon, rng);
  return out;
}

/// Produces p_t from the current sequence, the text, and the step index.
/// The output must have the input's shape.
template <class Scalar>
using Refiner = std::function<PoseSequence<Scalar>(const PoseSequence<Scalar>& current,
                                                   const HamTokenSequence& text, int step)>;

/// Called after each step with the step index and the new sequence.
template <class Scalar>
using StepObserver = std::function<void(int step, const PoseSequence<Scalar>&)>;

/// Starts from `reference` repeated `length` times and applies T refinement
/// steps, t = T-1 down to 0. Returns the t = 0 sequence.
template <class Scalar>
PoseSequence<Scalar> text2pose(const HamTokenSequence& text, const PoseSequence<Scalar>& reference,
                               Index length, const Refiner<Scalar>& refiner,
                               const GenerationConfig& config = {},
                               const StepObserver<Scalar>& observer = {}) {
  if (length < 1) throw Error(ErrorCode::kInvalidLength, "sequence length must be >= 1");
  require_non_empty(reference, "text2pose needs a reference frame");
  const GenerationSchedule sched(config.steps);
  std::mt19937_64 rng(config.seed);

  PoseSequence<Scalar> current = reference.repeat_frame(0, length);
  if (observer) observer(config.steps, current);
  for (int t = config.steps - 1; t >= 0; --t) {
    const PoseSequence<Scalar> predicted = refiner(current, text, t);
    require_same_shape(predicted, current, "refiner output");
    current = blend_step(predicted, current, t, sched);
    if (config.inference_noise) add_noise(current, config.epsilon, rng);
    if (observer) observer(t, current);
  }
  return current;
}

namespace refiners {

template <class Scalar>
Refiner<Scalar> identity() {
  return [](const PoseSequence<Scalar>& current, const HamTokenSequence&, int) { return current; };
}

/// Always predicts `target`.
template <class Scalar>
Refiner<Scalar> oracle(PoseSequence<Scalar> target) {
  return [target = std::move(target)](const PoseSequence<Scalar>&, const HamTokenSequence&, int) {
    return target;
  };
}

/// Moves `rate` of the way from the current coordinates toward `target`.
template <class Scalar>
Refiner<Scalar> linear_nudge(PoseSequence<Scalar> target, double rate) {
  return [target = std::move(target), rate](const PoseSequence<Scalar>& current,
                                            const HamTokenSequence&, int) {
    require_same_shape(target, current, "linear_nudge");
    PoseSequence<Scalar> out = current;
    const Scalar r = static_cast<Scalar>(rate);
    const Scalar keep = static_cast<Scalar>(1.0 - rate);
    out.x() = keep * current.x() + r * target.x();
    out.y() = keep * current.y() + r * target.y();
    return out;
  };
}

}  // namespace refiners
}  // namespace signpose
