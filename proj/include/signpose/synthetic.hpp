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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "signpose/eval.hpp"
#include "signpose/pose.hpp"

namespace signpose::synthetic {

/// Motion pattern of one synthetic sign: a Lissajous-style path of the
/// dominant wrist, a handshape, and an optional secondary-hand motion.
struct SignClass {
  Eigen::Vector2d center{-0.3, 0.4};
  Eigen::Vector2d amplitude{0.3, 0.3};
  Eigen::Vector2d frequency{1.0, 1.0};
  Eigen::Vector2d phase{0.0, 0.0};
  double finger_spread = 0.3;
  double hand_rotation = 0.0;
  double hand_rotation_rate = 0.0;
  double secondary_amplitude = 0.0;
};

/// Per-signer geometry: the image placement and body proportions.
struct Signer {
  Eigen::Vector2d offset{640.0, 300.0};
  double scale = 150.0;  // pixels per shoulder width
  double shoulder_width = 1.0;
  double arm_length = 1.0;
  double motion_gain = 1.0;
  bool left_handed = false;
};

struct SampleOptions {
  Index min_frames = 30;
  Index max_frames = 50;
  /// Strength of the monotone time warp, 0 = uniform timing.
  double warp = 0.6;
  /// Probability that a keypoint is missing in a frame.
  double dropout = 0.1;
  /// Per-keypoint positional noise, in shoulder widths.
  double jitter = 0.003;
  /// Inclusive confidence range for present keypoints.
  double min_confidence = 0.6;
  double max_confidence = 1.0;
};

SignClass random_sign_class(std::mt19937_64& rng);
Signer random_signer(std::mt19937_64& rng);

/// Canonical pose (shoulder width 1, neck at the origin, y down) at motion
/// phase `u` in [0, 1].
void canonical_frame(const SignClass& sign, const Signer& signer, double u,
                     Eigen::Ref<Eigen::Array2Xd> points);

/// One performance of `sign` by `signer`; `frames` = 0 draws the length
/// from `options`.
PoseSequenced perform(const SignClass& sign, const Signer& signer, const SampleOptions& options,
                      std::mt19937_64& rng, Index frames = 0);

struct BenchmarkOptions {
  int classes = 10;
  int samples_per_class = 12;
  int signers = 43;
  std::uint64_t seed = 0;
  SampleOptions sample;
};

/// Labelled dataset of `classes` signs, each performed by random signers.
/// Ids are zero-padded so lexicographic order matches generation order.
std::vector<LabeledSample> make_benchmark(const BenchmarkOptions& options);

}  // namespace signpose::synthetic
