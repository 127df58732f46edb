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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "signpose/dtw.hpp"
#include "signpose/pose.hpp"
#include "signpose/synthetic.hpp"

namespace signpose::testing {

inline PoseSequenced random_sequence(std::mt19937_64& rng, Index frames, double dropout = 0.0,
                                     double spread = 1.0) {
  PoseSequenced seq(KeypointLayout::openpose137(), frames);
  std::normal_distribution<double> coord(0.0, spread);
  std::uniform_real_distribution<double> conf(0.3, 1.0);
  std::bernoulli_distribution drop(dropout);
  for (Index f = 0; f < frames; ++f) {
    for (Index k = 0; k < seq.keypoints(); ++k) {
      if (drop(rng)) continue;
      seq.set_keypoint(f, k, {coord(rng), coord(rng), conf(rng)});
    }
  }
  return seq;
}

/// Random sequence whose values are exactly representable in float.
inline PoseSequenced random_float_sequence(std::mt19937_64& rng, Index frames,
                                           double dropout = 0.0) {
  return random_sequence(rng, frames, dropout, 300.0).cast<float>().cast<double>();
}

inline Trajectory<double> random_trajectory(std::mt19937_64& rng, Index length,
                                            double missing = 0.0) {
  Trajectory<double> t(length, 2);
  std::normal_distribution<double> step(0.0, 1.0);
  std::bernoulli_distribution drop(missing);
  Eigen::RowVector2d p(step(rng), step(rng));
  for (Index i = 0; i < length; ++i) {
    p += Eigen::RowVector2d(step(rng), step(rng));
    t.row(i) = p;
    if (drop(rng)) t.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return t;
}

/// Straight from the three-case definition, without the library helpers.
inline double reference_point_cost(double rx, double ry, double ox, double oy) {
  if (std::isnan(rx) || std::isnan(ry)) return 0.0;
  if (std::isnan(ox) || std::isnan(oy)) return std::sqrt(rx * rx + ry * ry) / 2.0;
  return std::sqrt((rx - ox) * (rx - ox) + (ry - oy) * (ry - oy));
}

namespace detail {
inline double brute_force(const Trajectory<double>& a, const Trajectory<double>& b, Index i,
                          Index j) {
  const double here = reference_point_cost(a(i, 0), a(i, 1), b(j, 0), b(j, 1));
  if (i == 0 && j == 0) return here;
  double best = std::numeric_limits<double>::infinity();
  if (i > 0) best = std::min(best, brute_force(a, b, i - 1, j));
  if (j > 0) best = std::min(best, brute_force(a, b, i, j - 1));
  if (i > 0 && j > 0) best = std::min(best, brute_force(a, b, i - 1, j - 1));
  return here + best;
}
}  // namespace detail

/// Minimum over every monotone warping path by exhaustive recursion.
/// Exponential; keep both lengths small.
inline double brute_force_dtw(const Trajectory<double>& a, const Trajectory<double>& b) {
  return detail::brute_force(a, b, a.rows() - 1, b.rows() - 1);
}

/// Sequence with fixed shoulders in every frame and everything else missing.
inline PoseSequenced shoulder_sequence(Index frames, Eigen::Vector2d right, Eigen::Vector2d left) {
  PoseSequenced seq(KeypointLayout::openpose137(), frames);
  const auto& l = seq.layout();
  for (Index f = 0; f < frames; ++f) {
    seq.set_keypoint(f, l.right_shoulder, {right.x(), right.y(), 1.0});
    seq.set_keypoint(f, l.left_shoulder, {left.x(), left.y(), 1.0});
  }
  return seq;
}

/// A sign whose dominant hand clearly out-travels the other one.
inline synthetic::SignClass demo_sign() {
  synthetic::SignClass s;
  s.center = {-0.3, 0.4};
  s.amplitude = {0.35, 0.3};
  s.frequency = {1.5, 1.0};
  s.phase = {0.3, 1.1};
  s.finger_spread = 0.3;
  s.hand_rotation = 0.2;
  s.hand_rotation_rate = 0.5;
  return s;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("signpose_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace signpose::testing
