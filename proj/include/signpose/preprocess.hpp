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
#include <optional>
#include <utility>

#include "signpose/error.hpp"
#include "signpose/pose.hpp"

namespace signpose {

inline constexpr double kDefaultMinConfidence = 0.2;
inline constexpr double kDefaultHandednessRatio = 1.5;

/// Writes canonical NaN coordinates wherever confidence is 0.
template <class Scalar>
void canonicalize_missing(PoseSequence<Scalar>& seq) {
  const auto missing = seq.confidence() == Scalar(0);
  seq.x() = missing.select(PoseSequence<Scalar>::nan(), seq.x());
  seq.y() = missing.select(PoseSequence<Scalar>::nan(), seq.y());
}

template <class Scalar>
PoseSequence<Scalar> filter_low_confidence(const PoseSequence<Scalar>& seq,
                                           double c_min = kDefaultMinConfidence) {
  if (!(c_min >= 0.0 && c_min <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "c_min must lie in [0, 1]");
  }
  PoseSequence<Scalar> out = seq;
  out.confidence() = (seq.confidence() < Scalar(c_min)).select(Scalar(0), seq.confidence());
  canonicalize_missing(out);
  return out;
}

/// True if frame `f` is uninformative: the face is not identified on
/// average or neither wrist is.
template <class Scalar>
bool is_meaningless_frame(const PoseSequence<Scalar>& seq, Index f, double c_min) {
  const KeypointLayout& l = seq.layout();
  const double face_sum = seq.confidence().row(f).segment(l.face.begin, l.face.size).sum();
  const double wrists = seq.confidence()(f, l.right_wrist) + seq.confidence()(f, l.left_wrist);
  return face_sum <= c_min * static_cast<double>(l.face.size) || wrists <= c_min;
}

/// Half-open range [first, last) of frames kept after trimming; empty when
/// every frame is meaningless.
template <class Scalar>
std::pair<Index, Index> informative_frame_range(const PoseSequence<Scalar>& seq,
                                                double c_min = kDefaultMinConfidence) {
  Index first = 0;
  Index last = seq.frames();
  while (first < last && is_meaningless_frame(seq, first, c_min)) ++first;
  while (last > first && is_meaningless_frame(seq, last - 1, c_min)) --last;
  return {first, last};
}

template <class Scalar>
PoseSequence<Scalar> trim_meaningless_frames(const PoseSequence<Scalar>& seq,
                                             double c_min = kDefaultMinConfidence) {
  require_non_empty(seq, "cannot trim an empty sequence");
  const auto [first, last] = informative_frame_range(seq, c_min);
  if (first == last) {
    throw Error(ErrorCode::kAllFramesTrimmed, "no informative frame remains");
  }
  return seq.slice(first, last - first);
}

template <class Scalar>
PoseSequence<Scalar> mask_legs(const PoseSequence<Scalar>& seq) {
  PoseSequence<Scalar> out = seq;
  for (Index k : seq.layout().waist_down) {
    out.confidence().col(k).setZero();
    out.x().col(k).setConstant(PoseSequence<Scalar>::nan());
    out.y().col(k).setConstant(PoseSequence<Scalar>::nan());
  }
  return out;
}

/// Mean x of every present shoulder observation, snapped to a 2^-16 grid.
///
/// The snapping keeps `flip_horizontal` an exact involution for
/// float32-representable coordinates: the reflected data has the same
/// snapped axis, and 2*axis - x is computed without rounding.
template <class Scalar>
double mirror_axis(const PoseSequence<Scalar>& seq) {
  const KeypointLayout& l = seq.layout();
  double sum = 0;
  Index count = 0;
  for (Index k : {l.right_shoulder, l.left_shoulder}) {
    for (Index f = 0; f < seq.frames(); ++f) {
      if (seq.missing(f, k)) continue;
      sum += static_cast<double>(seq.x()(f, k));
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::kMissingShoulders, "no shoulder keypoint in any frame");
  constexpr double grid = 65536.0;
  // Ties go to even grid points; the reflected mean then snaps back to the
  // same axis even when it falls halfway between two grid points.
  return std::nearbyint(sum / static_cast<double>(count) * grid) / grid;
}

/// Reflects x about `axis` and swaps left/right keypoint channels.
template <class Scalar>
PoseSequence<Scalar> flip_horizontal(const PoseSequence<Scalar>& seq, double axis) {
  const auto& mirror = seq.layout().mirror_map;
  PoseSequence<Scalar> out(seq.layout_ptr(), seq.frames(), seq.fps());
  const Scalar twice_axis = static_cast<Scalar>(2.0 * axis);
  for (Index k = 0; k < seq.keypoints(); ++k) {
    const Index src = mirror[k];
    out.x().col(k) = twice_axis - seq.x().col(src);
    out.y().col(k) = seq.y().col(src);
    out.confidence().col(k) = seq.confidence().col(src);
  }
  canonicalize_missing(out);
  return out;
}

template <class Scalar>
PoseSequence<Scalar> flip_horizontal(const PoseSequence<Scalar>& seq) {
  return flip_horizontal(seq, mirror_axis(seq));
}

/// Sum of segment lengths between consecutive frames where keypoint `k` is
/// present in both.
template <class Scalar>
double path_length(const PoseSequence<Scalar>& seq, Index k) {
  double length = 0;
  for (Index f = 1; f < seq.frames(); ++f) {
    if (seq.missing(f - 1, k) || seq.missing(f, k)) continue;
    const double dx = static_cast<double>(seq.x()(f, k) - seq.x()(f - 1, k));
    const double dy = static_cast<double>(seq.y()(f, k) - seq.y()(f - 1, k));
    length += std::hypot(dx, dy);
  }
  return length;
}

/// Left-handed when the left wrist travels more than `ratio` times as far as
/// the right wrist. Ties resolve to right-handed.
template <class Scalar>
bool detect_left_handed(const PoseSequence<Scalar>& seq,
                        double ratio = kDefaultHandednessRatio) {
  const KeypointLayout& l = seq.layout();
  const bool any_wrist = (seq.confidence().col(l.left_wrist) > Scalar(0)).any() ||
                         (seq.confidence().col(l.right_wrist) > Scalar(0)).any();
  if (!any_wrist) throw Error(ErrorCode::kNoWristData, "both wrists missing in every frame");
  return path_length(seq, l.left_wrist) > ratio * path_length(seq, l.right_wrist);
}

struct ShoulderStats {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double mean_distance = 0;
  Index frames_used = 0;
};

/// Shoulder midpoint and width averaged over frames where both shoulders
/// are present.
template <class Scalar>
std::optional<ShoulderStats> shoulder_stats(const PoseSequence<Scalar>& seq) {
  const KeypointLayout& l = seq.layout();
  ShoulderStats s;
  for (Index f = 0; f < seq.frames(); ++f) {
    if (seq.missing(f, l.right_shoulder) || seq.missing(f, l.left_shoulder)) continue;
    const Eigen::Vector2d r(seq.x()(f, l.right_shoulder), seq.y()(f, l.right_shoulder));
    const Eigen::Vector2d left(seq.x()(f, l.left_shoulder), seq.y()(f, l.left_shoulder));
    s.center += 0.5 * (r + left);
    s.mean_distance += (r - left).norm();
    ++s.frames_used;
  }
  if (s.frames_used == 0) return std::nullopt;
  s.center /= static_cast<double>(s.frames_used);
  s.mean_distance /= static_cast<double>(s.frames_used);
  return s;
}

inline constexpr double kMinShoulderDistance = 1e-9;

/// Translates the mean shoulder midpoint to the origin and scales so the
/// mean shoulder distance is 1. `scale_out` receives the applied factor.
template <class Scalar>
PoseSequence<Scalar> normalize_by_shoulders(const PoseSequence<Scalar>& seq,
                                            double* scale_out = nullptr) {
  const auto stats = shoulder_stats(seq);
  if (!stats) throw Error(ErrorCode::kMissingShoulders, "no frame has both shoulders");
  if (stats->mean_distance < kMinShoulderDistance) {
    throw Error(ErrorCode::kDegenerateShoulders, "mean shoulder distance is ~0");
  }
  const double scale = 1.0 / stats->mean_distance;
  PoseSequence<Scalar> out = seq;
  out.x() = ((seq.x().template cast<double>() - stats->center.x()) * scale).template cast<Scalar>();
  out.y() = ((seq.y().template cast<double>() - stats->center.y()) * scale).template cast<Scalar>();
  canonicalize_missing(out);
  if (scale_out) *scale_out = scale;
  return out;
}

/// True when shoulder stats are within `tol` of center (0,0) and width 1.
template <class Scalar>
bool is_shoulder_normalized(const PoseSequence<Scalar>& seq, double tol = 1e-6) {
  const auto stats = shoulder_stats(seq);
  return stats && std::abs(stats->mean_distance - 1.0) <= tol && stats->center.norm() <= tol;
}

struct PreprocessConfig {
  double c_min = kDefaultMinConfidence;
  bool flip_left_handed = true;
  double handedness_ratio = kDefaultHandednessRatio;
  bool normalize = true;
};

struct PreprocessLog {
  Index frames_in = 0;
  Index frames_out = 0;
  Index trimmed_leading = 0;
  Index trimmed_trailing = 0;
  bool flipped = false;
  double scale = 1.0;
};

/// filter -> trim -> mask legs -> flip if left-handed -> normalize.
template <class Scalar>
PoseSequence<Scalar> preprocess(const PoseSequence<Scalar>& seq,
                                const PreprocessConfig& config = {},
                                PreprocessLog* log = nullptr) {
  require_non_empty(seq, "cannot preprocess an empty sequence");
  PreprocessLog entry;
  entry.frames_in = seq.frames();

  PoseSequence<Scalar> out = filter_low_confidence(seq, config.c_min);
  const auto [first, last] = informative_frame_range(out, config.c_min);
  out = trim_meaningless_frames(out, config.c_min);
  entry.trimmed_leading = first;
  entry.trimmed_trailing = seq.frames() - last;

  out = mask_legs(out);
  if (config.flip_left_handed && detect_left_handed(out, config.handedness_ratio)) {
    out = flip_horizontal(out);
    entry.flipped = true;
  }
  if (config.normalize) out = normalize_by_shoulders(out, &entry.scale);

  entry.frames_out = out.frames();
  if (log) *log = entry;
  return out;
}

}  // namespace signpose
