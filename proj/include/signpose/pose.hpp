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
#include <cstring>
#include <limits>
#include <utility>

#include "signpose/error.hpp"
#include "signpose/layout.hpp"

namespace signpose {

template <class Scalar_>
struct Keypoint {
  using Scalar = Scalar_;
  Scalar x = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar y = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar confidence = 0;

  bool missing() const { return confidence == Scalar(0); }
};

/// Frames x keypoints planes of x, y and confidence.
///
/// A keypoint is missing when its confidence is 0; missing keypoints carry
/// NaN coordinates. Columns are contiguous, so a keypoint trajectory is a
/// single column of `x()` and `y()`.
template <class Scalar_>
class PoseSequence {
 public:
  using Scalar = Scalar_;
  using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  PoseSequence() : PoseSequence(KeypointLayout::openpose137(), 0) {}

  /// All keypoints start out missing.
  PoseSequence(LayoutPtr layout, Index frames, Scalar fps = Scalar(25))
      : layout_(std::move(layout)),
        fps_(fps),
        x_(Plane::Constant(frames, layout_->total(), nan())),
        y_(Plane::Constant(frames, layout_->total(), nan())),
        c_(Plane::Zero(frames, layout_->total())) {
    if (!(fps > Scalar(0))) throw Error(ErrorCode::kInvalidArgument, "fps must be positive");
  }

  static constexpr Scalar nan() { return std::numeric_limits<Scalar>::quiet_NaN(); }

  const KeypointLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  Scalar fps() const { return fps_; }
  void set_fps(Scalar fps) { fps_ = fps; }

  Index frames() const { return c_.rows(); }
  Index keypoints() const { return c_.cols(); }
  bool empty() const { return frames() == 0; }

  Plane& x() { return x_; }
  Plane& y() { return y_; }
  Plane& confidence() { return c_; }
  const Plane& x() const { return x_; }
  const Plane& y() const { return y_; }
  const Plane& confidence() const { return c_; }

  bool missing(Index frame, Index kp) const { return c_(frame, kp) == Scalar(0); }

  Keypoint<Scalar> keypoint(Index frame, Index kp) const {
    return {x_(frame, kp), y_(frame, kp), c_(frame, kp)};
  }

  /// Stores `k`; a zero confidence stores NaN coordinates.
  void set_keypoint(Index frame, Index kp, const Keypoint<Scalar>& k) {
    c_(frame, kp) = k.confidence;
    if (k.confidence == Scalar(0)) {
      x_(frame, kp) = nan();
      y_(frame, kp) = nan();
    } else {
      x_(frame, kp) = k.x;
      y_(frame, kp) = k.y;
    }
  }

  void set_missing(Index frame, Index kp) { set_keypoint(frame, kp, Keypoint<Scalar>{}); }

  /// Frames [begin, begin + count).
  PoseSequence slice(Index begin, Index count) const {
    PoseSequence out(layout_, count, fps_);
    out.x_ = x_.middleRows(begin, count);
    out.y_ = y_.middleRows(begin, count);
    out.c_ = c_.middleRows(begin, count);
    return out;
  }

  /// `frame` of this sequence repeated `count` times.
  PoseSequence repeat_frame(Index frame, Index count) const {
    PoseSequence out(layout_, count, fps_);
    out.x_ = x_.row(frame).replicate(count, 1);
    out.y_ = y_.row(frame).replicate(count, 1);
    out.c_ = c_.row(frame).replicate(count, 1);
    return out;
  }

  bool same_shape(const PoseSequence& other) const {
    return frames() == other.frames() && *layout_ == *other.layout_;
  }

  template <class NewScalar>
  PoseSequence<NewScalar> cast() const {
    PoseSequence<NewScalar> out(layout_, frames(), static_cast<NewScalar>(fps_));
    out.x() = x_.template cast<NewScalar>();
    out.y() = y_.template cast<NewScalar>();
    out.confidence() = c_.template cast<NewScalar>();
    return out;
  }

 private:
  LayoutPtr layout_;
  Scalar fps_;
  Plane x_;
  Plane y_;
  Plane c_;
};

using PoseSequenced = PoseSequence<double>;
using PoseSequencef = PoseSequence<float>;

/// Bitwise comparison of coordinates and confidences (NaN equals NaN when
/// the bit patterns agree).
template <class Scalar>
bool bit_equal(const PoseSequence<Scalar>& a, const PoseSequence<Scalar>& b) {
  if (!a.same_shape(b)) return false;
  auto plane_equal = [](const auto& p, const auto& q) {
    return std::memcmp(p.data(), q.data(), sizeof(Scalar) * p.size()) == 0;
  };
  return plane_equal(a.x(), b.x()) && plane_equal(a.y(), b.y()) &&
         plane_equal(a.confidence(), b.confidence());
}

template <class Scalar>
void require_non_empty(const PoseSequence<Scalar>& seq, const char* what) {
  if (seq.empty()) throw Error(ErrorCode::kEmptySequence, what);
}

template <class Scalar>
void require_same_shape(const PoseSequence<Scalar>& a, const PoseSequence<Scalar>& b,
                        const char* what) {
  if (!a.same_shape(b)) throw Error(ErrorCode::kShapeMismatch, what);
}

}  // namespace signpose
