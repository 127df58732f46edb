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

#include <algorithm>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "signpose/dtw.hpp"
#include "signpose/error.hpp"
#include "signpose/pose.hpp"
#include "signpose/preprocess.hpp"

namespace signpose {

/// Receives non-fatal diagnostics such as length truncation in APE/MSE.
/// Defaults to standard error.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

/// Neumaier-compensated sum in index order.
inline double compensated_sum(std::span<const double> values) {
  double sum = 0;
  double carry = 0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

enum class DtwMethod { kFast, kExact };

struct DtwOptions {
  DtwMethod method = DtwMethod::kFast;
  Index radius = 1;
};

namespace distance_detail {

template <class Scalar>
void check_pair(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
                std::span<const Index> used) {
  require_non_empty(ref, "reference sequence is empty");
  require_non_empty(other, "other sequence is empty");
  if (!(ref.layout() == other.layout())) {
    throw Error(ErrorCode::kLayoutMismatch, "sequences use different layouts");
  }
  if (used.empty()) throw Error(ErrorCode::kEmptyUsedSet, "no keypoints selected");
  for (Index k : used) {
    if (k < 0 || k >= ref.keypoints()) {
      throw Error(ErrorCode::kInvalidArgument, "keypoint index out of range");
    }
  }
}

}  // namespace distance_detail

/// Mean per-keypoint DTW over `used`, on whatever coordinates the inputs
/// carry. `ndtw` is this on shoulder-normalized inputs.
template <class Scalar>
double trajectory_dtw(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
                      std::span<const Index> used, const DtwOptions& options = {}) {
  distance_detail::check_pair(ref, other, used);
  std::vector<double> per_keypoint(used.size());
  for (size_t i = 0; i < used.size(); ++i) {
    const Trajectory<Scalar> a = trajectory(ref, used[i]);
    const Trajectory<Scalar> b = trajectory(other, used[i]);
    per_keypoint[i] = options.method == DtwMethod::kExact ? dtw_exact(a, b)
                                                          : dtw_fast(a, b, options.radius);
  }
  return compensated_sum(per_keypoint) / static_cast<double>(used.size());
}

template <class Scalar>
double trajectory_dtw(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
                      const DtwOptions& options = {}) {
  const auto used = ref.layout().distance_keypoints();
  return trajectory_dtw(ref, other, std::span<const Index>(used), options);
}

inline constexpr double kNormalizationTolerance = 1e-6;

/// Normalized DTW distance from `ref` to `other`. Both inputs must already
/// be shoulder-normalized; unnormalized input raises kNotNormalized.
template <class Scalar>
double ndtw(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
            std::span<const Index> used, const DtwOptions& options = {}) {
  if (!is_shoulder_normalized(ref, kNormalizationTolerance) ||
      !is_shoulder_normalized(other, kNormalizationTolerance)) {
    throw Error(ErrorCode::kNotNormalized, "ndtw expects shoulder-normalized input");
  }
  return trajectory_dtw(ref, other, used, options);
}

template <class Scalar>
double ndtw(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
            const DtwOptions& options = {}) {
  const auto used = ref.layout().distance_keypoints();
  return ndtw(ref, other, std::span<const Index>(used), options);
}

namespace distance_detail {

/// Mean of `f(point_distance)` over aligned frames, skipping pairs whose
/// reference keypoint is missing. Unequal lengths are truncated.
template <class Scalar, class F>
double framewise_mean(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
                      std::span<const Index> used, const char* name, F&& f) {
  check_pair(ref, other, used);
  const Index frames = std::min(ref.frames(), other.frames());
  if (ref.frames() != other.frames()) {
    warn(std::string(name) + ": sequences have " + std::to_string(ref.frames()) + " and " +
         std::to_string(other.frames()) + " frames; truncating to " + std::to_string(frames));
  }
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(frames) * used.size());
  for (Index k : used) {
    for (Index t = 0; t < frames; ++t) {
      const double rx = ref.x()(t, k), ry = ref.y()(t, k);
      if (point_missing(rx, ry)) continue;
      terms.push_back(f(point_distance<double>(rx, ry, other.x()(t, k), other.y()(t, k))));
    }
  }
  if (terms.empty()) return 0.0;
  return compensated_sum(terms) / static_cast<double>(terms.size());
}

}  // namespace distance_detail

/// Average position error. A reference point whose counterpart is missing
/// costs half its norm, as in the DTW local cost.
template <class Scalar>
double ape(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
           std::span<const Index> used) {
  return distance_detail::framewise_mean(ref, other, used, "ape", [](double d) { return d; });
}

/// Mean squared coordinate error (squared point cost split over x and y).
template <class Scalar>
double mse(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
           std::span<const Index> used) {
  return distance_detail::framewise_mean(ref, other, used, "mse",
                                         [](double d) { return 0.5 * d * d; });
}

template <class Scalar>
double nape(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
            std::span<const Index> used) {
  return ape(normalize_by_shoulders(ref), normalize_by_shoulders(other), used);
}

template <class Scalar>
double nmse(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other,
            std::span<const Index> used) {
  return mse(normalize_by_shoulders(ref), normalize_by_shoulders(other), used);
}

#define SIGNPOSE_DEFAULT_USED_OVERLOAD(name)                                        \
  template <class Scalar>                                                           \
  double name(const PoseSequence<Scalar>& ref, const PoseSequence<Scalar>& other) { \
    const auto used = ref.layout().distance_keypoints();                            \
    return name(ref, other, std::span<const Index>(used));                          \
  }
SIGNPOSE_DEFAULT_USED_OVERLOAD(ape)
SIGNPOSE_DEFAULT_USED_OVERLOAD(mse)
SIGNPOSE_DEFAULT_USED_OVERLOAD(nape)
SIGNPOSE_DEFAULT_USED_OVERLOAD(nmse)
#undef SIGNPOSE_DEFAULT_USED_OVERLOAD

enum class MetricKind { kNdtw, kDtw, kApe, kNape, kMse, kNmse };

MetricKind parse_metric_kind(const std::string& name);
std::string to_string(MetricKind kind);

/// A pose distance split into a per-sample preparation step (run once per
/// sample by the evaluation harness) and the pairwise distance itself.
struct Metric {
  std::string name;
  std::function<PoseSequenced(const PoseSequenced&)> prepare;
  std::function<double(const PoseSequenced&, const PoseSequenced&)> distance;

  double operator()(const PoseSequenced& ref, const PoseSequenced& other) const {
    return distance(prepare(ref), prepare(other));
  }
};

/// `ndtw`, `nape` and `nmse` normalize in `prepare`; the rest pass through.
Metric make_metric(MetricKind kind, const DtwOptions& dtw = {},
                   std::vector<Index> used = {});

/// Reference ids as rows, candidate ids as columns.
struct DistanceMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  Eigen::MatrixXd values;
};

DistanceMatrix distance_matrix(std::span<const std::string> ids,
                               std::span<const PoseSequenced> poses, const Metric& metric);

/// CSV with a header row of candidate ids; cells use 9 significant digits.
void write_csv(std::ostream& out, const DistanceMatrix& matrix);

}  // namespace signpose
