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

#include "signpose/distance.hpp"

#include <cstdio>
#include <iostream>
#include <mutex>
#include <ostream>

namespace signpose {

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler_slot() {
  static WarningHandler h = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return h;
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  handler_slot() = std::move(handler);
}

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex());
  if (handler_slot()) handler_slot()(message);
}

MetricKind parse_metric_kind(const std::string& name) {
  if (name == "ndtw") return MetricKind::kNdtw;
  if (name == "dtw") return MetricKind::kDtw;
  if (name == "ape") return MetricKind::kApe;
  if (name == "nape") return MetricKind::kNape;
  if (name == "mse") return MetricKind::kMse;
  if (name == "nmse") return MetricKind::kNmse;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + name + "'");
}

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kNdtw: return "ndtw";
    case MetricKind::kDtw: return "dtw";
    case MetricKind::kApe: return "ape";
    case MetricKind::kNape: return "nape";
    case MetricKind::kMse: return "mse";
    case MetricKind::kNmse: return "nmse";
  }
  return "unknown";
}

Metric make_metric(MetricKind kind, const DtwOptions& dtw, std::vector<Index> used) {
  Metric m;
  m.name = to_string(kind);
  const bool normalized =
      kind == MetricKind::kNdtw || kind == MetricKind::kNape || kind == MetricKind::kNmse;
  if (normalized) {
    m.prepare = [](const PoseSequenced& p) { return normalize_by_shoulders(p); };
  } else {
    m.prepare = [](const PoseSequenced& p) { return p; };
  }

  // An empty `used` means the layout default, resolved per call.
  auto keypoints = [used = std::move(used)](const PoseSequenced& ref) {
    return used.empty() ? ref.layout().distance_keypoints() : used;
  };
  switch (kind) {
    case MetricKind::kNdtw:
      m.distance = [keypoints, dtw](const PoseSequenced& a, const PoseSequenced& b) {
        const auto k = keypoints(a);
        return ndtw(a, b, std::span<const Index>(k), dtw);
      };
      break;
    case MetricKind::kDtw:
      m.distance = [keypoints, dtw](const PoseSequenced& a, const PoseSequenced& b) {
        const auto k = keypoints(a);
        return trajectory_dtw(a, b, std::span<const Index>(k), dtw);
      };
      break;
    case MetricKind::kApe:
    case MetricKind::kNape:
      m.distance = [keypoints](const PoseSequenced& a, const PoseSequenced& b) {
        const auto k = keypoints(a);
        return ape(a, b, std::span<const Index>(k));
      };
      break;
    case MetricKind::kMse:
    case MetricKind::kNmse:
      m.distance = [keypoints](const PoseSequenced& a, const PoseSequenced& b) {
        const auto k = keypoints(a);
        return mse(a, b, std::span<const Index>(k));
      };
      break;
  }
  return m;
}

DistanceMatrix distance_matrix(std::span<const std::string> ids,
                               std::span<const PoseSequenced> poses, const Metric& metric) {
  if (ids.size() != poses.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ids and poses differ in length");
  }
  std::vector<PoseSequenced> prepared;
  prepared.reserve(poses.size());
  for (const auto& p : poses) prepared.push_back(metric.prepare(p));

  DistanceMatrix out;
  out.rows.assign(ids.begin(), ids.end());
  out.cols = out.rows;
  const Index n = static_cast<Index>(ids.size());
  out.values.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out.values(i, j) = metric.distance(prepared[i], prepared[j]);
  }
  return out;
}

void write_csv(std::ostream& out, const DistanceMatrix& matrix) {
  out << "reference";
  for (const auto& c : matrix.cols) out << ',' << c;
  out << '\n';
  char cell[32];
  for (Index i = 0; i < matrix.values.rows(); ++i) {
    out << matrix.rows[static_cast<size_t>(i)];
    for (Index j = 0; j < matrix.values.cols(); ++j) {
      std::snprintf(cell, sizeof(cell), "%.9g", matrix.values(i, j));
      out << ',' << cell;
    }
    out << '\n';
  }
}

}  // namespace signpose
