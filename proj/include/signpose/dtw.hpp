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
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "signpose/error.hpp"
#include "signpose/pose.hpp"

namespace signpose {

/// One keypoint's path through a sequence; rows with a NaN coordinate are
/// missing points.
template <class Scalar>
using Trajectory = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <class Scalar>
Trajectory<Scalar> trajectory(const PoseSequence<Scalar>& seq, Index keypoint) {
  Trajectory<Scalar> t(seq.frames(), 2);
  t.col(0) = seq.x().col(keypoint).matrix();
  t.col(1) = seq.y().col(keypoint).matrix();
  return t;
}

template <class Scalar>
inline bool point_missing(Scalar x, Scalar y) {
  return std::isnan(x) || std::isnan(y);
}

/// Reference-asymmetric local cost: 0 if the reference point is missing,
/// half the reference norm if only the other point is missing, Euclidean
/// distance otherwise.
template <class Scalar>
inline Scalar point_distance(Scalar rx, Scalar ry, Scalar ox, Scalar oy) {
  if (point_missing(rx, ry)) return Scalar(0);
  if (point_missing(ox, oy)) return std::hypot(rx, ry) / Scalar(2);
  return std::hypot(rx - ox, ry - oy);
}

template <class DerivedRef, class DerivedOther>
typename DerivedRef::Scalar point_distance(const Eigen::MatrixBase<DerivedRef>& ref,
                                           const Eigen::MatrixBase<DerivedOther>& other) {
  return point_distance(ref(0), ref(1), other(0), other(1));
}

namespace dtw_detail {

/// Inclusive column band [lo, hi] for one row of the cost matrix.
struct Band {
  Index lo = 0;
  Index hi = 0;
};

using Window = std::vector<Band>;
using Path = std::vector<std::pair<Index, Index>>;

template <class DA, class DB>
void require_non_empty(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw Error(ErrorCode::kEmptyTrajectory, "DTW needs two non-empty trajectories");
  }
}

/// Banded DP that also recovers the optimal path.
template <class DA, class DB>
double windowed(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                const Window& window, Path* path) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Index n = a.rows();
  std::vector<Index> offset(n + 1, 0);
  for (Index i = 0; i < n; ++i) offset[i + 1] = offset[i] + window[i].hi - window[i].lo + 1;
  std::vector<double> cost(static_cast<size_t>(offset[n]), inf);

  auto at = [&](Index i, Index j) -> double {
    if (i < 0 || j < 0 || j < window[i].lo || j > window[i].hi) return inf;
    return cost[offset[i] + j - window[i].lo];
  };

  for (Index i = 0; i < n; ++i) {
    for (Index j = window[i].lo; j <= window[i].hi; ++j) {
      const double local = point_distance<double>(a(i, 0), a(i, 1), b(j, 0), b(j, 1));
      double best;
      if (i == 0 && j == 0) {
        best = 0;
      } else {
        best = std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
      }
      cost[offset[i] + j - window[i].lo] = local + best;
    }
  }

  const Index m = b.rows();
  if (path) {
    path->clear();
    Index i = n - 1;
    Index j = m - 1;
    path->emplace_back(i, j);
    while (i > 0 || j > 0) {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
      path->emplace_back(i, j);
    }
    std::reverse(path->begin(), path->end());
  }
  return at(n - 1, m - 1);
}

template <class DA, class DB>
double full(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b, Path* path) {
  return windowed(a, b, Window(a.rows(), Band{0, b.rows() - 1}), path);
}

/// Averages consecutive pairs; a single present point of a pair survives,
/// an odd tail is kept as is.
template <class Derived>
Trajectory<double> coarsen(const Eigen::MatrixBase<Derived>& t) {
  const Index n = t.rows();
  Trajectory<double> out((n + 1) / 2, 2);
  for (Index i = 0; i < out.rows(); ++i) {
    const Index a = 2 * i;
    const Index b = std::min(a + 1, n - 1);
    const bool ma = point_missing<double>(t(a, 0), t(a, 1));
    const bool mb = point_missing<double>(t(b, 0), t(b, 1));
    if (ma && mb) {
      out.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
    } else if (ma) {
      out.row(i) = t.row(b).template cast<double>();
    } else if (mb) {
      out.row(i) = t.row(a).template cast<double>();
    } else {
      out.row(i) = 0.5 * (t.row(a).template cast<double>() + t.row(b).template cast<double>());
    }
  }
  return out;
}

/// Projects a coarse path onto the finer grid, widened by `radius` coarse
/// cells, and repairs the band so a monotone path always exists.
inline Window expand_window(const Path& coarse, Index n, Index m, Index radius) {
  Window w(n, Band{m, -1});
  for (const auto& [ci, cj] : coarse) {
    const Index row_lo = std::max<Index>(0, 2 * (ci - radius));
    const Index row_hi = std::min<Index>(n - 1, 2 * (ci + radius) + 1);
    const Index col_lo = std::max<Index>(0, 2 * (cj - radius));
    const Index col_hi = std::min<Index>(m - 1, 2 * (cj + radius) + 1);
    for (Index i = row_lo; i <= row_hi; ++i) {
      w[i].lo = std::min(w[i].lo, col_lo);
      w[i].hi = std::max(w[i].hi, col_hi);
    }
  }
  w.front().lo = 0;
  w.back().hi = m - 1;
  for (Index i = 1; i < n; ++i) w[i].hi = std::max(w[i].hi, w[i - 1].hi);
  for (Index i = n - 2; i >= 0; --i) w[i].lo = std::min(w[i].lo, w[i + 1].lo);
  for (Index i = 1; i < n; ++i) w[i].lo = std::min(w[i].lo, w[i - 1].hi + 1);
  return w;
}

template <class DA, class DB>
double fast(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b, Index radius,
            Path* path) {
  const Index base = 2 * radius + 2;
  if (a.rows() <= base || b.rows() <= base) return full(a, b, path);
  Path coarse;
  fast(coarsen(a), coarsen(b), radius, &coarse);
  return windowed(a, b, expand_window(coarse, a.rows(), b.rows(), radius), path);
}

}  // namespace dtw_detail

/// Accumulated cost of the optimal monotone alignment, with
/// `point_distance` as the local cost. Not divided by path length.
template <class DA, class DB>
double dtw_exact(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  dtw_detail::require_non_empty(a, b);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Index n = a.rows();
  const Index m = b.rows();
  std::vector<double> prev(static_cast<size_t>(m), inf);
  std::vector<double> curr(static_cast<size_t>(m), inf);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      const double local = point_distance<double>(a(i, 0), a(i, 1), b(j, 0), b(j, 1));
      double best;
      if (i == 0 && j == 0) {
        best = 0;
      } else {
        const double diag = (i > 0 && j > 0) ? prev[j - 1] : inf;
        const double up = i > 0 ? prev[j] : inf;
        const double left = j > 0 ? curr[j - 1] : inf;
        best = std::min({diag, up, left});
      }
      curr[j] = local + best;
    }
    std::swap(prev, curr);
  }
  return prev[m - 1];
}

/// Multiscale approximation: coarsen both inputs, align recursively, then
/// refine inside a band of `radius` cells around the projected path.
/// Inputs no longer than 2 * radius + 2 are solved exactly.
/// Cost grows with the square of the radius.
template <class DA, class DB>
double dtw_fast(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                Index radius = 1) {
  dtw_detail::require_non_empty(a, b);
  if (radius < 1) throw Error(ErrorCode::kInvalidArgument, "radius must be >= 1");
  const Index base = 2 * radius + 2;
  if (a.rows() <= base || b.rows() <= base) return dtw_exact(a, b);
  // Search windows of different radii are not nested, so keep the best path
  // over every radius up to `radius`; the result never grows with radius.
  double best = dtw_detail::fast(a, b, radius, nullptr);
  for (Index r = radius - 1; r >= 1; --r) best = std::min(best, dtw_detail::fast(a, b, r, nullptr));
  return best;
}

}  // namespace signpose
