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

#include <memory>
#include <string>
#include <vector>

#include "signpose/error.hpp"

namespace signpose {

using Index = Eigen::Index;

struct IndexRange {
  Index begin = 0;
  Index size = 0;

  Index end() const { return begin + size; }
  bool contains(Index i) const { return i >= begin && i < end(); }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Index map for a 2D skeleton made of body, face and two hand components.
///
/// `mirror_map[i]` is the keypoint that `i` becomes after a horizontal flip;
/// it must be an involution. `waist_down` lists the body points masked by
/// `mask_legs`, and `upper_body` the body points that take part in nDTW.
struct KeypointLayout {
  IndexRange body;
  IndexRange face;
  IndexRange left_hand;
  IndexRange right_hand;

  Index neck = 0;
  Index right_shoulder = 0;
  Index left_shoulder = 0;
  Index right_wrist = 0;
  Index left_wrist = 0;

  std::vector<Index> waist_down;
  std::vector<Index> upper_body;
  std::vector<Index> mirror_map;

  Index total() const {
    return body.size + face.size + left_hand.size + right_hand.size;
  }

  /// Upper body plus both hands, face excluded.
  std::vector<Index> distance_keypoints() const {
    std::vector<Index> out = upper_body;
    for (Index i = left_hand.begin; i < left_hand.end(); ++i) out.push_back(i);
    for (Index i = right_hand.begin; i < right_hand.end(); ++i) out.push_back(i);
    return out;
  }

  /// Throws kLayoutMismatch if the components do not tile [0, total) or the
  /// mirror map is not an involution.
  void validate() const;

  friend bool operator==(const KeypointLayout&, const KeypointLayout&) = default;

  /// OpenPose BODY_25 + 70-point face + 21-point hands, in that order.
  static std::shared_ptr<const KeypointLayout> openpose137();
};

using LayoutPtr = std::shared_ptr<const KeypointLayout>;

inline void KeypointLayout::validate() const {
  const Index n = total();
  if (body.begin != 0 || face.begin != body.end() ||
      left_hand.begin != face.end() || right_hand.begin != left_hand.end()) {
    throw Error(ErrorCode::kLayoutMismatch, "components must be contiguous");
  }
  if (static_cast<Index>(mirror_map.size()) != n) {
    throw Error(ErrorCode::kLayoutMismatch, "mirror map size differs from total");
  }
  for (Index i = 0; i < n; ++i) {
    const Index j = mirror_map[i];
    if (j < 0 || j >= n || mirror_map[j] != i) {
      throw Error(ErrorCode::kLayoutMismatch, "mirror map is not an involution");
    }
  }
  auto in_range = [n](Index i) { return i >= 0 && i < n; };
  for (Index i : {neck, right_shoulder, left_shoulder, right_wrist, left_wrist}) {
    if (!in_range(i)) throw Error(ErrorCode::kLayoutMismatch, "named index out of range");
  }
  for (Index i : waist_down) {
    if (!body.contains(i)) throw Error(ErrorCode::kLayoutMismatch, "leg index outside body");
  }
  for (Index i : upper_body) {
    if (!body.contains(i)) throw Error(ErrorCode::kLayoutMismatch, "upper-body index outside body");
  }
}

inline std::shared_ptr<const KeypointLayout> KeypointLayout::openpose137() {
  static const std::shared_ptr<const KeypointLayout> layout = [] {
    auto l = std::make_shared<KeypointLayout>();
    l->body = {0, 25};
    l->face = {25, 70};
    l->left_hand = {95, 21};
    l->right_hand = {116, 21};

    // BODY_25: 1 neck, 2/5 shoulders, 4/7 wrists.
    l->neck = 1;
    l->right_shoulder = 2;
    l->left_shoulder = 5;
    l->right_wrist = 4;
    l->left_wrist = 7;
    // Hips, knees, ankles and feet.
    l->waist_down = {8, 9, 10, 11, 12, 13, 14, 19, 20, 21, 22, 23, 24};
    // Nose, neck, arms, eyes, ears.
    l->upper_body = {0, 1, 2, 3, 4, 5, 6, 7, 15, 16, 17, 18};

    std::vector<Index>& m = l->mirror_map;
    m.resize(137);
    for (Index i = 0; i < 137; ++i) m[i] = i;
    auto swap_pair = [&m](Index a, Index b) {
      m[a] = b;
      m[b] = a;
    };
    const std::pair<Index, Index> body_pairs[] = {
        {2, 5},   {3, 6},   {4, 7},   {9, 12},  {10, 13}, {11, 14},
        {15, 16}, {17, 18}, {19, 22}, {20, 23}, {21, 24}};
    for (auto [a, b] : body_pairs) swap_pair(a, b);

    // 68-point face plus two pupils, offset by the face range.
    const Index f = l->face.begin;
    for (Index i = 0; i < 8; ++i) swap_pair(f + i, f + 16 - i);  // jaw
    for (Index i = 0; i < 5; ++i) swap_pair(f + 17 + i, f + 26 - i);  // brows
    swap_pair(f + 31, f + 35);
    swap_pair(f + 32, f + 34);
    const std::pair<Index, Index> face_pairs[] = {
        {36, 45}, {37, 44}, {38, 43}, {39, 42}, {40, 47}, {41, 46},  // eyes
        {48, 54}, {49, 53}, {50, 52}, {55, 59}, {56, 58},            // outer lip
        {60, 64}, {61, 63}, {65, 67},                                // inner lip
        {68, 69}};                                                   // pupils
    for (auto [a, b] : face_pairs) swap_pair(f + a, f + b);

    for (Index i = 0; i < 21; ++i) swap_pair(l->left_hand.begin + i, l->right_hand.begin + i);

    l->validate();
    return std::shared_ptr<const KeypointLayout>(std::move(l));
  }();
  return layout;
}

}  // namespace signpose
