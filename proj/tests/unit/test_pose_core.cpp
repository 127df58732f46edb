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

#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "signpose/preprocess.hpp"
#include "signpose/synthetic.hpp"

using namespace signpose;
using signpose::testing::random_sequence;
using signpose::testing::shoulder_sequence;

namespace {

PoseSequenced confident_sequence(Index frames, double c = 0.9) {
  std::mt19937_64 rng(11);
  PoseSequenced seq = random_sequence(rng, frames);
  seq.confidence().setConstant(c);
  return seq;
}

PoseSequenced wrist_motion(double right_step, double left_step, Index frames = 5) {
  PoseSequenced seq(KeypointLayout::openpose137(), frames);
  const auto& l = seq.layout();
  for (Index f = 0; f < frames; ++f) {
    const double u = static_cast<double>(f) / static_cast<double>(frames - 1);
    seq.set_keypoint(f, l.right_wrist, {-1.0 + right_step * u, 0.0, 1.0});
    seq.set_keypoint(f, l.left_wrist, {1.0 + left_step * u, 0.0, 1.0});
  }
  return seq;
}

}  // namespace

TEST_SUITE("pose_core") {

TEST_CASE("layout is a consistent 137-point OpenPose skeleton") {
  const auto& l = *KeypointLayout::openpose137();
  CHECK(l.total() == 137);
  CHECK(l.body.size == 25);
  CHECK(l.face.size == 70);
  CHECK(l.left_hand.size == 21);
  CHECK(l.right_hand.size == 21);
  CHECK(l.distance_keypoints().size() == l.upper_body.size() + 42);
  for (Index i = 0; i < 137; ++i) CHECK(l.mirror_map[l.mirror_map[i]] == i);
  CHECK(l.mirror_map[l.right_wrist] == l.left_wrist);
  CHECK(l.mirror_map[l.left_hand.begin + 4] == l.right_hand.begin + 4);
  CHECK_NOTHROW(l.validate());
}

TEST_CASE("missing keypoints hold NaN coordinates and zero confidence") {
  PoseSequenced seq(KeypointLayout::openpose137(), 2);
  CHECK(seq.missing(0, 0));
  seq.set_keypoint(1, 3, {1.0, 2.0, 0.5});
  CHECK_FALSE(seq.missing(1, 3));
  seq.set_keypoint(1, 4, {1.0, 2.0, 0.0});
  CHECK(std::isnan(seq.x()(1, 4)));
  seq.set_missing(1, 3);
  CHECK(seq.missing(1, 3));
  CHECK(std::isnan(seq.y()(1, 3)));
}

TEST_CASE("filter_low_confidence uses a strict threshold") {
  PoseSequenced seq(KeypointLayout::openpose137(), 1);
  seq.set_keypoint(0, 0, {1.0, 2.0, 0.19});
  seq.set_keypoint(0, 1, {1.0, 2.0, 0.20});
  const PoseSequenced out = filter_low_confidence(seq, 0.2);
  CHECK(out.missing(0, 0));
  CHECK(std::isnan(out.x()(0, 0)));
  CHECK(out.keypoint(0, 1).x == 1.0);
  CHECK(out.keypoint(0, 1).y == 2.0);
  CHECK(out.keypoint(0, 1).confidence == doctest::Approx(0.20));

  const PoseSequenced full = confident_sequence(4, 1.0);
  CHECK(bit_equal(filter_low_confidence(full), full));
  CHECK_THROWS_AS(filter_low_confidence(full, 1.5), Error);
}

TEST_CASE("trim drops only meaningless leading and trailing frames") {
  SUBCASE("both ends empty") {
    PoseSequenced seq = confident_sequence(5);
    seq.confidence().row(0).setZero();
    seq.confidence().row(4).setZero();
    canonicalize_missing(seq);
    const PoseSequenced out = trim_meaningless_frames(seq);
    REQUIRE(out.frames() == 3);
    CHECK(bit_equal(out, seq.slice(1, 3)));
  }
  SUBCASE("empty middle frame is kept") {
    PoseSequenced seq = confident_sequence(5);
    seq.confidence().row(2).setZero();
    canonicalize_missing(seq);
    CHECK(bit_equal(trim_meaningless_frames(seq), seq));
  }
  SUBCASE("confident frames are untouched") {
    const PoseSequenced seq = confident_sequence(6);
    CHECK(bit_equal(trim_meaningless_frames(seq), seq));
  }
  SUBCASE("face criterion alone trims") {
    PoseSequenced seq = confident_sequence(3);
    const auto& l = seq.layout();
    seq.confidence().block(0, l.face.begin, 1, l.face.size).setConstant(0.2);
    CHECK(trim_meaningless_frames(seq).frames() == 2);
  }
  SUBCASE("wrist criterion alone trims") {
    PoseSequenced seq = confident_sequence(3);
    const auto& l = seq.layout();
    seq.confidence()(2, l.left_wrist) = 0.1;
    seq.confidence()(2, l.right_wrist) = 0.1;
    CHECK(trim_meaningless_frames(seq).frames() == 2);
  }
  SUBCASE("everything trimmed") {
    PoseSequenced seq = confident_sequence(3);
    seq.confidence().setZero();
    CHECK_THROWS_WITH_AS(trim_meaningless_frames(seq), doctest::Contains("informative"), Error);
    try {
      (void)trim_meaningless_frames(seq);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kAllFramesTrimmed);
    }
  }
  SUBCASE("idempotent") {
    PoseSequenced seq = confident_sequence(7);
    seq.confidence().topRows(2).setZero();
    canonicalize_missing(seq);
    const PoseSequenced once = trim_meaningless_frames(seq);
    CHECK(bit_equal(trim_meaningless_frames(once), once));
  }
}

TEST_CASE("mask_legs clears only waist-down points") {
  const PoseSequenced seq = confident_sequence(2);
  const PoseSequenced out = mask_legs(seq);
  const auto& l = seq.layout();
  for (Index k : l.waist_down) CHECK((out.confidence().col(k) == 0.0).all());
  for (Index k = 0; k < seq.keypoints(); ++k) {
    if (std::find(l.waist_down.begin(), l.waist_down.end(), k) != l.waist_down.end()) continue;
    CHECK((out.confidence().col(k) == seq.confidence().col(k)).all());
    CHECK((out.x().col(k) == seq.x().col(k)).all());
  }
  CHECK(bit_equal(mask_legs(out), out));
}

TEST_CASE("flip_horizontal") {
  SUBCASE("involution is bit-exact") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const PoseSequenced seq = signpose::testing::random_float_sequence(rng, 8, 0.1);
      PoseSequenced with_shoulders = seq;
      with_shoulders.set_keypoint(0, 2, {-150.5, 3.0, 1.0});
      with_shoulders.set_keypoint(0, 5, {151.25, 3.0, 1.0});
      CHECK(bit_equal(flip_horizontal(flip_horizontal(with_shoulders)), with_shoulders));
    }
  }
  SUBCASE("left wrist maps onto the right wrist") {
    PoseSequenced seq = shoulder_sequence(1, {-1.0, 0.0}, {1.0, 0.0});
    const auto& l = seq.layout();
    seq.set_keypoint(0, l.left_wrist, {-0.4, 0.1, 1.0});
    CHECK(mirror_axis(seq) == 0.0);
    const PoseSequenced out = flip_horizontal(seq);
    CHECK(out.keypoint(0, l.right_wrist).x == doctest::Approx(0.4));
    CHECK(out.keypoint(0, l.right_wrist).y == doctest::Approx(0.1));
    CHECK(out.missing(0, l.left_wrist));
  }
  SUBCASE("symmetric pose is a fixed point") {
    const auto sign = synthetic::SignClass{{-0.55, 1.3}, {0, 0}, {1, 1}, {0, 0}, 0.25, 0, 0, 0};
    synthetic::Signer signer;
    signer.offset = {0, 0};
    signer.scale = 1.0;
    synthetic::SampleOptions opts;
    opts.warp = 0;
    opts.dropout = 0;
    opts.jitter = 0;
    opts.min_confidence = opts.max_confidence = 1.0;
    std::mt19937_64 rng(1);
    const PoseSequenced seq = synthetic::perform(sign, signer, opts, rng, 3);
    const PoseSequenced out = flip_horizontal(seq);
    CHECK(((out.x() - seq.x()).abs() < 1e-12).all());
    CHECK(((out.y() - seq.y()).abs() < 1e-12).all());
  }
}

TEST_CASE("detect_left_handed") {
  CHECK_FALSE(detect_left_handed(wrist_motion(2.0, 0.1)));
  CHECK(detect_left_handed(wrist_motion(0.1, 2.0)));
  CHECK_FALSE(detect_left_handed(wrist_motion(1.0, 1.0)));
  PoseSequenced none(KeypointLayout::openpose137(), 3);
  CHECK_THROWS_AS(detect_left_handed(none), Error);
}

TEST_CASE("normalize_by_shoulders") {
  SUBCASE("unit example") {
    PoseSequenced seq = shoulder_sequence(3, {-1.0, 0.0}, {1.0, 0.0});
    seq.set_keypoint(1, 0, {4.0, 2.0, 1.0});
    double scale = 0;
    const PoseSequenced out = normalize_by_shoulders(seq, &scale);
    CHECK(scale == doctest::Approx(0.5));
    const auto stats = shoulder_stats(out);
    REQUIRE(stats);
    CHECK(stats->center.norm() < 1e-12);
    CHECK(std::abs(stats->mean_distance - 1.0) < 1e-12);
    CHECK(out.keypoint(1, 0).x == doctest::Approx(2.0));
    CHECK(out.keypoint(1, 0).y == doctest::Approx(1.0));
    CHECK(out.missing(0, 0));
  }
  SUBCASE("idempotent") {
    std::mt19937_64 rng(5);
    PoseSequenced seq = random_sequence(rng, 10, 0.1, 50.0);
    seq.set_keypoint(0, 2, {-30.0, 1.0, 1.0});
    seq.set_keypoint(0, 5, {40.0, 2.0, 1.0});
    const PoseSequenced once = normalize_by_shoulders(seq);
    CHECK(is_shoulder_normalized(once, 1e-9));
    const PoseSequenced twice = normalize_by_shoulders(once);
    CHECK(((twice.x() - once.x()).abs().isNaN() == once.x().isNaN()).all());
    CHECK((once.x().isNaN() || (twice.x() - once.x()).abs() < 1e-9).all());
    CHECK((once.y().isNaN() || (twice.y() - once.y()).abs() < 1e-9).all());
  }
  SUBCASE("degenerate shoulders") {
    const PoseSequenced seq = shoulder_sequence(3, {1.0, 1.0}, {1.0, 1.0});
    try {
      (void)normalize_by_shoulders(seq);
      FAIL("expected DegenerateShoulders");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegenerateShoulders);
    }
  }
  SUBCASE("missing shoulders") {
    PoseSequenced seq(KeypointLayout::openpose137(), 2);
    try {
      (void)normalize_by_shoulders(seq);
      FAIL("expected MissingShoulders");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMissingShoulders);
    }
  }
}

TEST_CASE("preprocess") {
  synthetic::SampleOptions opts;
  opts.dropout = 0;
  std::mt19937_64 rng(21);
  const auto sign = signpose::testing::demo_sign();
  auto signer = synthetic::random_signer(rng);
  signer.left_handed = false;
  // Float-representable, like anything read from a pose file.
  const PoseSequenced right = synthetic::perform(sign, signer, opts, rng).cast<float>().cast<double>();

  SUBCASE("right-handed input skips the flip") {
    PreprocessLog log;
    const PoseSequenced out = preprocess(right, {}, &log);
    const PoseSequenced manual =
        normalize_by_shoulders(mask_legs(trim_meaningless_frames(filter_low_confidence(right))));
    CHECK(bit_equal(out, manual));
    CHECK_FALSE(log.flipped);
    CHECK(log.frames_in == right.frames());
    CHECK(log.frames_out == out.frames());
    CHECK(is_shoulder_normalized(out, 1e-9));
  }
  SUBCASE("mirrored twin preprocesses to the same output") {
    const PoseSequenced left = flip_horizontal(right);
    REQUIRE(detect_left_handed(left));
    PreprocessLog log;
    const PoseSequenced out = preprocess(left, {}, &log);
    CHECK(log.flipped);
    CHECK(bit_equal(out, preprocess(right)));
  }
  SUBCASE("left-handed synthetic signer is flipped") {
    signer.left_handed = true;
    std::mt19937_64 rng2(4);
    PreprocessLog log;
    (void)preprocess(synthetic::perform(sign, signer, opts, rng2), {}, &log);
    CHECK(log.flipped);
  }
  SUBCASE("logs trimmed frames") {
    PoseSequenced padded(right.layout_ptr(), right.frames() + 3);
    padded.x().middleRows(2, right.frames()) = right.x();
    padded.y().middleRows(2, right.frames()) = right.y();
    padded.confidence().middleRows(2, right.frames()) = right.confidence();
    PreprocessLog log;
    (void)preprocess(padded, {}, &log);
    CHECK(log.trimmed_leading == 2);
    CHECK(log.trimmed_trailing == 1);
  }
  SUBCASE("empty after trim") {
    PoseSequenced blank = right;
    blank.confidence().setConstant(0.1);
    try {
      (void)preprocess(blank);
      FAIL("expected AllFramesTrimmed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kAllFramesTrimmed);
    }
  }
}

TEST_CASE("cast round-trips through float for float-representable data") {
  std::mt19937_64 rng(8);
  const PoseSequenced seq = signpose::testing::random_float_sequence(rng, 4, 0.2);
  CHECK(bit_equal(seq.cast<float>().cast<double>(), seq));
}

}  // TEST_SUITE
