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

#include "signpose/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "signpose/layout.hpp"

namespace signpose::synthetic {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void set(Eigen::Ref<Eigen::Array2Xd> p, Index k, double x, double y) {
  p(0, k) = x;
  p(1, k) = y;
}

// Points of one hand relative to its wrist; `side` is -1 for the right
// hand (image left) and +1 for the left hand.
void hand(Eigen::Ref<Eigen::Array2Xd> p, Index begin, const Eigen::Vector2d& wrist, double spread,
          double rotation, double side) {
  set(p, begin, wrist.x(), wrist.y());
  for (int finger = 0; finger < 5; ++finger) {
    const double angle = -kPi / 2 + (finger - 2) * spread + rotation;
    const double reach = finger == 0 ? 0.035 : 0.05;
    for (int joint = 1; joint <= 4; ++joint) {
      const Index k = begin + 1 + 4 * finger + (joint - 1);
      const double dx = side * std::cos(angle) * reach * joint;
      const double dy = std::sin(angle) * reach * joint;
      set(p, k, wrist.x() - dx, wrist.y() + dy);
    }
  }
}

void face(Eigen::Ref<Eigen::Array2Xd> p, Index f) {
  for (int i = 0; i <= 16; ++i) {
    const double t = kPi * (1.0 - i / 16.0);
    set(p, f + i, 0.2 * std::cos(t), -0.6 + 0.25 * std::sin(t));
  }
  for (int i = 0; i < 5; ++i) {
    set(p, f + 17 + i, -0.17 + 0.035 * i, -0.72 - 0.01 * std::sin(kPi * i / 4));
    set(p, f + 22 + i, 0.03 + 0.035 * i, -0.72 - 0.01 * std::sin(kPi * (4 - i) / 4));
  }
  for (int i = 0; i < 4; ++i) set(p, f + 27 + i, 0.0, -0.68 + 0.03 * i);
  for (int i = 0; i < 5; ++i) set(p, f + 31 + i, -0.04 + 0.02 * i, -0.56 + 0.005 * std::abs(i - 2));
  for (int j = 0; j < 6; ++j) {
    const double phi = kPi - j * kPi / 3;
    set(p, f + 36 + j, -0.09 + 0.03 * std::cos(phi), -0.66 - 0.015 * std::sin(phi));
    set(p, f + 42 + j, 0.09 + 0.03 * std::cos(phi), -0.66 - 0.015 * std::sin(phi));
  }
  for (int i = 0; i < 12; ++i) {
    const double psi = kPi - 2 * kPi * i / 12;
    set(p, f + 48 + i, 0.06 * std::cos(psi), -0.47 - 0.025 * std::sin(psi));
  }
  for (int i = 0; i < 8; ++i) {
    const double psi = kPi - 2 * kPi * i / 8;
    set(p, f + 60 + i, 0.04 * std::cos(psi), -0.47 - 0.012 * std::sin(psi));
  }
  set(p, f + 68, -0.09, -0.66);
  set(p, f + 69, 0.09, -0.66);
}

}  // namespace

SignClass random_sign_class(std::mt19937_64& rng) {
  SignClass c;
  c.center = {uniform(rng, -0.55, 0.15), uniform(rng, -0.3, 0.7)};
  c.amplitude = {uniform(rng, 0.2, 0.45), uniform(rng, 0.2, 0.45)};
  const double freqs[] = {0.5, 1.0, 1.5, 2.0};
  std::uniform_int_distribution<int> pick(0, 3);
  c.frequency = {freqs[pick(rng)], freqs[pick(rng)]};
  c.phase = {uniform(rng, 0.0, 2 * kPi), uniform(rng, 0.0, 2 * kPi)};
  c.finger_spread = uniform(rng, 0.05, 0.45);
  c.hand_rotation = uniform(rng, -0.8, 0.8);
  c.hand_rotation_rate = uniform(rng, -1.0, 1.0);
  c.secondary_amplitude = uniform(rng, 0.0, 1.0) < 0.5 ? 0.0 : uniform(rng, 0.01, 0.03);
  return c;
}

Signer random_signer(std::mt19937_64& rng) {
  Signer s;
  s.offset = {uniform(rng, 250.0, 1000.0), uniform(rng, 150.0, 450.0)};
  s.scale = uniform(rng, 80.0, 260.0);
  s.shoulder_width = uniform(rng, 0.9, 1.1);
  s.arm_length = uniform(rng, 0.9, 1.1);
  s.motion_gain = uniform(rng, 0.9, 1.1);
  return s;
}

void canonical_frame(const SignClass& sign, const Signer& signer, double u,
                     Eigen::Ref<Eigen::Array2Xd> p) {
  const KeypointLayout& l = *KeypointLayout::openpose137();
  const double half = 0.5 * signer.shoulder_width;
  set(p, 0, 0.0, -0.55);
  set(p, 1, 0.0, 0.0);
  set(p, 2, -half, 0.0);
  set(p, 5, half, 0.0);
  set(p, 8, 0.0, 1.5);
  set(p, 9, -0.3, 1.5);
  set(p, 10, -0.32, 2.2);
  set(p, 11, -0.33, 2.9);
  set(p, 12, 0.3, 1.5);
  set(p, 13, 0.32, 2.2);
  set(p, 14, 0.33, 2.9);
  set(p, 15, -0.09, -0.66);
  set(p, 16, 0.09, -0.66);
  set(p, 17, -0.2, -0.6);
  set(p, 18, 0.2, -0.6);
  set(p, 19, 0.38, 3.0);
  set(p, 20, 0.45, 2.98);
  set(p, 21, 0.3, 2.95);
  set(p, 22, -0.38, 3.0);
  set(p, 23, -0.45, 2.98);
  set(p, 24, -0.3, 2.95);
  face(p, l.face.begin);

  const Eigen::Vector2d right_shoulder(-half, 0.0);
  const Eigen::Vector2d left_shoulder(half, 0.0);
  const double g = signer.motion_gain;
  const Eigen::Vector2d motion(
      sign.amplitude.x() * std::sin(2 * kPi * sign.frequency.x() * u + sign.phase.x()),
      sign.amplitude.y() * std::sin(2 * kPi * sign.frequency.y() * u + sign.phase.y()));
  const Eigen::Vector2d right_wrist =
      right_shoulder + signer.arm_length * (sign.center + g * motion - right_shoulder);
  const Eigen::Vector2d secondary(
      sign.secondary_amplitude * std::sin(2 * kPi * u + sign.phase.y()),
      sign.secondary_amplitude * std::cos(2 * kPi * u + sign.phase.x()));
  const Eigen::Vector2d left_rest(0.55, 1.3);
  const Eigen::Vector2d left_wrist =
      left_shoulder + signer.arm_length * (left_rest + g * secondary - left_shoulder);

  const Eigen::Vector2d right_elbow =
      0.5 * (right_shoulder + right_wrist) + Eigen::Vector2d(-0.15, 0.25) * signer.arm_length;
  const Eigen::Vector2d left_elbow =
      0.5 * (left_shoulder + left_wrist) + Eigen::Vector2d(0.15, 0.25) * signer.arm_length;
  set(p, 3, right_elbow.x(), right_elbow.y());
  set(p, 4, right_wrist.x(), right_wrist.y());
  set(p, 6, left_elbow.x(), left_elbow.y());
  set(p, 7, left_wrist.x(), left_wrist.y());

  const double rotation = sign.hand_rotation + sign.hand_rotation_rate * u;
  hand(p, l.right_hand.begin, right_wrist, sign.finger_spread, rotation, -1.0);
  hand(p, l.left_hand.begin, left_wrist, 0.25, 0.0, 1.0);
}

PoseSequenced perform(const SignClass& sign, const Signer& signer, const SampleOptions& options,
                      std::mt19937_64& rng, Index frames) {
  if (frames <= 0) {
    frames = std::uniform_int_distribution<Index>(options.min_frames, options.max_frames)(rng);
  }
  const LayoutPtr layout = KeypointLayout::openpose137();
  PoseSequenced seq(layout, frames, 25.0);

  const double w = std::clamp(options.warp, 0.0, 0.95);
  const double gamma = std::exp(uniform(rng, -w, w));
  const double wobble = uniform(rng, -w, w);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution drop(options.dropout);
  std::uniform_real_distribution<double> conf(options.min_confidence, options.max_confidence);

  Eigen::Array2Xd points(2, layout->total());
  for (Index f = 0; f < frames; ++f) {
    const double tau = frames > 1 ? static_cast<double>(f) / static_cast<double>(frames - 1) : 0.0;
    const double warped = std::pow(tau, gamma);
    const double u = warped + wobble * std::sin(2 * kPi * warped) / (2 * kPi);
    canonical_frame(sign, signer, u, points);
    for (Index k = 0; k < layout->total(); ++k) {
      const Index src = signer.left_handed ? layout->mirror_map[k] : k;
      double x = points(0, src);
      const double y = points(1, src) + options.jitter * normal(rng);
      if (signer.left_handed) x = -x;
      x += options.jitter * normal(rng);
      const bool missing = drop(rng);
      const double c = conf(rng);
      if (missing) continue;
      seq.set_keypoint(f, k,
                       {signer.offset.x() + signer.scale * x, signer.offset.y() + signer.scale * y, c});
    }
  }
  return seq;
}

std::vector<LabeledSample> make_benchmark(const BenchmarkOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<SignClass> classes;
  for (int c = 0; c < options.classes; ++c) classes.push_back(random_sign_class(rng));
  std::vector<Signer> signers;
  for (int s = 0; s < options.signers; ++s) signers.push_back(random_signer(rng));

  const char* languages[] = {"DGS", "GSL", "LSF", "PJM"};
  std::uniform_int_distribution<int> pick_signer(0, options.signers - 1);
  std::vector<LabeledSample> out;
  char buf[32];
  for (int c = 0; c < options.classes; ++c) {
    for (int i = 0; i < options.samples_per_class; ++i) {
      const int s = pick_signer(rng);
      LabeledSample sample;
      std::snprintf(buf, sizeof(buf), "s%05zu", out.size());
      sample.id = buf;
      std::snprintf(buf, sizeof(buf), "sign%03d", c);
      sample.label = buf;
      std::snprintf(buf, sizeof(buf), "signer%02d", s);
      sample.signer = buf;
      sample.language = languages[s % 4];
      sample.pose = perform(classes[c], signers[s], options.sample, rng);
      out.push_back(std::move(sample));
    }
  }
  return out;
}

}  // namespace signpose::synthetic
