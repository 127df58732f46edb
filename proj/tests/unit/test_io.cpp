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

#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "signpose/io.hpp"

using namespace signpose;
using signpose::testing::random_float_sequence;

namespace {

std::string to_bytes(const PoseSequenced& seq) {
  std::ostringstream out;
  write_pose_file(out, seq);
  return out.str();
}

PoseSequenced from_bytes(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_pose_file(in);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kInvalidArgument;
}

nlohmann::json person(double shift) {
  auto part = [shift](int n) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
      a.push_back(i + shift);
      a.push_back(2 * i + shift);
      a.push_back(i % 7 == 0 ? 0.0 : 0.75);
    }
    return a;
  };
  return {{"pose_keypoints_2d", part(25)},
          {"face_keypoints_2d", part(70)},
          {"hand_left_keypoints_2d", part(21)},
          {"hand_right_keypoints_2d", part(21)}};
}

nlohmann::json frame(std::vector<nlohmann::json> people) {
  return {{"version", 1.3}, {"people", people}};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("pose file round trip") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    PoseSequenced seq = random_float_sequence(rng, trial % 9, 0.2);
    seq.set_fps(trial % 2 ? 30.0 : 25.0);
    const std::string bytes = to_bytes(seq);
    const PoseSequenced back = from_bytes(bytes);
    CHECK(bit_equal(back, seq));
    CHECK(back.fps() == seq.fps());
    CHECK(to_bytes(back) == bytes);
  }
}

TEST_CASE("pose file layout") {
  PoseSequenced seq(KeypointLayout::openpose137(), 1);
  seq.set_keypoint(0, 0, {1.5, -2.0, 0.5});
  const std::string bytes = to_bytes(seq);
  CHECK(bytes.substr(0, 4) == "SPOS");
  CHECK(bytes.size() == 4 + 4 + 16 + 8 + 137 * 12);
  // Missing keypoints are stored as zeros.
  float stored[3];
  std::memcpy(stored, bytes.data() + 32 + 12, sizeof(stored));
  CHECK(stored[0] == 0.0f);
  CHECK(stored[2] == 0.0f);
}

TEST_CASE("pose file errors") {
  std::mt19937_64 rng(52);
  const std::string good = to_bytes(random_float_sequence(rng, 3));
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(code_of([&] { from_bytes(bad_magic); }) == ErrorCode::kVersionMismatch);
  std::string bad_version = good;
  bad_version[4] = 9;
  CHECK(code_of([&] { from_bytes(bad_version); }) == ErrorCode::kVersionMismatch);
  CHECK(code_of([&] { from_bytes(good.substr(0, good.size() - 5)); }) == ErrorCode::kTruncatedFile);
  CHECK(code_of([&] { from_bytes(good.substr(0, 10)); }) == ErrorCode::kTruncatedFile);
  CHECK(code_of([&] { from_bytes(good + "x"); }) == ErrorCode::kParseError);
  std::string bad_layout = good;
  bad_layout[8] = 24;
  CHECK(code_of([&] { from_bytes(bad_layout); }) == ErrorCode::kLayoutMismatch);
}

TEST_CASE("pose-estimator JSON") {
  SUBCASE("two frames") {
    const nlohmann::json doc = nlohmann::json::array({frame({person(0)}), frame({person(1)})});
    const PoseSequenced seq = parse_pose_json(doc.dump());
    REQUIRE(seq.frames() == 2);
    CHECK(seq.keypoints() == 137);
    CHECK(seq.missing(0, 0));
    CHECK(seq.keypoint(1, 1).x == 2.0);
    CHECK(seq.keypoint(1, 1).y == 3.0);
    // face keypoint 1 sits right after the 25 body points.
    CHECK(seq.keypoint(0, 26).x == 1.0);
    CHECK(seq.keypoint(0, 116 + 3).y == 6.0);
  }
  SUBCASE("object with fps") {
    const nlohmann::json doc = {{"fps", 50}, {"frames", {frame({person(0)})}}};
    CHECK(parse_pose_json(doc.dump()).fps() == 50.0);
  }
  SUBCASE("empty people") {
    const PoseSequenced seq = parse_pose_json(frame({}).dump());
    REQUIRE(seq.frames() == 1);
    CHECK((seq.confidence() == 0.0).all());
  }
  SUBCASE("errors") {
    CHECK(code_of([] { parse_pose_json("{not json"); }) == ErrorCode::kParseError);
    CHECK(code_of([] { parse_pose_json(frame({person(0), person(1)}).dump()); }) ==
          ErrorCode::kMultiplePersons);
    nlohmann::json p = person(0);
    p["pose_keypoints_2d"].erase(0);
    CHECK(code_of([&] { parse_pose_json(frame({p}).dump()); }) == ErrorCode::kLayoutMismatch);
  }
  SUBCASE("directory of frames") {
    const auto dir = signpose::testing::scratch_dir("json_dir");
    for (int i = 0; i < 3; ++i) {
      std::ofstream(dir / ("clip_00000000000" + std::to_string(i) + "_keypoints.json"))
          << frame({person(i)}).dump();
    }
    const PoseSequenced seq = load_pose(dir);
    REQUIRE(seq.frames() == 3);
    CHECK(seq.keypoint(2, 1).x == 3.0);
  }
}

TEST_CASE("csv") {
  std::istringstream in("a,\"b,c\",\"d\"\"e\"\r\n\"multi\nline\",x,\n");
  const auto rows = parse_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(rows[1] == std::vector<std::string>{"multi\nline", "x", ""});
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("q\"") == "\"q\"\"\"");
}

TEST_CASE("manifest") {
  SUBCASE("parse with defaults") {
    std::istringstream in(
        "id,hamnosys,pose_path,language,signer\n"
        "x1,\xee\x80\x80,poses/x1.pose,DGS,s1\n");
    const DatasetManifest m = DatasetManifest::parse(in, "/data");
    REQUIRE(m.records.size() == 1);
    CHECK(m.records[0].pose_path == std::filesystem::path("/data/poses/x1.pose"));
    CHECK(m.records[0].label == "\xee\x80\x80");
    CHECK_FALSE(m.records[0].prediction_path);
  }
  SUBCASE("round trip") {
    DatasetManifest m;
    m.records.push_back({"a", "h,1", "/p/a.pose", "LSF", "s", std::filesystem::path("/p/pa.pose"), "A"});
    m.records.push_back({"b", "h2", "/p/b.pose", "GSL", "t", std::nullopt, "h2"});
    std::ostringstream out;
    m.write(out);
    std::istringstream in(out.str());
    const DatasetManifest back = DatasetManifest::parse(in);
    REQUIRE(back.records.size() == 2);
    CHECK(back.records[0].hamnosys == "h,1");
    CHECK(back.records[0].prediction_path == std::filesystem::path("/p/pa.pose"));
    CHECK(back.records[1].label == "h2");
    std::ostringstream again;
    back.write(again);
    CHECK(again.str() == out.str());
  }
  SUBCASE("duplicate ids") {
    std::istringstream in(
        "id,hamnosys,pose_path,language,signer\n"
        "x,h,a.pose,DGS,s\n"
        "x,h,b.pose,DGS,s\n");
    CHECK(code_of([&] { DatasetManifest::parse(in); }) == ErrorCode::kDuplicateId);
  }
  SUBCASE("missing column") {
    std::istringstream in("id,hamnosys,pose_path,language\nx,h,a.pose,DGS\n");
    CHECK(code_of([&] { DatasetManifest::parse(in); }) == ErrorCode::kParseError);
  }
  SUBCASE("load_dataset reads poses in parallel") {
    const auto dir = signpose::testing::scratch_dir("manifest");
    std::mt19937_64 rng(53);
    std::ofstream csv(dir / "m.csv");
    csv << "id,hamnosys,pose_path,language,signer,prediction_path\n";
    std::vector<PoseSequenced> poses;
    for (int i = 0; i < 6; ++i) {
      poses.push_back(random_float_sequence(rng, 3 + i));
      save_pose(dir / (std::to_string(i) + ".pose"), poses.back());
      csv << "id" << i << ",h,"  << i << ".pose,DGS,s," << (i % 2 ? std::to_string(i) + ".pose" : "")
          << '\n';
    }
    csv.close();
    const auto data = load_dataset(DatasetManifest::load(dir / "m.csv"), 3);
    REQUIRE(data.size() == 6);
    for (int i = 0; i < 6; ++i) {
      CHECK(data[i].id == "id" + std::to_string(i));
      CHECK(bit_equal(data[i].pose, poses[i]));
      CHECK(data[i].prediction.has_value() == (i % 2 == 1));
    }
  }
}

}  // TEST_SUITE
