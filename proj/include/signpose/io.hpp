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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "signpose/eval.hpp"
#include "signpose/pose.hpp"

namespace signpose {

/// Binary pose container, little-endian:
///
///   "SPOS" | u8 version | u8 component count (4) | u16 reserved (0)
///   u32 body, face, left hand, right hand sizes | f32 fps | u32 frames
///   frames x keypoints x (f32 x, f32 y, f32 confidence)
///
/// Missing keypoints are stored as (0, 0, 0) and read back with NaN
/// coordinates.
inline constexpr char kPoseFileMagic[4] = {'S', 'P', 'O', 'S'};
inline constexpr std::uint8_t kPoseFileVersion = 1;

void write_pose_file(std::ostream& out, const PoseSequenced& seq);
PoseSequenced read_pose_file(std::istream& in);

/// Parses pose-estimator JSON output. Accepts a single frame object
/// (`{"people": [...]}`), an array of such objects, an object with a
/// `"frames"` array and optional `"fps"`, or a directory of per-frame files
/// read in file-name order. A frame with no person is all-missing; more
/// than one person is an error.
PoseSequenced ingest_pose_json(const std::filesystem::path& path, double default_fps = 25.0);
PoseSequenced parse_pose_json(const std::string& text, double default_fps = 25.0);

/// `.json` files and directories go through `ingest_pose_json`; anything
/// else is read as a pose file.
PoseSequenced load_pose(const std::filesystem::path& path);
void save_pose(const std::filesystem::path& path, const PoseSequenced& seq);

struct ManifestRecord {
  std::string id;
  std::string hamnosys;
  std::filesystem::path pose_path;
  std::string language;
  std::string signer;
  std::optional<std::filesystem::path> prediction_path;
  /// Retrieval label; defaults to the HamNoSys string.
  std::string label;
};

/// UTF-8 CSV with a header row. Required columns: id, hamnosys, pose_path,
/// language, signer. Optional: prediction_path, label. Relative paths
/// resolve against the manifest's directory.
struct DatasetManifest {
  std::vector<ManifestRecord> records;

  static DatasetManifest parse(std::istream& in, const std::filesystem::path& base_dir = {},
                               bool check_files = false);
  static DatasetManifest load(const std::filesystem::path& path);
  /// Paths are written as stored in the records.
  void write(std::ostream& out) const;
};

/// Loads every record's pose (and prediction, when present).
std::vector<LabeledSample> load_dataset(const DatasetManifest& manifest, unsigned threads = 1);

/// RFC 4180 records; quoted fields may hold commas, quotes and newlines.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);
std::string csv_escape(const std::string& field);

}  // namespace signpose
