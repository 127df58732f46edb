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

#include "signpose/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "signpose/error.hpp"
#include "signpose/parallel.hpp"

namespace signpose {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

template <class T>
void put(std::string& buf, T v) {
  const auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(to_little(v));
  buf.append(bytes.data(), bytes.size());
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <class T>
  T get(const char* what) {
    if (data_.size() - pos_ < sizeof(T)) {
      throw Error(ErrorCode::kTruncatedFile, std::string("file ends inside ") + what);
    }
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(std::bit_cast<T>(bytes));
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

constexpr std::array<Index, 4> kOpenPoseSizes = {25, 70, 21, 21};

std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void write_pose_file(std::ostream& out, const PoseSequenced& seq) {
  const KeypointLayout& l = seq.layout();
  std::string buf;
  buf.reserve(32 + static_cast<std::size_t>(seq.frames() * seq.keypoints()) * 12);
  buf.append(kPoseFileMagic, 4);
  put<std::uint8_t>(buf, kPoseFileVersion);
  put<std::uint8_t>(buf, 4);
  put<std::uint16_t>(buf, 0);
  for (Index size : {l.body.size, l.face.size, l.left_hand.size, l.right_hand.size}) {
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(size));
  }
  put<float>(buf, static_cast<float>(seq.fps()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(seq.frames()));
  for (Index f = 0; f < seq.frames(); ++f) {
    for (Index k = 0; k < seq.keypoints(); ++k) {
      const double c = seq.confidence()(f, k);
      const bool missing = c == 0.0;
      put<float>(buf, missing ? 0.0f : static_cast<float>(seq.x()(f, k)));
      put<float>(buf, missing ? 0.0f : static_cast<float>(seq.y()(f, k)));
      put<float>(buf, static_cast<float>(c));
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed to write pose data");
}

PoseSequenced read_pose_file(std::istream& in) {
  Reader r(read_all(in));
  std::array<char, 4> magic;
  for (char& c : magic) c = static_cast<char>(r.get<std::uint8_t>("magic"));
  if (std::memcmp(magic.data(), kPoseFileMagic, 4) != 0) {
    throw Error(ErrorCode::kVersionMismatch, "not a pose file (bad magic)");
  }
  const auto version = r.get<std::uint8_t>("header");
  if (version != kPoseFileVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "unsupported pose file version " + std::to_string(version));
  }
  const auto components = r.get<std::uint8_t>("header");
  r.get<std::uint16_t>("header");
  if (components != 4) throw Error(ErrorCode::kLayoutMismatch, "expected 4 layout components");
  for (Index expected : kOpenPoseSizes) {
    if (r.get<std::uint32_t>("header") != expected) {
      throw Error(ErrorCode::kLayoutMismatch, "unsupported keypoint layout");
    }
  }
  const double fps = r.get<float>("header");
  const auto frames = r.get<std::uint32_t>("header");
  if (!(fps > 0)) throw Error(ErrorCode::kParseError, "fps must be positive");

  PoseSequenced seq(KeypointLayout::openpose137(), frames, fps);
  const std::size_t expected = static_cast<std::size_t>(frames) * 137 * 12;
  if (r.remaining() < expected) throw Error(ErrorCode::kTruncatedFile, "frame block truncated");
  if (r.remaining() > expected) throw Error(ErrorCode::kParseError, "trailing bytes after frames");
  for (Index f = 0; f < seq.frames(); ++f) {
    for (Index k = 0; k < seq.keypoints(); ++k) {
      const double x = r.get<float>("frame");
      const double y = r.get<float>("frame");
      const double c = r.get<float>("frame");
      seq.set_keypoint(f, k, {x, y, c});
    }
  }
  return seq;
}

namespace {

using nlohmann::json;

void read_part(const json& person, const char* key, Index begin, Index size, PoseSequenced& seq,
               Index frame) {
  const auto it = person.find(key);
  if (it == person.end() || it->is_null()) return;
  if (!it->is_array()) throw Error(ErrorCode::kParseError, std::string(key) + " is not an array");
  if (it->empty()) return;
  if (static_cast<Index>(it->size()) != 3 * size) {
    throw Error(ErrorCode::kLayoutMismatch, std::string(key) + " has " +
                                              std::to_string(it->size()) + " values, expected " +
                                              std::to_string(3 * size));
  }
  for (Index i = 0; i < size; ++i) {
    const json& jx = (*it)[3 * i];
    const json& jy = (*it)[3 * i + 1];
    const json& jc = (*it)[3 * i + 2];
    if (!jx.is_number() || !jy.is_number() || !jc.is_number()) {
      throw Error(ErrorCode::kParseError, std::string(key) + " holds a non-number");
    }
    double c = jc.get<double>();
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorCode::kParseError, std::string(key) + " confidence outside [0, 1]");
    }
    seq.set_keypoint(frame, begin + i, {jx.get<double>(), jy.get<double>(), c});
  }
}

void read_frame(const json& frame, PoseSequenced& seq, Index f) {
  if (!frame.is_object()) throw Error(ErrorCode::kParseError, "frame is not an object");
  const auto people = frame.find("people");
  if (people == frame.end() || !people->is_array()) {
    throw Error(ErrorCode::kParseError, "frame has no 'people' array");
  }
  if (people->empty()) return;
  if (people->size() > 1) {
    throw Error(ErrorCode::kMultiplePersons,
                "frame " + std::to_string(f) + " has " + std::to_string(people->size()) +
                    " people");
  }
  const json& person = (*people)[0];
  const KeypointLayout& l = seq.layout();
  read_part(person, "pose_keypoints_2d", l.body.begin, l.body.size, seq, f);
  read_part(person, "face_keypoints_2d", l.face.begin, l.face.size, seq, f);
  read_part(person, "hand_left_keypoints_2d", l.left_hand.begin, l.left_hand.size, seq, f);
  read_part(person, "hand_right_keypoints_2d", l.right_hand.begin, l.right_hand.size, seq, f);
}

PoseSequenced from_frames(const std::vector<const json*>& frames, double fps) {
  PoseSequenced seq(KeypointLayout::openpose137(), static_cast<Index>(frames.size()), fps);
  for (std::size_t f = 0; f < frames.size(); ++f) read_frame(*frames[f], seq, static_cast<Index>(f));
  return seq;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

}  // namespace

PoseSequenced parse_pose_json(const std::string& text, double default_fps) {
  const json doc = parse_json(text);
  std::vector<const json*> frames;
  double fps = default_fps;
  if (doc.is_array()) {
    for (const json& f : doc) frames.push_back(&f);
  } else if (doc.is_object() && doc.contains("frames")) {
    const json& list = doc["frames"];
    if (!list.is_array()) throw Error(ErrorCode::kParseError, "'frames' is not an array");
    for (const json& f : list) frames.push_back(&f);
    if (doc.contains("fps")) {
      if (!doc["fps"].is_number()) throw Error(ErrorCode::kParseError, "'fps' is not a number");
      fps = doc["fps"].get<double>();
    }
  } else if (doc.is_object()) {
    frames.push_back(&doc);
  } else {
    throw Error(ErrorCode::kParseError, "unexpected JSON document shape");
  }
  if (!(fps > 0)) throw Error(ErrorCode::kParseError, "fps must be positive");
  return from_frames(frames, fps);
}

PoseSequenced ingest_pose_json(const fs::path& path, double default_fps) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    std::vector<json> docs;
    docs.reserve(files.size());
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      if (!in) throw Error(ErrorCode::kIoError, "cannot open " + f.string());
      docs.push_back(parse_json(read_all(in)));
    }
    std::vector<const json*> frames;
    for (const json& d : docs) frames.push_back(&d);
    return from_frames(frames, default_fps);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_pose_json(read_all(in), default_fps);
}

PoseSequenced load_pose(const fs::path& path) {
  if (fs::is_directory(path) || path.extension() == ".json") return ingest_pose_json(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_pose_file(in);
}

void save_pose(const fs::path& path, const PoseSequenced& seq) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  write_pose_file(out, seq);
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  const std::string data = read_all(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      if (i + 1 < data.size() && data[i + 1] == '\n') continue;
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::kParseError, "unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

DatasetManifest DatasetManifest::parse(std::istream& in, const fs::path& base_dir,
                                       bool check_files) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw Error(ErrorCode::kParseError, "manifest has no header row");
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].size(); ++i) column[rows[0][i]] = i;
  for (const char* required : {"id", "hamnosys", "pose_path", "language", "signer"}) {
    if (!column.contains(required)) {
      throw Error(ErrorCode::kParseError, std::string("manifest lacks column '") + required + "'");
    }
  }
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  DatasetManifest m;
  std::set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != rows[0].size()) {
      throw Error(ErrorCode::kParseError, "manifest row " + std::to_string(r) + " has " +
                                            std::to_string(row.size()) + " fields");
    }
    auto get = [&](const char* name) -> std::string {
      const auto it = column.find(name);
      return it == column.end() ? std::string() : row[it->second];
    };
    ManifestRecord rec;
    rec.id = get("id");
    rec.hamnosys = get("hamnosys");
    rec.pose_path = resolve(get("pose_path"));
    rec.language = get("language");
    rec.signer = get("signer");
    if (const std::string p = get("prediction_path"); !p.empty()) rec.prediction_path = resolve(p);
    rec.label = get("label");
    if (rec.label.empty()) rec.label = rec.hamnosys;
    if (rec.id.empty()) throw Error(ErrorCode::kParseError, "empty id in manifest");
    if (!ids.insert(rec.id).second) throw Error(ErrorCode::kDuplicateId, "duplicate id '" + rec.id + "'");
    if (check_files) {
      if (!fs::exists(rec.pose_path)) {
        throw Error(ErrorCode::kIoError, "missing pose file " + rec.pose_path.string());
      }
      if (rec.prediction_path && !fs::exists(*rec.prediction_path)) {
        throw Error(ErrorCode::kIoError, "missing prediction file " + rec.prediction_path->string());
      }
    }
    m.records.push_back(std::move(rec));
  }
  return m;
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open manifest " + path.string());
  return parse(in, path.parent_path(), true);
}

void DatasetManifest::write(std::ostream& out) const {
  out << "id,hamnosys,pose_path,language,signer,prediction_path,label\n";
  for (const auto& r : records) {
    out << csv_escape(r.id) << ',' << csv_escape(r.hamnosys) << ','
        << csv_escape(r.pose_path.generic_string()) << ',' << csv_escape(r.language) << ','
        << csv_escape(r.signer) << ','
        << csv_escape(r.prediction_path ? r.prediction_path->generic_string() : std::string())
        << ',' << csv_escape(r.label) << '\n';
  }
}

std::vector<LabeledSample> load_dataset(const DatasetManifest& manifest, unsigned threads) {
  std::vector<LabeledSample> out(manifest.records.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const ManifestRecord& r = manifest.records[i];
    LabeledSample& s = out[i];
    s.id = r.id;
    s.label = r.label;
    s.language = r.language;
    s.signer = r.signer;
    s.pose = load_pose(r.pose_path);
    if (r.prediction_path) s.prediction = load_pose(*r.prediction_path);
  });
  return out;
}

}  // namespace signpose
