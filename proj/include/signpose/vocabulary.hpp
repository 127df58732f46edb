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
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace signpose {

/// Decodes UTF-8 into Unicode scalar values. Malformed bytes decode to
/// U+FFFD, one per offending byte.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);
std::string encode_utf8(char32_t glyph);

inline constexpr char32_t kReplacementGlyph = U'\uFFFD';

struct HamTokenSequence {
  std::vector<std::int32_t> token_ids;

  std::size_t size() const { return token_ids.size(); }
  /// 0, 1, ..., size() - 1.
  std::vector<std::int32_t> positions() const;
};

/// Glyph <-> id map. Ids 0 and 1 are padding and unknown; glyphs follow in
/// order of first appearance.
class Vocabulary {
 public:
  static constexpr std::int32_t kPadId = 0;
  static constexpr std::int32_t kUnknownId = 1;
  static constexpr std::int32_t kReservedCount = 2;

  Vocabulary() = default;

  /// One id per distinct Unicode scalar across `corpus`.
  static Vocabulary build(const std::vector<std::string>& corpus);

  std::int32_t size() const { return kReservedCount + static_cast<std::int32_t>(glyphs_.size()); }
  std::int32_t id(char32_t glyph) const;
  /// kReplacementGlyph for reserved or out-of-range ids.
  char32_t glyph(std::int32_t id) const;
  const std::vector<char32_t>& glyphs() const { return glyphs_; }

  HamTokenSequence tokenize(std::string_view text) const;
  /// Padding ids are dropped; unknown ids become U+FFFD.
  std::string detokenize(const HamTokenSequence& tokens) const;

  /// One glyph per line; line i holds id kReservedCount + i. Backslash,
  /// newline and carriage return are escaped as \\, \n and \r.
  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.glyphs_ == b.glyphs_; }

 private:
  void add(char32_t glyph);

  std::vector<char32_t> glyphs_;
  std::unordered_map<char32_t, std::int32_t> ids_;
};

}  // namespace signpose
