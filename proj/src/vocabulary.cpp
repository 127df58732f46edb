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

#include "signpose/vocabulary.hpp"

#include <istream>
#include <iterator>
#include <ostream>

#include "signpose/error.hpp"

namespace signpose {

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char lead = s[i];
    int extra;
    char32_t cp;
    char32_t min;
    if (lead < 0x80) {
      out.push_back(lead);
      ++i;
      continue;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1, cp = lead & 0x1F, min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2, cp = lead & 0x0F, min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3, cp = lead & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacementGlyph);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; ok && k <= extra; ++k) {
      if (i + k >= n || (s[i + k] & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (s[i + k] & 0x3F);
      }
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacementGlyph);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) out += encode_utf8(cp);
  return out;
}

std::vector<std::int32_t> HamTokenSequence::positions() const {
  std::vector<std::int32_t> p(token_ids.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<std::int32_t>(i);
  return p;
}

void Vocabulary::add(char32_t glyph) {
  if (ids_.contains(glyph)) return;
  ids_.emplace(glyph, size());
  glyphs_.push_back(glyph);
}

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus) {
  Vocabulary v;
  for (const auto& text : corpus) {
    for (char32_t g : decode_utf8(text)) v.add(g);
  }
  return v;
}

std::int32_t Vocabulary::id(char32_t glyph) const {
  const auto it = ids_.find(glyph);
  return it == ids_.end() ? kUnknownId : it->second;
}

char32_t Vocabulary::glyph(std::int32_t id) const {
  if (id < kReservedCount || id >= size()) return kReplacementGlyph;
  return glyphs_[static_cast<std::size_t>(id - kReservedCount)];
}

HamTokenSequence Vocabulary::tokenize(std::string_view text) const {
  HamTokenSequence out;
  for (char32_t g : decode_utf8(text)) out.token_ids.push_back(id(g));
  return out;
}

std::string Vocabulary::detokenize(const HamTokenSequence& tokens) const {
  std::u32string text;
  for (std::int32_t t : tokens.token_ids) {
    if (t == kPadId) continue;
    text.push_back(glyph(t));
  }
  return encode_utf8(text);
}

void Vocabulary::write(std::ostream& out) const {
  for (char32_t g : glyphs_) {
    switch (g) {
      case U'\\': out << "\\\\"; break;
      case U'\n': out << "\\n"; break;
      case U'\r': out << "\\r"; break;
      default: out << encode_utf8(g);
    }
    out << '\n';
  }
}

Vocabulary Vocabulary::read(std::istream& in) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  Vocabulary v;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    const std::string_view line(data.data() + start, end - start);
    ++line_no;
    const auto where = " on line " + std::to_string(line_no);
    std::u32string decoded;
    if (line == "\\\\") {
      decoded = U"\\";
    } else if (line == "\\n") {
      decoded = U"\n";
    } else if (line == "\\r") {
      decoded = U"\r";
    } else {
      decoded = decode_utf8(line);
      if (encode_utf8(decoded) != line) throw Error(ErrorCode::kParseError, "invalid UTF-8" + where);
    }
    if (decoded.size() != 1 || (decoded[0] == U'\\' && line != "\\\\")) {
      throw Error(ErrorCode::kParseError, "expected exactly one glyph" + where);
    }
    if (v.ids_.contains(decoded[0])) throw Error(ErrorCode::kParseError, "duplicate glyph" + where);
    v.add(decoded[0]);
    start = end + 1;
  }
  return v;
}

}  // namespace signpose
