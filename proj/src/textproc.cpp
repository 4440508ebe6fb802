// Copyright 2026 The Q2Q Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "q2q/textproc.hpp"

#include <sstream>

#include "q2q/errors.hpp"

namespace q2q {

namespace {

constexpr char32_t kAlef = 0x0627;
constexpr char32_t kWaw = 0x0648;
constexpr char32_t kYa = 0x064A;

bool is_diacritic(char32_t c) {
  return (c >= 0x064B && c <= 0x065F) || c == 0x0670 || (c >= 0x06D6 && c <= 0x06ED);
}

bool is_retained_punct(char32_t c) {
  return c == 0x060C || c == 0x061B || c == 0x061F || c == U'.' || c == U'!' || c == U'?';
}

bool is_arabic_letter(char32_t c) {
  return (c >= 0x0621 && c <= 0x063A) || (c >= 0x0641 && c <= 0x064A) || (c >= 0x066E && c <= 0x066F) ||
         (c >= 0x0671 && c <= 0x06D3) || c == 0x06D5;
}

bool is_kept_char(char32_t c) {
  return is_arabic_letter(c) || (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') ||
         (c >= U'0' && c <= U'9') || (c >= 0x0660 && c <= 0x0669) || (c >= 0x06F0 && c <= 0x06F9);
}

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' || c == 0x00A0;
}

char32_t fold(char32_t c) {
  switch (c) {
    case 0x0622:  // alef with madda
    case 0x0623:  // alef with hamza above
    case 0x0625:  // alef with hamza below
      return kAlef;
    case 0x0649:  // alef maqsura
      return kYa;
    default:
      return c;
  }
}

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto fail = [&](const char* why) {
    throw EncodingError(std::string("invalid UTF-8 at byte ") + std::to_string(i) + ": " + why);
  };
  while (i < text.size()) {
    auto b0 = static_cast<unsigned char>(text[i]);
    int len = 1;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      fail("bad lead byte");
    }
    if (i + static_cast<std::size_t>(len) > text.size()) fail("truncated sequence");
    for (int k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) fail("bad continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len]) fail("overlong encoding");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("code point out of range");
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

std::string encode_utf8(const std::vector<char32_t>& code_points) {
  std::string out;
  out.reserve(code_points.size() * 2);
  for (char32_t c : code_points) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

std::string normalize(std::string_view text) {
  std::vector<char32_t> cps = decode_utf8(text);

  // Character classes; punctuation is padded so it splits off as a token.
  std::vector<char32_t> kept;
  kept.reserve(cps.size() + 8);
  for (char32_t c : cps) {
    if (is_diacritic(c) || c == 0x0640) continue;
    c = fold(c);
    if (is_retained_punct(c)) {
      kept.push_back(U' ');
      kept.push_back(c);
      kept.push_back(U' ');
    } else if (is_kept_char(c)) {
      kept.push_back(c);
    } else if (is_space(c)) {
      kept.push_back(U' ');
    }
  }

  // Elongation collapse and whitespace squeeze in one pass.
  std::vector<char32_t> out;
  out.reserve(kept.size());
  for (char32_t c : kept) {
    if (c == U' ') {
      if (!out.empty() && out.back() != U' ') out.push_back(c);
      continue;
    }
    if ((c == kWaw || c == kYa) && !out.empty() && out.back() == c) continue;
    out.push_back(c);
  }
  if (!out.empty() && out.back() == U' ') out.pop_back();
  return encode_utf8(out);
}

NormalizedSentence tokenize(std::string_view text) {
  NormalizedSentence s;
  s.raw = std::string(text);
  std::istringstream in(normalize(text));
  std::string tok;
  while (in >> tok) s.tokens.push_back(tok);
  return s;
}

bool is_question(std::string_view text) {
  NormalizedSentence s = tokenize(text);
  if (s.tokens.empty()) return false;
  const std::string& last = s.tokens.back();
  return last == "?" || last == "\xD8\x9F";  // U+061F
}

}  // namespace q2q
