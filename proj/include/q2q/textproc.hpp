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

#ifndef Q2Q_TEXTPROC_HPP_
#define Q2Q_TEXTPROC_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace q2q {

/// A question after normalization, split into whitespace-free tokens.
struct NormalizedSentence {
  std::vector<std::string> tokens;
  std::string raw;
};

/// Arabic-aware cleanup applied to every dataset:
///  - strips diacritics and tatweel,
///  - maps alef variants to bare alef and alef maqsura to ya,
///  - keeps only letters, digits and the punctuation set {، ؛ ؟ . ! ?},
///    each punctuation mark padded with single spaces,
///  - collapses elongated runs of waw and ya,
///  - collapses whitespace and trims.
/// Throws EncodingError on malformed UTF-8.
std::string normalize(std::string_view text);

/// Whitespace split of normalize(text).
NormalizedSentence tokenize(std::string_view text);

/// True iff the last normalized token is an Arabic or Latin question mark.
bool is_question(std::string_view text);

std::vector<char32_t> decode_utf8(std::string_view text);
std::string encode_utf8(const std::vector<char32_t>& code_points);

}  // namespace q2q

#endif  // Q2Q_TEXTPROC_HPP_
