#include <unicode/uchar.h>
#include <unicode/ustring.h>
#include <unicode/utf16.h>
#include <unicode/utf8.h>

#include "mesa/metrics/text_metrics.hpp"

namespace mesa::metrics {

namespace {

// Full case folding, so one code point may expand ("ß" -> "ss").
std::string fold_to_utf8(const std::u16string& word) {
  UErrorCode status = U_ZERO_ERROR;
  std::u16string folded(word.size() * 3 + 1, u'\0');
  const int32_t n = u_strFoldCase(folded.data(), static_cast<int32_t>(folded.size()), word.data(),
                                  static_cast<int32_t>(word.size()), U_FOLD_CASE_DEFAULT, &status);
  if (U_FAILURE(status)) return {};
  std::string out(static_cast<std::size_t>(n) * 3 + 1, '\0');
  int32_t written = 0;
  status = U_ZERO_ERROR;
  u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &written, folded.data(), n, &status);
  if (U_FAILURE(status)) return {};
  out.resize(static_cast<std::size_t>(written));
  return out;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::u16string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(fold_to_utf8(current));
    current.clear();
  };
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) continue;  // invalid UTF-8 sequence
    if (u_isUWhiteSpace(c)) {
      flush();
      continue;
    }
    if (U_GET_GC_MASK(c) & U_GC_P_MASK) {
      // Punctuation inside a word ("low-angle") separates tokens.
      flush();
      continue;
    }
    if (U_IS_BMP(c)) {
      current.push_back(static_cast<char16_t>(c));
    } else {
      current.push_back(static_cast<char16_t>(U16_LEAD(c)));
      current.push_back(static_cast<char16_t>(U16_TRAIL(c)));
    }
  }
  flush();
  return out;
}

TokenizedPromptSet tokenize_all(std::span<const std::string> prompts) {
  TokenizedPromptSet set;
  set.prompts.reserve(prompts.size());
  for (const auto& p : prompts) set.prompts.push_back(tokenize(p));
  return set;
}

}  // namespace mesa::metrics
