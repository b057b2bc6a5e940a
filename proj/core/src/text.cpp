#include "jobalign/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "jobalign/errors.hpp"

namespace jobalign {

namespace {

const icu::Normalizer2& nfkc_instance() {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(ec);
  if (U_FAILURE(ec) || n == nullptr) {
    throw Error("ICU NFKC normalizer unavailable");
  }
  return *n;
}

}  // namespace

std::string nfkc(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  UErrorCode ec = U_ZERO_ERROR;
  icu::UnicodeString out = nfkc_instance().normalize(s, ec);
  if (U_FAILURE(ec)) throw Error("NFKC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::string to_lower(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  s.toLower(icu::Locale::getRoot());
  std::string result;
  s.toUTF8String(result);
  return result;
}

std::string trim(std::string_view utf8) {
  std::u32string scalars = decode_utf8(utf8);
  std::size_t begin = 0;
  std::size_t end = scalars.size();
  while (begin < end && u_isUWhiteSpace(static_cast<UChar32>(scalars[begin]))) {
    ++begin;
  }
  while (end > begin &&
         u_isUWhiteSpace(static_cast<UChar32>(scalars[end - 1]))) {
    --end;
  }
  return encode_utf8(std::u32string_view(scalars).substr(begin, end - begin));
}

std::string normalize_text(std::string_view utf8) { return trim(nfkc(utf8)); }

std::size_t scalar_count(std::string_view utf8) {
  return decode_utf8(utf8).size();
}

std::u32string decode_utf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  int32_t i = 0;
  const auto len = static_cast<int32_t>(utf8.size());
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    if (c < 0) throw ParseError("invalid UTF-8 byte sequence");
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string encode_utf8(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size() * 3);
  for (char32_t c : scalars) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool err = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), err);
    if (err) throw ParseError("scalar value outside Unicode range");
    out.append(reinterpret_cast<const char*>(buf), static_cast<size_t>(n));
  }
  return out;
}

std::string encode_utf8(char32_t scalar) {
  return encode_utf8(std::u32string_view(&scalar, 1));
}

bool is_separator(char32_t c) {
  const auto uc = static_cast<UChar32>(c);
  if (u_isUWhiteSpace(uc)) return true;
  switch (u_charType(uc)) {
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_CONNECTOR_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_CONTROL_CHAR:
    case U_FORMAT_CHAR:
      return true;
    default:
      return false;
  }
}

bool is_cjk(char32_t c) {
  return (c >= 0x3400 && c <= 0x4DBF) ||   // extension A
         (c >= 0x4E00 && c <= 0x9FFF) ||   // unified ideographs
         (c >= 0xF900 && c <= 0xFAFF) ||   // compatibility ideographs
         (c >= 0x20000 && c <= 0x3134A);   // extensions B..G
}

}  // namespace jobalign
