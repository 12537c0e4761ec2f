#include "unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace polar::uni {

std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString normalized = norm->normalize(input, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU NFC normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<std::uint32_t> code_point_offsets(std::string_view utf8) {
  std::vector<std::uint32_t> offsets;
  offsets.reserve(utf8.size() + 1);
  std::size_t i = 0;
  while (i < utf8.size()) {
    offsets.push_back(static_cast<std::uint32_t>(i));
    unsigned char b = static_cast<unsigned char>(utf8[i]);
    std::size_t len = 1;
    if ((b & 0x80u) == 0x00u) {
      len = 1;
    } else if ((b & 0xE0u) == 0xC0u) {
      len = 2;
    } else if ((b & 0xF0u) == 0xE0u) {
      len = 3;
    } else if ((b & 0xF8u) == 0xF0u) {
      len = 4;
    }
    // Stop at the string end even if a sequence claims more bytes.
    i += len;
    if (i > utf8.size()) {
      i = utf8.size();
    }
  }
  offsets.push_back(static_cast<std::uint32_t>(utf8.size()));
  return offsets;
}

std::size_t count_code_points(std::string_view utf8) {
  return code_point_offsets(utf8).size() - 1;
}

std::string_view truncate_code_points(std::string_view utf8, std::size_t max_points) {
  auto offsets = code_point_offsets(utf8);
  std::size_t n = offsets.size() - 1;
  if (n <= max_points) {
    return utf8;
  }
  return utf8.substr(0, offsets[max_points]);
}

}  // namespace polar::uni
