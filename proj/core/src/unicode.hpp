#ifndef POLAR_SRC_UNICODE_HPP
#define POLAR_SRC_UNICODE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace polar::uni {

/// Canonical composition (NFC). Invalid UTF-8 bytes are replaced with U+FFFD.
std::string nfc(std::string_view utf8);

/// Byte offsets of the code point starts in `utf8`, plus one past-the-end
/// offset. A malformed byte counts as one code point.
std::vector<std::uint32_t> code_point_offsets(std::string_view utf8);

std::size_t count_code_points(std::string_view utf8);

/// Longest prefix containing at most `max_points` code points.
std::string_view truncate_code_points(std::string_view utf8, std::size_t max_points);

}  // namespace polar::uni

#endif  // POLAR_SRC_UNICODE_HPP
