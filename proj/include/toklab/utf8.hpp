#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "toklab/error.hpp"

namespace toklab::utf8 {

class InvalidUtf8 : public Error {
 public:
  explicit InvalidUtf8(std::size_t byte_offset)
      : Error("invalid UTF-8 at byte " + std::to_string(byte_offset)),
        offset_(byte_offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Strict decoder: rejects overlongs, surrogates and code points > U+10FFFF.
std::u32string decode(std::string_view bytes);
std::optional<std::u32string> try_decode(std::string_view bytes);

// Invalid sequences become U+FFFD, one per maximal invalid subpart.
std::string decode_lossy(std::string_view bytes);

std::string encode(std::u32string_view text);
std::string encode(char32_t c);

bool is_valid(std::string_view bytes);

// Number of code points; invalid bytes count one each.
std::size_t length(std::string_view bytes);

// Same set as Python's str.isspace().
bool is_space(char32_t c);

// Strips leading/trailing whitespace (per is_space) from UTF-8 text.
std::string strip(std::string_view text);

}  // namespace toklab::utf8
