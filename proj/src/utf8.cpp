#include "toklab/utf8.hpp"

#include <cstdint>

namespace toklab::utf8 {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

struct Scan {
  std::size_t length;  // bytes consumed; the maximal invalid subpart on failure
  bool ok;
};

// Decodes one scalar at `pos` using the well-formed byte ranges of the
// Unicode standard, so invalid input is split into maximal subparts.
Scan scan_one(std::string_view s, std::size_t pos, char32_t& out) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    out = b0;
    return {1, true};
  }
  std::size_t len = 0;
  unsigned char lo = 0x80;
  unsigned char hi = 0xBF;
  char32_t cp = 0;
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    len = 2;
    cp = b0 & 0x1F;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    len = 3;
    cp = b0 & 0x0F;
    if (b0 == 0xE0) lo = 0xA0;
    if (b0 == 0xED) hi = 0x9F;
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    len = 4;
    cp = b0 & 0x07;
    if (b0 == 0xF0) lo = 0x90;
    if (b0 == 0xF4) hi = 0x8F;
  } else {
    return {1, false};
  }
  for (std::size_t i = 1; i < len; ++i) {
    if (pos + i >= s.size()) return {i, false};
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if (b < lo || b > hi) return {i, false};
    lo = 0x80;
    hi = 0xBF;
    cp = (cp << 6) | (b & 0x3F);
  }
  out = cp;
  return {len, true};
}

std::size_t decode_one(std::string_view s, std::size_t pos, char32_t& out) {
  const Scan r = scan_one(s, pos, out);
  return r.ok ? r.length : 0;
}

}  // namespace

std::optional<std::u32string> try_decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    char32_t cp;
    const std::size_t n = decode_one(bytes, pos, cp);
    if (n == 0) return std::nullopt;
    out.push_back(cp);
    pos += n;
  }
  return out;
}

std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    char32_t cp;
    const std::size_t n = decode_one(bytes, pos, cp);
    if (n == 0) throw InvalidUtf8(pos);
    out.push_back(cp);
    pos += n;
  }
  return out;
}

std::string decode_lossy(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    char32_t cp;
    const Scan r = scan_one(bytes, pos, cp);
    if (r.ok) {
      out.append(bytes.substr(pos, r.length));
    } else {
      out += encode(kReplacement);
    }
    pos += r.length;
  }
  return out;
}

bool is_valid(std::string_view bytes) { return try_decode(bytes).has_value(); }

std::string encode(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
  return out;
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) out += encode(c);
  return out;
}

std::size_t length(std::string_view bytes) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    char32_t cp;
    const std::size_t step = decode_one(bytes, pos, cp);
    pos += step == 0 ? 1 : step;
    ++n;
  }
  return n;
}

bool is_space(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x1C: case 0x1D: case 0x1E: case 0x1F: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

std::string strip(std::string_view text) {
  // Work on code-point boundaries so multi-byte spaces are recognized.
  std::size_t begin = 0;
  while (begin < text.size()) {
    char32_t cp;
    const std::size_t n = decode_one(text, begin, cp);
    if (n == 0 || !is_space(cp)) break;
    begin += n;
  }
  std::size_t end = text.size();
  while (end > begin) {
    // Find the start of the last code point.
    std::size_t start = end - 1;
    while (start > begin &&
           (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80 &&
           end - start < 4) {
      --start;
    }
    char32_t cp;
    const std::size_t n = decode_one(text, start, cp);
    if (n == 0 || start + n != end || !is_space(cp)) break;
    end = start;
  }
  return std::string(text.substr(begin, end - begin));
}

}  // namespace toklab::utf8
