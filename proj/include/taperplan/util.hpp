#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace taperplan {

// Shortest decimal form that parses back to the same double.  Used for all
// machine-readable output so repeated runs are byte-identical.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Whitespace tokenization: any run of blanks separates tokens, none are
// kept empty.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  const char* ws = " \t\r\n";
  std::size_t pos = 0;
  while (true) {
    auto b = s.find_first_not_of(ws, pos);
    if (b == std::string_view::npos) break;
    auto e = s.find_first_of(ws, b);
    if (e == std::string_view::npos) {
      out.emplace_back(s.substr(b));
      break;
    }
    out.emplace_back(s.substr(b, e - b));
    pos = e;
  }
  return out;
}

// FNV-1a over a byte stream; stable across platforms, good enough for
// input fingerprints in run manifests.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace taperplan
