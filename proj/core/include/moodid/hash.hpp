#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace moodid {

/// 64-bit FNV-1a. Stable across platforms; used for config and input hashes.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  std::uint64_t value() const noexcept { return state_; }

  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string to_hex(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::string Fnv1a::hex() const { return to_hex(state_); }

inline std::string hash_hex(std::string_view bytes) { return Fnv1a{}.update(bytes).hex(); }

}  // namespace moodid
