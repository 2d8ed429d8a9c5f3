#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace depscope {

// 64-bit FNV-1a. Used for method fingerprints, closure digests and cache
// checksums; deterministic across platforms and runs.
class Digest64 {
 public:
  static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

  constexpr Digest64() = default;

  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= p[i];
      state_ *= kPrime;
    }
  }
  void update(std::string_view s) { update(s.data(), s.size()); }
  void update_u8(std::uint8_t v) { update(&v, 1); }
  void update_u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    update(b, 4);
  }
  void update_u64(std::uint64_t v) {
    update_u32(static_cast<std::uint32_t>(v >> 32));
    update_u32(static_cast<std::uint32_t>(v));
  }

  std::uint64_t value() const { return state_; }
  std::string hex() const;

  static std::uint64_t of(std::string_view s) {
    Digest64 d;
    d.update(s);
    return d.value();
  }
  static std::uint64_t of_bytes(const void* data, std::size_t len) {
    Digest64 d;
    d.update(data, len);
    return d.value();
  }

 private:
  std::uint64_t state_ = kOffset;
};

std::string to_hex64(std::uint64_t v);

}  // namespace depscope
