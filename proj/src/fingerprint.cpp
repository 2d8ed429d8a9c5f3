#include "depscope/digest.hpp"

namespace depscope {

std::string to_hex64(std::uint64_t v) {
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::string Digest64::hex() const { return to_hex64(state_); }

}  // namespace depscope
