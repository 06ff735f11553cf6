#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace obp {

inline long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i)
    r *= base;
  return r;
}

// Fixed-width base-b codes, most significant digit first:
// code = Σ_i digits[i] · b^{width−1−i}.
struct RadixCodec {
  int base = 1;
  int width = 0;

  long size() const { return ipow(base, width); }

  int digit(long code, int pos) const {
    return static_cast<int>((code / ipow(base, width - 1 - pos)) % base);
  }

  std::vector<int> decode(long code) const {
    std::vector<int> out(static_cast<std::size_t>(width));
    for (int i = width - 1; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = static_cast<int>(code % base);
      code /= base;
    }
    return out;
  }

  long encode(const std::vector<int>& digits) const {
    if (static_cast<int>(digits.size()) != width)
      throw std::invalid_argument("RadixCodec::encode: wrong number of digits");
    long code = 0;
    for (int d : digits)
      code = code * base + d;
    return code;
  }
};

} // namespace obp
