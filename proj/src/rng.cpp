#include "windesign/rng.hpp"

#include "windesign/mathutil.hpp"

namespace windesign {

namespace {

constexpr uint32_t kM0 = 0xD2511F53u;
constexpr uint32_t kM1 = 0xCD9E8D57u;
constexpr uint32_t kW0 = 0x9E3779B9u;
constexpr uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
  uint64_t p0 = static_cast<uint64_t>(kM0) * c[0];
  uint64_t p1 = static_cast<uint64_t>(kM1) * c[2];
  uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
  uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    key[0] += kW0;
    key[1] += kW1;
  }
  return counter;
}

namespace {

// Counter layout: {draw, subject, batch low 32, tag | batch high 16}. The tag
// byte packs stream and arm so no two logical uses share a counter block.
inline std::array<uint32_t, 4> make_counter(const RngKey& key, uint64_t subject, uint32_t draw) {
  uint32_t tag = (static_cast<uint32_t>(key.stream) << 24) | (key.arm << 16) |
                 static_cast<uint32_t>((key.batch >> 32) & 0xFFFFu);
  return {draw, static_cast<uint32_t>(subject), static_cast<uint32_t>(key.batch), tag};
}

}  // namespace

double uniform01(const RngKey& key, uint64_t subject, uint32_t draw) {
  auto out = philox4x32(make_counter(key, subject, draw),
                        {static_cast<uint32_t>(key.seed), static_cast<uint32_t>(key.seed >> 32)});
  uint64_t bits = (static_cast<uint64_t>(out[0]) << 32) | out[1];
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double normal01(const RngKey& key, uint64_t subject, uint32_t draw) {
  return inverse_normal_cdf(uniform01(key, subject, draw));
}

}  // namespace windesign
