#pragma once

#include <array>
#include <cstdint>

namespace windesign {

// Philox4x32-10 counter-based generator. Every draw is a pure function of
// (seed, stream, batch, arm, subject, draw-index), so any parallel schedule
// reproduces identical values and independent streams never collide.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key);

enum class Stream : uint32_t {
  SuperSample = 1,   // adaptive estimation batches
  Trial = 2,         // trial replicates
  Calibration = 3,   // concordance calibration samples
  Generic = 7,
};

struct RngKey {
  uint64_t seed = 0;
  Stream stream = Stream::Generic;
  uint64_t batch = 0;  // batch / replicate / evaluation index (48 bits used)
  uint32_t arm = 0;    // sample tag within a batch (control / treatment / null-treatment)
};

// Uniform double in the open interval (0,1). One Philox block per draw; the
// 64-bit payload maps to (0,1) with 2^-54 offset so 0 and 1 are unreachable.
double uniform01(const RngKey& key, uint64_t subject, uint32_t draw);

// Standard normal via inverse-CDF transform of uniform01 (monotone coupling;
// deliberately not Box-Muller so copula semantics stay exact).
double normal01(const RngKey& key, uint64_t subject, uint32_t draw);

}  // namespace windesign
