#pragma once

#include <array>
#include <cstdint>

#include "algact/groups.hpp"

namespace algact {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

// Key of an independent substream, derived from (seed, task id).
struct StreamKey {
  std::array<std::uint32_t, 2> key{};
  static StreamKey derive(std::uint64_t seed, std::uint64_t task);
};

// The draws for one (sample, site) pair. The Philox counter is
// (block, sample, site_lo, site_hi), so every value is a pure function of
// (seed, task, sample, site, position within the stream).
class SiteStream {
 public:
  SiteStream(StreamKey key, std::uint32_t sample, std::uint64_t site)
      : key_(key), sample_(sample), site_(site) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  double next_double();        // uniform on [0, 1), 53 random bits
  double next_open_double();   // uniform on (0, 1]
  double normal();             // standard normal (Box-Muller)
  std::uint64_t below(std::uint64_t n);  // uniform on {0, ..., n-1}

 private:
  StreamKey key_;
  std::uint32_t sample_;
  std::uint64_t site_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable site identifier: Z^d coordinates packed 16 bits each (|c| < 32768),
// or the table index for finite groups.
std::uint64_t site_id(const GroupSpec& spec, const Element& g);

}  // namespace algact
