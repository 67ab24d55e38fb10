#include "algact/random.hpp"

#include <cmath>
#include <numbers>

namespace algact {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

StreamKey StreamKey::derive(std::uint64_t seed, std::uint64_t task) {
  const std::uint64_t k = splitmix64(seed ^ splitmix64(task ^ 0x6a09e667f3bcc909ULL));
  StreamKey out;
  out.key = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return out;
}

std::uint32_t SiteStream::next_u32() {
  if (used_ == 4) {
    buffer_ = philox4x32({block_++, sample_, static_cast<std::uint32_t>(site_),
                          static_cast<std::uint32_t>(site_ >> 32)},
                         key_.key);
    used_ = 0;
  }
  return buffer_[used_++];
}

std::uint64_t SiteStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double SiteStream::next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double SiteStream::next_open_double() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double SiteStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(next_open_double()));
  const double phi = 2.0 * std::numbers::pi * next_double();
  spare_ = r * std::sin(phi);
  have_spare_ = true;
  return r * std::cos(phi);
}

std::uint64_t SiteStream::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  while (true) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % n;
  }
}

std::uint64_t site_id(const GroupSpec& spec, const Element& g) {
  if (spec.is_finite()) return static_cast<std::uint64_t>(g.idx());
  std::uint64_t id = 0;
  for (int i = 0; i < spec.rank(); ++i) {
    const int c = g.c[i];
    if (c <= -32768 || c >= 32768) throw DomainError("site coordinate out of the packable range");
    id |= static_cast<std::uint64_t>(c + 32768) << (16 * i);
  }
  return id;
}

}  // namespace algact
