#include <atomic>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "algact/parallel.hpp"
#include "algact/random.hpp"

using namespace algact;

TEST_SUITE("random") {
  TEST_CASE("Philox4x32-10 known-answer vectors") {
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
          std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are pure functions of their coordinates") {
    const StreamKey k = StreamKey::derive(7, 3);
    SiteStream a(k, 5, 11), b(k, 5, 11), c(k, 5, 12), d(StreamKey::derive(8, 3), 5, 11);
    std::vector<std::uint32_t> va, vb, vc, vd;
    for (int i = 0; i < 9; ++i) {
      va.push_back(a.next_u32());
      vb.push_back(b.next_u32());
      vc.push_back(c.next_u32());
      vd.push_back(d.next_u32());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
    CHECK(StreamKey::derive(1, 2).key != StreamKey::derive(2, 1).key);
  }

  TEST_CASE("uniform doubles have the right mean and range") {
    SiteStream s(StreamKey::derive(1, 0), 0, 0);
    const int n = 200000;
    double sum = 0.0, lo = 1.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = s.next_double();
      sum += u;
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  }

  TEST_CASE("normals have unit variance") {
    SiteStream s(StreamKey::derive(2, 0), 0, 0);
    const int n = 200000;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = s.normal();
      m1 += z;
      m2 += z * z;
    }
    CHECK(std::abs(m1 / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(m2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  }

  TEST_CASE("below is uniform on its range") {
    SiteStream s(StreamKey::derive(3, 0), 0, 0);
    std::vector<int> counts(6, 0);
    const int n = 60000;
    for (int i = 0; i < n; ++i) ++counts[s.below(6)];
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
    CHECK(chi2 < 20.5);  // 99.9% quantile of chi-square with 5 dof
  }

  TEST_CASE("site ids are distinct on a box") {
    const GroupSpec z2 = GroupSpec::free_abelian(2);
    std::set<std::uint64_t> ids;
    for (const auto& g : enumerate_ball(z2, 20)) ids.insert(site_id(z2, g));
    CHECK(ids.size() == 41u * 41u);
  }

  TEST_CASE("parallel_for visits every index once and rethrows") {
    set_thread_count(4);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
    bool once = true;
    for (auto& h : hits) once = once && h.load() == 1;
    CHECK(once);
    CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                      if (i == 37) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    set_thread_count(0);
  }
}
