#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

#include "ecmmd/common.hpp"
#include "ecmmd/parallel.hpp"
#include "ecmmd/rng.hpp"

using namespace ecmmd;

TEST_CASE("philox known-answer vectors") {
  // Random123 reference outputs for Philox4x32-10
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(1, StreamDomain::Resample, 3, 4), b(1, StreamDomain::Resample, 3, 4);
  RngStream c(1, StreamDomain::Resample, 4, 3), d(1, StreamDomain::Covariate, 3, 4);
  std::vector<double> va, vb, vc, vd;
  for (int i = 0; i < 20; ++i) {
    va.push_back(a.uniform());
    vb.push_back(b.uniform());
    vc.push_back(c.uniform());
    vd.push_back(d.uniform());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  for (double u : va) {
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  CHECK(derive_seed(5, 0) != derive_seed(5, 1));
  CHECK(derive_seed(5, 0) == derive_seed(5, 0));
}

TEST_CASE("distribution moments") {
  RngStream r(9, StreamDomain::Response, 0, 0);
  const int n = 200000;
  double s = 0, s2 = 0, g = 0, b = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
    g += r.gamma(2.5);
    b += r.beta(0.3, 0.7);
  }
  CHECK(std::fabs(s / n) < 0.01);
  CHECK(std::fabs(s2 / n - 1) < 0.02);
  CHECK(std::fabs(g / n - 2.5) < 0.03);
  CHECK(std::fabs(b / n - 0.3) < 0.005);
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  std::vector<std::atomic<int>> hits(10000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 57) throw InputError("bad");
                  }),
                  InputError);
  std::atomic<int> nested{0};
  parallel_for(8, [&](std::size_t) { parallel_for(8, [&](std::size_t) { nested++; }); });
  CHECK(nested.load() == 64);
}

TEST_CASE("compensated sums and medians") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 3, 2}) == 2.5);
}
