#include <algorithm>

#include "doctest.h"
#include "llc/channel.h"
#include "llc/rng.h"

using namespace llc;

TEST_CASE("sinr hand values")
{
  const SinrSample a = sinr({-80.0}, {}, -90.0);
  CHECK(a.sinr_db == doctest::Approx(10.0));

  const SinrSample b = sinr({-80.0}, {{-80.0}}, -120.0);
  CHECK(b.sinr_db == doctest::Approx(0.0).epsilon(0.01));

  const SinrSample c = sinr({-80.0}, {{-80.0}, {-80.0}}, -300.0);
  CHECK(c.sinr_db == doctest::Approx(-3.0103).epsilon(0.001));
}

TEST_CASE("sinr is permutation invariant and monotone in interference")
{
  Rng rng(1);
  for (int i = 0; i < 300; ++i) {
    std::vector<PowerDbm> interferers;
    const int n = static_cast<int>(1 + rng.next_below(6));
    for (int k = 0; k < n; ++k) {
      interferers.push_back({rng.next_real_in(-120.0, -60.0)});
    }
    const PowerDbm target{rng.next_real_in(-100.0, -60.0)};
    const double noise = rng.next_real_in(-120.0, -90.0);
    const double base = sinr(target, interferers, noise).sinr_db;

    std::vector<PowerDbm> shuffled = interferers;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(sinr(target, shuffled, noise).sinr_db == doctest::Approx(base));

    std::vector<PowerDbm> louder = interferers;
    louder[0].dbm += 3.0;
    CHECK(sinr(target, louder, noise).sinr_db < base);
  }
}

TEST_CASE("decode_outcome capture rules")
{
  CHECK(decode_outcome(PowerDbm{-80.0}, PowerDbm{-77.0}, true) == DecodeOutcome::SpoofDecoded);
  CHECK(decode_outcome(std::nullopt, PowerDbm{-100.0}, false) == DecodeOutcome::SpoofDecoded);
  CHECK(decode_outcome(PowerDbm{-80.0}, PowerDbm{-79.0}, true) == DecodeOutcome::Collision);
  CHECK(decode_outcome(PowerDbm{-77.0}, PowerDbm{-80.0}, true) == DecodeOutcome::LegitDecoded);
  CHECK(decode_outcome(PowerDbm{-80.0}, std::nullopt, true) == DecodeOutcome::LegitDecoded);
  // Below sensitivity nothing decodes.
  CHECK(decode_outcome(PowerDbm{-115.0}, std::nullopt, true) == DecodeOutcome::Collision);
  CHECK(decode_outcome(std::nullopt, PowerDbm{-115.0}, false) == DecodeOutcome::Collision);
  // Occupied resources without a power advantage stay undecodable.
  CHECK(decode_outcome(std::nullopt, PowerDbm{-80.0}, true) == DecodeOutcome::Collision);
}

TEST_CASE("decode_outcome is antisymmetric under power swap")
{
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const PowerDbm a{rng.next_real_in(-109.0, -60.0)};
    const PowerDbm b{rng.next_real_in(-109.0, -60.0)};
    const DecodeOutcome fwd = decode_outcome(a, b, true);
    const DecodeOutcome rev = decode_outcome(b, a, true);
    if (fwd == DecodeOutcome::SpoofDecoded) {
      CHECK(rev == DecodeOutcome::LegitDecoded);
    } else if (fwd == DecodeOutcome::LegitDecoded) {
      CHECK(rev == DecodeOutcome::SpoofDecoded);
    } else {
      CHECK(rev == DecodeOutcome::Collision);
    }
  }
}

TEST_CASE("throughput capacity proxy")
{
  ResourceAllocation a;
  a.num_rb = 50;

  // Spectral efficiency cap binds at absurd SINR.
  const double capped = throughput_mbps(a, 200.0, 0);
  CHECK(capped == doctest::Approx(50 * 180e3 * 7.4 * 0.7 / 1e6));

  // Zero linear SINR edge.
  const double zero = throughput_mbps(a, -400.0, 0);
  CHECK(zero == doctest::Approx(0.0).epsilon(1e-9));

  // Linear in the allocation size.
  ResourceAllocation half = a;
  half.num_rb = 25;
  CHECK(throughput_mbps(half, 12.0, 0) == doctest::Approx(throughput_mbps(a, 12.0, 0) / 2.0));
}

TEST_CASE("throughput is monotone in sinr and exactly linear in rbs")
{
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    ResourceAllocation a;
    a.num_rb = static_cast<uint32_t>(1 + rng.next_below(100));
    const double s1 = rng.next_real_in(-20.0, 40.0);
    const double s2 = s1 + rng.next_real_in(0.0, 10.0);
    CHECK(throughput_mbps(a, s2, 0) >= throughput_mbps(a, s1, 0));

    ResourceAllocation b = a;
    b.num_rb = a.num_rb * 3;
    CHECK(throughput_mbps(b, s1, 0) == doctest::Approx(3.0 * throughput_mbps(a, s1, 0)));
  }
}

TEST_CASE("rb bandwidth scales with numerology")
{
  CHECK(rb_bandwidth_hz(0) == doctest::Approx(180e3));
  CHECK(rb_bandwidth_hz(3) == doctest::Approx(1.44e6));
}
