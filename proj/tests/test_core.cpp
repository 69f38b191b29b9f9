#include "doctest.h"
#include "llc/core.h"
#include "llc/rng.h"

using namespace llc;

namespace {

// Brute-force counter oracle: advance one slot at a time.
SlotTime advance_oracle(SlotTime t, int64_t n)
{
  for (int64_t i = 0; i < n; ++i) {
    t.slot += 1;
    if (t.slot >= (1 << t.mu)) {
      t.slot = 0;
      t.subframe += 1;
      if (t.subframe >= 10) {
        t.subframe = 0;
        t.sfn = static_cast<uint16_t>((t.sfn + 1) % 1024);
      }
    }
  }
  return t;
}

}  // namespace

TEST_CASE("slot_advance basics")
{
  SlotTime t{0, 0, 0, 0};
  SlotTime r = slot_advance(t, 10);
  CHECK(r.sfn == 1);
  CHECK(r.subframe == 0);
  CHECK(r.slot == 0);

  SlotTime wrap{1023, 9, 0, 0};
  r = slot_advance(wrap, 1);
  CHECK(r.sfn == 0);
  CHECK(r.subframe == 0);
  CHECK(r.slot == 0);

  SlotTime hi{0, 0, 7, 3};
  r = slot_advance(hi, 1);
  CHECK(r.sfn == 0);
  CHECK(r.subframe == 1);
  CHECK(r.slot == 0);
  CHECK(r == advance_oracle(hi, 1));
}

TEST_CASE("slot_advance agrees with the counter oracle")
{
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    SlotTime t;
    t.mu = static_cast<uint8_t>(rng.next_below(2) == 0 ? 0 : 3);
    t.sfn = static_cast<uint16_t>(rng.next_below(1024));
    t.subframe = static_cast<uint8_t>(rng.next_below(10));
    t.slot = static_cast<uint8_t>(rng.next_below(1ull << t.mu));
    const int64_t n = static_cast<int64_t>(rng.next_below(5000));
    CHECK(slot_advance(t, n) == advance_oracle(t, n));
  }
}

TEST_CASE("slot_advance is associative with integer addition")
{
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    SlotTime t;
    t.mu = static_cast<uint8_t>(rng.next_below(4));
    t.sfn = static_cast<uint16_t>(rng.next_below(1024));
    t.subframe = static_cast<uint8_t>(rng.next_below(10));
    t.slot = static_cast<uint8_t>(rng.next_below(1ull << t.mu));
    const int64_t a = static_cast<int64_t>(rng.next_below(20000));
    const int64_t b = static_cast<int64_t>(rng.next_below(20000));
    CHECK(slot_advance(slot_advance(t, a), b) == slot_advance(t, a + b));
  }
}

TEST_CASE("subframes_between")
{
  SlotTime a{0, 0, 0, 0};
  SlotTime b{0, 7, 0, 0};
  CHECK(subframes_between(a, b) == 7);

  SlotTime w1{1023, 9, 0, 0};
  SlotTime w2{0, 1, 0, 0};
  CHECK(subframes_between(w1, w2) == 2);

  CHECK(subframes_between(a, a) == 0);

  SlotTime far{512, 1, 0, 0};
  CHECK_THROWS_AS(subframes_between(a, far), time_error);
}

TEST_CASE("subframes_between inverts slot_advance on subframe multiples")
{
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    SlotTime t;
    t.mu = static_cast<uint8_t>(rng.next_below(4));
    t.sfn = static_cast<uint16_t>(rng.next_below(1024));
    t.subframe = static_cast<uint8_t>(rng.next_below(10));
    t.slot = static_cast<uint8_t>(rng.next_below(1ull << t.mu));
    const int64_t k = static_cast<int64_t>(rng.next_below(5000));
    CHECK(subframes_between(t, slot_advance(t, k * (1 << t.mu))) == k);
  }
}

TEST_CASE("slot ordering is wrap aware")
{
  SlotTime a{1023, 9, 0, 0};
  SlotTime b{0, 0, 0, 0};
  CHECK(slot_less(a, b));
  CHECK(!slot_less(b, a));
  CHECK(!slot_less(a, a));
}

TEST_CASE("power helpers")
{
  CHECK(clamp_ue_tx_power({40.0}).dbm == doctest::Approx(23.0));
  CHECK(clamp_ue_tx_power({-80.0}).dbm == doctest::Approx(-60.0));
  CHECK(clamp_ue_tx_power({10.0}).dbm == doctest::Approx(10.0));
  CHECK(dbm_to_mw(0.0) == doctest::Approx(1.0));
  CHECK(mw_to_dbm(100.0) == doctest::Approx(20.0));
}
