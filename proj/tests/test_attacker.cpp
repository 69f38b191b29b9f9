#include "doctest.h"
#include "llc/attacker.h"

using namespace llc;

TEST_CASE("one-shot actions fire exactly once")
{
  AttackAction a;
  a.at_slot = 100;
  a.op = InjectPaging{};
  CHECK(!action_due(a, 99));
  CHECK(action_due(a, 100));
  CHECK(!action_due(a, 101));
}

TEST_CASE("repeating actions expand to the per-slot schedule")
{
  AttackAction a;
  a.at_slot = 10;
  a.repeat_period_slots = 1;
  a.until_slot = 14;
  a.op = InjectPaging{};
  int fired = 0;
  for (int64_t s = 0; s < 30; ++s) {
    if (action_due(a, s)) {
      ++fired;
      CHECK(s >= 10);
      CHECK(s <= 14);
    }
  }
  CHECK(fired == 5);
}

TEST_CASE("repeat period strides and open-ended repeats")
{
  AttackAction a;
  a.at_slot = 4;
  a.repeat_period_slots = 8;
  a.op = InjectPaging{};
  CHECK(action_due(a, 4));
  CHECK(!action_due(a, 8));
  CHECK(action_due(a, 12));
  CHECK(action_due(a, 4 + 8000));
}
