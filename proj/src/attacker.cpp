#include "llc/attacker.h"

namespace llc {

bool action_due(const AttackAction& a, int64_t slot)
{
  if (a.repeat_period_slots <= 0) {
    return slot == a.at_slot;
  }
  if (slot < a.at_slot) {
    return false;
  }
  if (a.until_slot >= 0 && slot > a.until_slot) {
    return false;
  }
  return (slot - a.at_slot) % a.repeat_period_slots == 0;
}

}  // namespace llc
