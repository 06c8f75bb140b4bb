#pragma once

#include <cstdint>

#include "mevsim/numeric.hpp"

namespace mevsim {

/// Millisecond offset relative to the owning slot's start boundary.
/// Negative offsets are pre-slot: the block auction starts one slot ahead.
struct SlotTimeMs {
  std::int64_t ms{0};
  auto operator<=>(const SlotTimeMs&) const = default;
};

inline constexpr SlotTimeMs kSlotWindowMin{-12'000};
inline constexpr SlotTimeMs kSlotWindowMax{12'000};
inline constexpr SlotTimeMs kDefaultEligibilityCutoff{2'000};

inline bool in_slot_window(SlotTimeMs t) {
  return kSlotWindowMin <= t && t <= kSlotWindowMax;
}

inline SlotTimeMs operator+(SlotTimeMs a, SlotTimeMs b) { return {a.ms + b.ms}; }
inline SlotTimeMs operator-(SlotTimeMs a, SlotTimeMs b) { return {a.ms - b.ms}; }

/// Whole milliseconds from a rational ms value, truncated toward -inf.
inline SlotTimeMs floor_to_ms(const Rational& ms) {
  return SlotTimeMs{floor_rational(ms).convert_to<std::int64_t>()};
}

}  // namespace mevsim
