#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sinrflow/model.hpp"

namespace sinrflow {

// A periodic schedule: slot t activates slots[t]; the period is slots.size().
struct Schedule {
  std::vector<LinkSet> slots;

  std::size_t period() const { return slots.size(); }

  // |{t : e in L_t}|
  std::size_t count(std::size_t e) const {
    std::size_t c = 0;
    for (const LinkSet& s : slots)
      for (std::size_t x : s)
        if (x == e) ++c;
    return c;
  }

  std::vector<std::size_t> counts(std::size_t num_links) const {
    std::vector<std::size_t> c(num_links, 0);
    for (const LinkSet& s : slots)
      for (std::size_t x : s) ++c.at(x);
    return c;
  }

  bool operator==(const Schedule&) const = default;
};

// Periods add; slots are appended in list order.
inline Schedule concatenate_schedules(std::span<const Schedule> parts) {
  Schedule out;
  for (const Schedule& s : parts) out.slots.insert(out.slots.end(), s.slots.begin(), s.slots.end());
  return out;
}

}  // namespace sinrflow
