#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>

#include "wearfuse/pipeline.hpp"

namespace wearfuse::detail {

struct WindowKey {
  std::string subject;
  std::size_t k = 0;
  auto operator<=>(const WindowKey&) const = default;
};

struct WindowEntry {
  AffectClass label = AffectClass::Baseline;
  bool consistent = true;  // every sensor agrees on the label
  std::map<Modality, const FeatureRow*> rows;

  bool covers(std::span<const Modality> sensors) const {
    if (!consistent) return false;
    for (auto m : sensors) {
      if (!rows.count(m)) return false;
    }
    return true;
  }
};

using WindowIndex = std::map<WindowKey, WindowEntry>;

inline WindowIndex index_rows(std::span<const FeatureRow> rows) {
  WindowIndex index;
  for (const auto& r : rows) {
    auto [it, fresh] = index.try_emplace(WindowKey{r.subject, r.k});
    if (fresh) {
      it->second.label = r.label;
    } else if (it->second.label != r.label) {
      it->second.consistent = false;
    }
    it->second.rows[r.modality] = &r;
  }
  return index;
}

inline std::vector<double> concat(const WindowEntry& e, std::span<const Modality> members) {
  std::vector<double> out;
  for (auto m : members) {
    const auto& v = e.rows.at(m)->values;
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace wearfuse::detail
