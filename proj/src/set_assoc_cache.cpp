#include "set_assoc_cache.hpp"

#include <algorithm>

#include "types.hpp"

namespace pasim {

SetAssocCache::SetAssocCache(std::size_t entries, std::size_t ways, std::uint32_t latency_cycles)
    : ways_(ways), latency_(latency_cycles) {
  if (entries == 0 || ways == 0 || entries % ways != 0) {
    throw Error(ErrorCode::InvalidConfig, "cache entries must be a non-zero multiple of ways");
  }
  sets_.resize(entries / ways);
  for (auto& s : sets_) s.reserve(ways_);
}

std::optional<std::uint64_t> SetAssocCache::lookup(std::uint64_t key) {
  auto& set = sets_[set_of(key)];
  auto it = std::find_if(set.begin(), set.end(), [key](const Entry& e) { return e.key == key; });
  if (it == set.end()) return std::nullopt;
  std::rotate(set.begin(), it, it + 1);
  return set.front().value;
}

std::optional<std::uint64_t> SetAssocCache::peek(std::uint64_t key) const {
  const auto& set = sets_[set_of(key)];
  for (const auto& e : set) {
    if (e.key == key) return e.value;
  }
  return std::nullopt;
}

std::optional<SetAssocCache::Entry> SetAssocCache::insert(std::uint64_t key, std::uint64_t value) {
  auto& set = sets_[set_of(key)];
  auto it = std::find_if(set.begin(), set.end(), [key](const Entry& e) { return e.key == key; });
  if (it != set.end()) {
    it->value = value;
    std::rotate(set.begin(), it, it + 1);
    return std::nullopt;
  }
  std::optional<Entry> victim;
  if (set.size() == ways_) {
    victim = set.back();
    set.pop_back();
  }
  set.insert(set.begin(), Entry{key, value});
  return victim;
}

void SetAssocCache::clear() {
  for (auto& s : sets_) s.clear();
}

}  // namespace pasim
