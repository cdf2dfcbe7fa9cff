#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace pasim {

/// Set-associative key/value store with true-LRU replacement per set.
///
/// Used for TLBs (vpn -> ppn), page-walk caches (path -> frame), the nested
/// TLB, and the data caches (line address -> unused). The set index is the
/// low-order bits of the key (key mod sets).
class SetAssocCache {
 public:
  struct Entry {
    std::uint64_t key;
    std::uint64_t value;
  };

  SetAssocCache(std::size_t entries, std::size_t ways, std::uint32_t latency_cycles);

  std::size_t entries() const { return sets_.size() * ways_; }
  std::size_t ways() const { return ways_; }
  std::size_t set_count() const { return sets_.size(); }
  std::uint32_t latency() const { return latency_; }
  std::size_t set_of(std::uint64_t key) const { return key % sets_.size(); }

  /// Hit promotes the entry to MRU. Mappings are never changed by a lookup.
  std::optional<std::uint64_t> lookup(std::uint64_t key);
  /// Like lookup but leaves recency alone.
  std::optional<std::uint64_t> peek(std::uint64_t key) const;
  bool contains(std::uint64_t key) const { return peek(key).has_value(); }

  /// Insert or refresh `key` as MRU; returns the evicted LRU entry if the set was full.
  std::optional<Entry> insert(std::uint64_t key, std::uint64_t value);

  /// Set contents, MRU first.
  const std::vector<Entry>& set_contents(std::size_t set) const { return sets_[set]; }
  void clear();

 private:
  std::size_t ways_;
  std::uint32_t latency_;
  std::vector<std::vector<Entry>> sets_;
};

}  // namespace pasim
