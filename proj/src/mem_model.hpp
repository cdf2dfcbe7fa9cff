#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace pasim {

/// Physical frame pool: occupancy bitmap plus a lowest-first free-frame search.
///
/// The free list is the complement of the bitmap; free_frames() materializes it
/// in ascending order. fallback_alloc() stands in for the conventional (buddy)
/// allocator and always hands out the lowest-numbered free frame.
class PhysMem {
 public:
  explicit PhysMem(std::uint64_t total_frames);

  std::uint64_t total_frames() const { return total_; }
  std::uint64_t occupied_count() const { return occupied_; }
  std::uint64_t free_count() const { return total_ - occupied_; }
  /// Occupancy ratio M/P.
  double pressure() const { return static_cast<double>(occupied_) / static_cast<double>(total_); }

  /// Clears the pool, then occupies exactly round(fraction * P) frames chosen
  /// uniformly without replacement. Same (P, fraction, seed) gives the same bitmap.
  void inject_pressure(double fraction, std::uint64_t rng_seed);
  /// Like inject_pressure, but occupies runs of `run_length` consecutive frames.
  void inject_clustered_pressure(double fraction, std::uint64_t run_length, std::uint64_t rng_seed);

  bool is_free(Ppn ppn) const;
  void claim(Ppn ppn);
  void release(Ppn ppn);
  Ppn fallback_alloc();

  std::vector<Ppn> free_frames() const;
  const std::vector<std::uint64_t>& bitmap_words() const { return words_; }

 private:
  void check_range(Ppn ppn) const;
  bool test(std::uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::uint64_t i) { words_[i >> 6] |= 1ull << (i & 63); }
  void clear(std::uint64_t i) { words_[i >> 6] &= ~(1ull << (i & 63)); }
  void reset();

  std::uint64_t total_;
  std::uint64_t occupied_ = 0;
  std::vector<std::uint64_t> words_;
  // Every word below this index is fully occupied.
  std::uint64_t first_free_word_ = 0;
};

}  // namespace pasim
