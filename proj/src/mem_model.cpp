#include "mem_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "rng.hpp"

namespace pasim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::DoubleClaim: return "double-claim";
    case ErrorCode::NotClaimed: return "not-claimed";
    case ErrorCode::OutOfMemory: return "out-of-memory";
    case ErrorCode::AlreadyMapped: return "already-mapped";
    case ErrorCode::PageFault: return "page-fault";
    case ErrorCode::Trace: return "trace";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

PhysMem::PhysMem(std::uint64_t total_frames) : total_(total_frames) {
  if (total_frames == 0) {
    throw Error(ErrorCode::InvalidConfig, "physical memory needs at least one frame");
  }
  words_.assign((total_ + 63) / 64, 0);
}

void PhysMem::reset() {
  std::fill(words_.begin(), words_.end(), 0);
  occupied_ = 0;
  first_free_word_ = 0;
}

void PhysMem::check_range(Ppn ppn) const {
  if (ppn.index >= total_) {
    throw Error(ErrorCode::OutOfRange,
                "frame " + std::to_string(ppn.index) + " outside pool of " + std::to_string(total_));
  }
}

void PhysMem::inject_pressure(double fraction, std::uint64_t rng_seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "pressure fraction must lie in [0,1]");
  }
  reset();
  const auto target = static_cast<std::uint64_t>(std::llround(fraction * static_cast<double>(total_)));
  if (target == 0) return;

  std::vector<std::uint64_t> frames(total_);
  std::iota(frames.begin(), frames.end(), 0);
  Rng rng(rng_seed);
  // Partial Fisher-Yates: the first `target` slots form a uniform sample.
  for (std::uint64_t i = 0; i < target; ++i) {
    const std::uint64_t j = i + uniform_below(rng, total_ - i);
    std::swap(frames[i], frames[j]);
    set(frames[i]);
  }
  occupied_ = target;
}

void PhysMem::inject_clustered_pressure(double fraction, std::uint64_t run_length, std::uint64_t rng_seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "pressure fraction must lie in [0,1]");
  }
  if (run_length == 0) throw Error(ErrorCode::InvalidConfig, "cluster run length must be >= 1");
  reset();
  const auto target = static_cast<std::uint64_t>(std::llround(fraction * static_cast<double>(total_)));
  Rng rng(rng_seed);
  while (occupied_ < target) {
    std::uint64_t start = uniform_below(rng, total_);
    for (std::uint64_t k = 0; k < run_length && occupied_ < target; ++k) {
      const std::uint64_t f = (start + k) % total_;
      if (!test(f)) {
        set(f);
        ++occupied_;
      }
    }
  }
}

bool PhysMem::is_free(Ppn ppn) const {
  check_range(ppn);
  return !test(ppn.index);
}

void PhysMem::claim(Ppn ppn) {
  check_range(ppn);
  if (test(ppn.index)) {
    throw Error(ErrorCode::DoubleClaim, "frame " + std::to_string(ppn.index) + " already occupied");
  }
  set(ppn.index);
  ++occupied_;
}

void PhysMem::release(Ppn ppn) {
  check_range(ppn);
  if (!test(ppn.index)) {
    throw Error(ErrorCode::NotClaimed, "frame " + std::to_string(ppn.index) + " is not occupied");
  }
  clear(ppn.index);
  --occupied_;
  first_free_word_ = std::min(first_free_word_, ppn.index >> 6);
}

Ppn PhysMem::fallback_alloc() {
  if (occupied_ == total_) throw Error(ErrorCode::OutOfMemory, "no free physical frame");
  for (std::uint64_t w = first_free_word_; w < words_.size(); ++w) {
    const std::uint64_t free_bits = ~words_[w];
    if (free_bits == 0) continue;
    const std::uint64_t i = (w << 6) + static_cast<std::uint64_t>(std::countr_zero(free_bits));
    if (i >= total_) break;
    first_free_word_ = w;
    set(i);
    ++occupied_;
    return Ppn{i};
  }
  throw Error(ErrorCode::OutOfMemory, "no free physical frame");
}

std::vector<Ppn> PhysMem::free_frames() const {
  std::vector<Ppn> out;
  out.reserve(free_count());
  for (std::uint64_t i = 0; i < total_; ++i) {
    if (!test(i)) out.push_back(Ppn{i});
  }
  return out;
}

}  // namespace pasim
