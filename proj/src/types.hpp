#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pasim {

using Cycle = std::uint64_t;

constexpr std::uint64_t kPageShift = 12;
constexpr std::uint64_t kPageSize = 1ull << kPageShift;
constexpr std::uint64_t kLineShift = 6;
constexpr std::uint64_t kLineSize = 1ull << kLineShift;
constexpr std::uint64_t kPteSize = 8;
constexpr std::uint64_t kEntriesPerTable = 512;
constexpr unsigned kVpnBits = 36;
constexpr unsigned kVaBits = 48;

/// Physical frame number.
struct Ppn {
  std::uint64_t index = 0;
  friend constexpr auto operator<=>(Ppn, Ppn) = default;
  constexpr std::uint64_t base_address() const { return index << kPageShift; }
};

/// Virtual page number (36 significant bits).
struct Vpn {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(Vpn, Vpn) = default;
  static constexpr Vpn from_address(std::uint64_t va) { return Vpn{va >> kPageShift}; }
};

constexpr std::uint64_t page_offset(std::uint64_t addr) { return addr & (kPageSize - 1); }
constexpr std::uint64_t line_of(std::uint64_t paddr) { return paddr >> kLineShift; }

enum class ErrorCode {
  InvalidConfig,
  OutOfRange,
  DoubleClaim,
  NotClaimed,
  OutOfMemory,
  AlreadyMapped,
  PageFault,
  Trace,
  Io,
};

const char* to_string(ErrorCode code);

/// Every simulator failure surfaces as this exception; the C API maps `code` to a status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pasim
