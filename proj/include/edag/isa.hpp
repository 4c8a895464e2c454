#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "edag/error.hpp"
#include "edag/registers.hpp"
#include "edag/trace.hpp"

namespace edag {

enum class InsnKind : std::uint8_t { Load, Store, Branch, Jump, Arith, Move, Other };

std::string_view to_string(InsnKind k);

struct MemAccess {
  std::uint64_t address = 0;
  std::uint32_t size = 0;  // bytes: 1, 2, 4 or 8
  bool is_write = false;   // direction seen by the cache

  friend bool operator==(const MemAccess&, const MemAccess&) = default;
};

// Fixed-capacity register set; no RV64 instruction touches more than four.
class RegSet {
 public:
  void insert(Reg r);
  bool contains(Reg r) const;
  std::span<const Reg> items() const { return {regs_.data(), count_}; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

 private:
  std::array<Reg, 6> regs_{};
  std::uint8_t count_ = 0;
};

struct MemByte {
  std::uint64_t address;
  friend auto operator<=>(const MemByte&, const MemByte&) = default;
};

using ValueKey = std::variant<Reg, MemByte>;

// What a decoded instruction consumes and produces. The memory range, when
// present, belongs to the read set if `reads_memory` and to the write set if
// `writes_memory`; atomics set both.
struct InstructionEffect {
  InsnKind kind = InsnKind::Other;
  RegSet reads;
  RegSet writes;
  std::optional<MemAccess> mem;
  bool reads_memory = false;
  bool writes_memory = false;
  bool atomic = false;
  bool unknown = false;  // decoded by the permissive fallback

  /// Expanded key sets; memory ranges become one MemByte per byte.
  std::vector<ValueKey> read_keys() const;
  std::vector<ValueKey> write_keys() const;
};

enum class DecodeMode : std::uint8_t { Strict, Permissive };

class UnknownMnemonic : public Error {
 public:
  explicit UnknownMnemonic(const TraceRecord& rec);
  std::uint64_t line_no() const { return line_no_; }

 private:
  std::uint64_t line_no_;
};

class NotAMemoryOp : public Error {
 public:
  explicit NotAMemoryOp(std::string_view mnemonic);
};

/// Decodes a record's read/write sets per RV64IMAFD semantics. In permissive
/// mode an unknown mnemonic is treated as kind Other with its first register
/// operand written and every other register read.
InstructionEffect decode_effect(const TraceRecord& rec, DecodeMode mode = DecodeMode::Strict);

/// Architectural access width of a load, store or atomic mnemonic.
std::uint32_t mem_access_size(std::string_view mnemonic);

/// Writes the supported-mnemonic table, one `mnemonic kind [size]` per line.
void list_isa(std::ostream& os);

/// Every mnemonic the decoder recognizes (atomics without .aq/.rl suffixes).
std::vector<std::string> supported_mnemonics();

}  // namespace edag
