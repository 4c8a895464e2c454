#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "edag/error.hpp"
#include "edag/registers.hpp"

namespace edag {

enum class OperandKind : std::uint8_t { Register, Immediate, MemRef };

// One operand token. Registers carry a canonical id; mem-refs carry
// displacement + base; immediates carry a signed value.
struct Operand {
  OperandKind kind = OperandKind::Immediate;
  Reg reg{};                 // Register / MemRef base
  std::int64_t value = 0;    // Immediate value / MemRef displacement

  static Operand reg_op(Reg r) { return {OperandKind::Register, r, 0}; }
  static Operand imm(std::int64_t v) { return {OperandKind::Immediate, Reg{}, v}; }
  static Operand mem(std::int64_t disp, Reg base) { return {OperandKind::MemRef, base, disp}; }

  friend bool operator==(const Operand&, const Operand&) = default;
};

inline constexpr std::size_t kMaxOperands = 6;

struct TraceRecord {
  std::uint64_t line_no = 0;
  std::string mnemonic;
  std::array<Operand, kMaxOperands> operand_storage{};
  std::uint8_t operand_count = 0;
  std::optional<std::uint64_t> data_addr;

  std::span<const Operand> operands() const { return {operand_storage.data(), operand_count}; }
  void push_operand(const Operand& op);

  friend bool operator==(const TraceRecord& a, const TraceRecord& b);
};

class MalformedLine : public Error {
 public:
  MalformedLine(std::uint64_t line_no, const std::string& why);
  std::uint64_t line_no() const { return line_no_; }

 private:
  std::uint64_t line_no_;
};

class TraceReadError : public Error {
 public:
  using Error::Error;
};

/// Parses one trace line of the form `insn[;0xADDR]`. `line` must not
/// contain the trailing newline (a trailing '\r' is tolerated).
TraceRecord parse_trace_line(std::string_view line, std::uint64_t line_no);

/// Same as parse_trace_line but reuses `out`'s storage.
void parse_trace_line_into(std::string_view line, std::uint64_t line_no, TraceRecord& out);

/// Canonical text: `mnemonic op,op,...[;0xaddr]` with lowercase hex.
std::string render_trace_line(const TraceRecord& rec);

/// Streaming trace reader. Files ending in `.gz` are decompressed on the fly.
/// Blank lines are skipped; records keep their physical line numbers.
class TraceReader {
 public:
  explicit TraceReader(const std::filesystem::path& path);
  explicit TraceReader(std::istream& in);
  ~TraceReader();
  TraceReader(TraceReader&&) noexcept;
  TraceReader& operator=(TraceReader&&) noexcept;

  /// Returns false at end of stream.
  bool next(TraceRecord& out);

  std::uint64_t lines_read() const { return line_no_; }

  class LineSource;

 private:
  std::unique_ptr<LineSource> source_;
  std::string line_;
  std::uint64_t line_no_ = 0;
};

}  // namespace edag
