#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace edag {

// RV64 architectural register. Ids 0..31 are the integer file (0 is the
// hardwired zero register), 32..63 the floating-point file.
struct Reg {
  std::uint8_t id = 0;

  constexpr bool is_zero() const { return id == 0; }
  constexpr bool is_float() const { return id >= 32; }
  friend constexpr bool operator==(Reg, Reg) = default;
  friend constexpr auto operator<=>(Reg, Reg) = default;
};

inline constexpr std::size_t kNumRegs = 64;

/// Canonical ABI name ("a0", "zero", "fa0", ...).
std::string_view reg_name(Reg r);

/// Accepts ABI names, `xN`, `fN` and the `fp` alias; returns nullopt
/// otherwise.
std::optional<Reg> parse_reg(std::string_view name);

}  // namespace edag
