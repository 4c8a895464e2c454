#include "edag/registers.hpp"

#include <array>
#include <charconv>
#include <string_view>
#include <unordered_map>

namespace edag {
namespace {

constexpr std::array<std::string_view, kNumRegs> kNames = {
    "zero", "ra",  "sp",  "gp",  "tp",   "t0",   "t1",  "t2",  "s0",  "s1",  "a0",
    "a1",   "a2",  "a3",  "a4",  "a5",   "a6",   "a7",  "s2",  "s3",  "s4",  "s5",
    "s6",   "s7",  "s8",  "s9",  "s10",  "s11",  "t3",  "t4",  "t5",  "t6",
    "ft0",  "ft1", "ft2", "ft3", "ft4",  "ft5",  "ft6", "ft7", "fs0", "fs1", "fa0",
    "fa1",  "fa2", "fa3", "fa4", "fa5",  "fa6",  "fa7", "fs2", "fs3", "fs4", "fs5",
    "fs6",  "fs7", "fs8", "fs9", "fs10", "fs11", "ft8", "ft9", "ft10", "ft11",
};

std::optional<unsigned> numbered(std::string_view digits) {
  if (digits.empty() || digits.size() > 2) return std::nullopt;
  unsigned n = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || p != digits.data() + digits.size() || n > 31) return std::nullopt;
  return n;
}

}  // namespace

std::string_view reg_name(Reg r) { return r.id < kNumRegs ? kNames[r.id] : "?"; }

std::optional<Reg> parse_reg(std::string_view name) {
  if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'f')) {
    if (auto n = numbered(name.substr(1))) {
      return Reg{static_cast<std::uint8_t>(*n + (name[0] == 'f' ? 32 : 0))};
    }
  }
  static const std::unordered_map<std::string_view, Reg> by_name = [] {
    std::unordered_map<std::string_view, Reg> m;
    for (std::size_t i = 0; i < kNames.size(); ++i) m.emplace(kNames[i], Reg{static_cast<std::uint8_t>(i)});
    m.emplace("fp", Reg{8});
    return m;
  }();
  auto it = by_name.find(name);
  if (it == by_name.end()) return std::nullopt;
  return it->second;
}

}  // namespace edag
