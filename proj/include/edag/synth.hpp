#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edag/error.hpp"

namespace edag {

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

enum class SynthPattern : std::uint8_t { Chain, Fanout, Sum, PtrChase, RandomDag };

std::string_view to_string(SynthPattern p);
std::optional<SynthPattern> parse_pattern(std::string_view name);

struct SynthSpec {
  SynthPattern pattern = SynthPattern::Sum;
  std::uint64_t n = 4;
  std::uint64_t seed = 1;
  std::uint64_t base_addr = 0x40080000;
  std::uint64_t stride = 64;  // line-disjoint by default

  void validate() const;
};

// Expected analysis of a generated trace with the cache disabled.
struct GroundTruth {
  std::uint64_t W = 0;
  std::uint64_t D = 0;
  std::uint64_t vertices = 0;
  // True dependencies as (from, to) vertex ids; filled for random-dag only.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

struct SynthTrace {
  std::string text;
  GroundTruth truth;
};

/// Deterministic in (pattern, n, seed, base_addr, stride).
///  - sum: add/mv prologue, then lw / addi / addw / bne per element.
///  - ptr-chase: each ld uses the previous ld's destination as its base.
///  - fanout: n independent loads at distinct addresses.
///  - chain: load, increment, store to the next slot; the next load reads it.
///  - random-dag: random loads/stores/arithmetic over a small register pool
///    and a 64-byte window with mixed access widths.
SynthTrace generate(const SynthSpec& spec);

}  // namespace edag
