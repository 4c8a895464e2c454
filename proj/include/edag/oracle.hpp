#pragma once

#include <cstdint>
#include <vector>

#include "edag/builder.hpp"

namespace edag {

// Which ready memory vertex takes a free issue slot first.
enum class SchedulePolicy : std::uint8_t {
  LayerThenId,  // lowest memory layer first, then trace order
  Fifo,         // trace order
};

struct ScheduleResult {
  std::uint64_t makespan = 0;
  std::vector<std::uint64_t> issue;
  std::vector<std::uint64_t> finish;
  std::uint64_t peak_memory_issues = 0;
};

/// Event-driven greedy list schedule with `m` memory issue slots. Memory
/// vertices take `alpha` cycles, all others `unit_cost` and start as soon as
/// their predecessors finish (unbounded width).
ScheduleResult simulate_greedy_memory(const MaterializedEdag& graph, std::uint64_t m, std::uint64_t alpha,
                                      std::uint64_t unit_cost, SchedulePolicy policy = SchedulePolicy::LayerThenId,
                                      std::size_t cap = kDefaultVertexCap);

/// Largest number of memory-access vertices on any path, by a backward
/// longest-path pass over the edge list.
std::uint64_t brute_force_memory_depth(const MaterializedEdag& graph, std::size_t cap = kDefaultVertexCap);

}  // namespace edag
