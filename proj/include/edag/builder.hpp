#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edag/cache.hpp"
#include "edag/error.hpp"
#include "edag/isa.hpp"
#include "edag/trace.hpp"

namespace edag {

class CapExceeded : public Error {
 public:
  explicit CapExceeded(std::size_t cap);
};

class InvalidOptions : public Error {
 public:
  using Error::Error;
};

// Two-tier instruction cost: every RAM access (cache miss) costs miss_cost
// cycles, every other vertex unit_cost.
struct CostModel {
  std::uint64_t miss_cost = 200;
  std::uint64_t unit_cost = 1;

  void validate() const;
  friend bool operator==(const CostModel&, const CostModel&) = default;
};

inline constexpr std::size_t kDefaultVertexCap = 200'000;

struct BuildOptions {
  bool materialize = false;
  // Retain output (WAW) / anti (WAR) dependencies as tagged edges. Both
  // require materialize; the returned summary then reflects the enlarged
  // edge set.
  bool keep_waw = false;
  bool keep_war = false;
  std::optional<std::uint64_t> tau;  // movement sampling interval, cycles
  std::size_t vertex_cap = kDefaultVertexCap;
  DecodeMode decode_mode = DecodeMode::Strict;

  bool keeps_false_deps() const { return keep_waw || keep_war; }
};

// Bytes in flight sampled at t = tau * i for i = 0 .. floor(Tinf / tau).
struct MovementBins {
  std::uint64_t tau = 1;
  std::vector<std::uint64_t> bytes;

  friend bool operator==(const MovementBins&, const MovementBins&) = default;
};

struct EdagSummary {
  std::uint64_t T1 = 0;
  std::uint64_t Tinf = 0;
  std::uint64_t vertex_count = 0;
  std::uint64_t C = 0;  // summed cost of non-memory-access vertices
  std::uint64_t W = 0;  // memory-access vertices
  std::uint64_t D = 0;  // memory layers
  std::vector<std::uint64_t> layer_counts;  // [i] = vertices in layer i+1
  std::uint64_t bytes_total = 0;
  std::optional<MovementBins> movement;
  CacheCounters cache;
  std::uint64_t unknown_mnemonics = 0;
  std::uint64_t atomic_records = 0;

  friend bool operator==(const EdagSummary&, const EdagSummary&) = default;
};

enum class EdgeKind : std::uint8_t { Raw, Waw, War };

std::string_view to_string(EdgeKind k);

struct Edge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  EdgeKind kind = EdgeKind::Raw;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Vertex {
  std::uint32_t id = 0;
  std::string text;  // disassembly without the address column
  InsnKind kind = InsnKind::Other;
  bool is_memory_access = false;
  std::uint64_t cost = 0;
  std::uint64_t bytes = 0;  // w(v)
  std::uint64_t start = 0;
  std::uint64_t finish = 0;
  std::uint32_t layer = 0;  // 1-based memory layer, 0 for non-memory vertices
};

// Explicit graph. Vertex ids follow trace order; edges are sorted by
// (to, from) and always point from a lower to a higher id.
struct MaterializedEdag {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
};

struct BuildResult {
  EdagSummary summary;
  std::optional<MaterializedEdag> graph;
};

/// Single-pass eDAG construction over a record stream. Feed records in
/// executed order with add(), then call finish().
class EdagBuilder {
 public:
  EdagBuilder(const CacheConfig& cache, const CostModel& cost, const BuildOptions& options);
  ~EdagBuilder();
  EdagBuilder(EdagBuilder&&) noexcept;
  EdagBuilder& operator=(EdagBuilder&&) noexcept;

  void add(const TraceRecord& rec);
  BuildResult finish();

  std::uint64_t vertices_seen() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

BuildResult build(TraceReader& reader, const CacheConfig& cache, const CostModel& cost,
                  const BuildOptions& options);
BuildResult build(std::span<const TraceRecord> records, const CacheConfig& cache, const CostModel& cost,
                  const BuildOptions& options);
/// Parses `text` as a whole trace first.
BuildResult build_from_text(std::string_view text, const CacheConfig& cache, const CostModel& cost,
                            const BuildOptions& options);

/// Recomputes start/finish/layer over every edge of `graph` and derives the
/// summary from them. Cache and decode counters are left zero.
EdagSummary summarize(const MaterializedEdag& graph, std::optional<std::uint64_t> tau);

/// Writes start/finish/layer of every vertex from the current edge set.
void schedule_vertices(MaterializedEdag& graph);

/// Graphviz output: memory-access vertices red, false dependencies dashed.
void export_dot(const MaterializedEdag& graph, std::ostream& out, std::size_t cap = kDefaultVertexCap);

}  // namespace edag
