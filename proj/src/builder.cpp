#include "edag/builder.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <unordered_map>

namespace edag {

CapExceeded::CapExceeded(std::size_t cap)
    : Error("materialized graph exceeds vertex cap of " + std::to_string(cap)) {}

std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Raw: return "raw";
    case EdgeKind::Waw: return "waw";
    case EdgeKind::War: return "war";
  }
  return "raw";
}

void CostModel::validate() const {
  if (miss_cost < 1) throw InvalidOptions("miss cost must be at least 1 cycle");
}

namespace {

// Last-writer information carried by one value.
struct ValueState {
  std::uint64_t finish = 0;
  std::uint32_t mlayer = 0;
};

// Byte-granular last-writer map. Each aligned 8-byte block keeps one shared
// state while all its written bytes come from the same writer and splits
// into per-byte states otherwise.
class MemoryTable {
 public:
  void gather(std::uint64_t addr, std::uint32_t size, ValueState& acc) const {
    for_blocks(addr, size, [&](std::uint64_t key, std::uint8_t mask) {
      auto it = blocks_.find(key);
      if (it == blocks_.end()) return;
      const Block& b = it->second;
      const std::uint8_t hit = mask & b.mask;
      if (hit == 0) return;
      if (!b.bytes) {
        merge(acc, b.head);
        return;
      }
      for (unsigned i = 0; i < 8; ++i) {
        if (hit & (1u << i)) merge(acc, (*b.bytes)[i]);
      }
    });
  }

  void assign(std::uint64_t addr, std::uint32_t size, const ValueState& s) {
    for_blocks(addr, size, [&](std::uint64_t key, std::uint8_t mask) {
      Block& b = blocks_[key];
      if (mask == 0xFF || (!b.bytes && (b.mask & ~mask) == 0)) {
        b.mask |= mask;
        b.head = s;
        b.bytes.reset();
        return;
      }
      if (!b.bytes) {
        b.bytes = std::make_unique<std::array<ValueState, 8>>();
        b.bytes->fill(b.head);
      }
      for (unsigned i = 0; i < 8; ++i) {
        if (mask & (1u << i)) (*b.bytes)[i] = s;
      }
      b.mask |= mask;
    });
  }

 private:
  struct Block {
    std::uint8_t mask = 0;  // bytes that have a writer
    ValueState head;
    std::unique_ptr<std::array<ValueState, 8>> bytes;
  };

  static void merge(ValueState& acc, const ValueState& s) {
    acc.finish = std::max(acc.finish, s.finish);
    acc.mlayer = std::max(acc.mlayer, s.mlayer);
  }

  template <typename Fn>
  static void for_blocks(std::uint64_t addr, std::uint32_t size, Fn&& fn) {
    const std::uint64_t end = addr + size;
    for (std::uint64_t key = addr >> 3; key <= (end - 1) >> 3; ++key) {
      const std::uint64_t lo = std::max(addr, key << 3) - (key << 3);
      const std::uint64_t hi = std::min(end, (key + 1) << 3) - (key << 3);
      const auto mask = static_cast<std::uint8_t>(((1u << hi) - 1) & ~((1u << lo) - 1));
      fn(key, mask);
    }
  }

  std::unordered_map<std::uint64_t, Block> blocks_;
};

// Explicit writer/reader bookkeeping for the materialized graph. Kept apart
// from MemoryTable so that the two routes stay independent.
struct GraphTracker {
  static constexpr std::uint32_t kNone = UINT32_MAX;

  std::array<std::uint32_t, kNumRegs> reg_writer;
  std::unordered_map<std::uint64_t, std::uint32_t> mem_writer;
  std::array<std::vector<std::uint32_t>, kNumRegs> reg_readers;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> mem_readers;

  GraphTracker() { reg_writer.fill(kNone); }
};

void add_movement(std::vector<std::int64_t>& diff, std::uint64_t tau, std::uint64_t start, std::uint64_t finish,
                  std::uint64_t bytes) {
  const std::uint64_t lo = (start + tau - 1) / tau;
  const std::uint64_t hi = finish / tau;
  if (lo > hi) return;
  if (diff.size() < hi + 2) diff.resize(hi + 2, 0);
  diff[lo] += static_cast<std::int64_t>(bytes);
  diff[hi + 1] -= static_cast<std::int64_t>(bytes);
}

MovementBins finalize_movement(const std::vector<std::int64_t>& diff, std::uint64_t tau, std::uint64_t tinf) {
  MovementBins bins;
  bins.tau = tau;
  bins.bytes.assign(tinf / tau + 1, 0);
  std::int64_t running = 0;
  for (std::size_t i = 0; i < bins.bytes.size(); ++i) {
    if (i < diff.size()) running += diff[i];
    bins.bytes[i] = static_cast<std::uint64_t>(running);
  }
  return bins;
}

void validate_options(const BuildOptions& options) {
  if (options.keeps_false_deps() && !options.materialize) {
    throw InvalidOptions("keeping false dependencies requires a materialized graph");
  }
  if (options.tau && *options.tau == 0) throw InvalidOptions("tau must be positive");
}

}  // namespace

struct EdagBuilder::Impl {
  Cache cache;
  CostModel cost;
  BuildOptions options;

  std::array<ValueState, kNumRegs> regs{};
  MemoryTable memory;
  EdagSummary summary;
  std::vector<std::int64_t> movement_diff;

  std::optional<MaterializedEdag> graph;
  std::optional<GraphTracker> tracker;
  std::vector<std::pair<std::uint32_t, EdgeKind>> pending;  // incoming edges of the current vertex

  Impl(const CacheConfig& c, const CostModel& cm, const BuildOptions& o) : cache(c), cost(cm), options(o) {
    cost.validate();
    validate_options(options);
    if (options.materialize) {
      graph.emplace();
      tracker.emplace();
    }
  }

  void add(const TraceRecord& rec) {
    const InstructionEffect e = decode_effect(rec, options.decode_mode);
    if (e.unknown) ++summary.unknown_mnemonics;
    if (e.atomic) ++summary.atomic_records;

    bool is_mem = false;
    std::uint64_t bytes = 0;
    if (e.mem) {
      const AccessResult r = cache.access(e.mem->address, e.mem->size, e.mem->is_write);
      is_mem = r.outcome == CacheOutcome::Miss;
      if (is_mem) bytes = cache.config().enabled ? r.lines_missed * cache.config().line_size : e.mem->size;
    }
    const std::uint64_t t = is_mem ? cost.miss_cost : cost.unit_cost;

    ValueState in;
    for (Reg r : e.reads.items()) {
      in.finish = std::max(in.finish, regs[r.id].finish);
      in.mlayer = std::max(in.mlayer, regs[r.id].mlayer);
    }
    if (e.mem && e.reads_memory) memory.gather(e.mem->address, e.mem->size, in);

    const std::uint64_t start = in.finish;
    const std::uint64_t finish = start + t;
    std::uint32_t layer = 0;
    ValueState out{finish, in.mlayer};
    if (is_mem) {
      layer = in.mlayer + 1;
      out.mlayer = layer;
      if (summary.layer_counts.size() < layer) summary.layer_counts.resize(layer, 0);
      ++summary.layer_counts[layer - 1];
      ++summary.W;
      summary.bytes_total += bytes;
    } else {
      summary.C += t;
    }

    if (graph) record_vertex(rec, e, is_mem, t, bytes);

    for (Reg r : e.writes.items()) regs[r.id] = out;
    if (e.mem && e.writes_memory) memory.assign(e.mem->address, e.mem->size, out);

    summary.T1 += t;
    summary.Tinf = std::max(summary.Tinf, finish);
    ++summary.vertex_count;
    if (options.tau && bytes > 0) add_movement(movement_diff, *options.tau, start, finish, bytes);
  }

  void link(std::uint32_t from, EdgeKind kind) { pending.emplace_back(from, kind); }

  void record_vertex(const TraceRecord& rec, const InstructionEffect& e, bool is_mem, std::uint64_t t,
                     std::uint64_t bytes) {
    auto& g = *graph;
    auto& tr = *tracker;
    if (g.vertices.size() >= options.vertex_cap) throw CapExceeded(options.vertex_cap);
    const auto id = static_cast<std::uint32_t>(g.vertices.size());

    TraceRecord bare = rec;
    bare.data_addr.reset();
    g.vertices.push_back(Vertex{id, render_trace_line(bare), e.kind, is_mem, t, bytes, 0, 0, 0});

    pending.clear();
    const bool mem_read = e.mem && e.reads_memory;
    const bool mem_write = e.mem && e.writes_memory;
    const std::uint64_t lo = e.mem ? e.mem->address : 0;
    const std::uint64_t hi = e.mem ? e.mem->address + e.mem->size : 0;

    // RAW
    for (Reg r : e.reads.items()) {
      if (tr.reg_writer[r.id] != GraphTracker::kNone) link(tr.reg_writer[r.id], EdgeKind::Raw);
    }
    if (mem_read) {
      for (std::uint64_t a = lo; a < hi; ++a) {
        if (auto it = tr.mem_writer.find(a); it != tr.mem_writer.end()) link(it->second, EdgeKind::Raw);
      }
    }
    // WAW / WAR
    if (options.keep_waw) {
      for (Reg r : e.writes.items()) {
        if (tr.reg_writer[r.id] != GraphTracker::kNone) link(tr.reg_writer[r.id], EdgeKind::Waw);
      }
      if (mem_write) {
        for (std::uint64_t a = lo; a < hi; ++a) {
          if (auto it = tr.mem_writer.find(a); it != tr.mem_writer.end()) link(it->second, EdgeKind::Waw);
        }
      }
    }
    if (options.keep_war) {
      for (Reg r : e.writes.items()) {
        for (auto u : tr.reg_readers[r.id]) link(u, EdgeKind::War);
      }
      if (mem_write) {
        for (std::uint64_t a = lo; a < hi; ++a) {
          if (auto it = tr.mem_readers.find(a); it != tr.mem_readers.end()) {
            for (auto u : it->second) link(u, EdgeKind::War);
          }
        }
      }
    }

    // One edge per predecessor; a true dependency wins over a false one.
    std::sort(pending.begin(), pending.end());
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (pending[i].first == id) continue;
      if (i > 0 && pending[i].first == pending[i - 1].first) continue;
      g.edges.push_back(Edge{pending[i].first, id, pending[i].second});
    }

    if (options.keep_war) {
      for (Reg r : e.reads.items()) tr.reg_readers[r.id].push_back(id);
      if (mem_read) {
        for (std::uint64_t a = lo; a < hi; ++a) tr.mem_readers[a].push_back(id);
      }
      // Readers of the overwritten value (this vertex included) can no
      // longer conflict with later writers.
      for (Reg r : e.writes.items()) tr.reg_readers[r.id].clear();
      if (mem_write) {
        for (std::uint64_t a = lo; a < hi; ++a) tr.mem_readers[a].clear();
      }
    }
    for (Reg r : e.writes.items()) tr.reg_writer[r.id] = id;
    if (mem_write) {
      for (std::uint64_t a = lo; a < hi; ++a) tr.mem_writer[a] = id;
    }
  }

  BuildResult finish() {
    summary.D = summary.layer_counts.size();
    summary.cache = cache.counters();
    if (options.tau) summary.movement = finalize_movement(movement_diff, *options.tau, summary.Tinf);

    BuildResult result;
    if (graph) {
      schedule_vertices(*graph);
      if (options.keeps_false_deps()) {
        EdagSummary enlarged = summarize(*graph, options.tau);
        enlarged.cache = summary.cache;
        enlarged.unknown_mnemonics = summary.unknown_mnemonics;
        enlarged.atomic_records = summary.atomic_records;
        summary = std::move(enlarged);
      }
      result.graph = std::move(graph);
    }
    result.summary = std::move(summary);
    return result;
  }
};

EdagBuilder::EdagBuilder(const CacheConfig& cache, const CostModel& cost, const BuildOptions& options)
    : impl_(std::make_unique<Impl>(cache, cost, options)) {}
EdagBuilder::~EdagBuilder() = default;
EdagBuilder::EdagBuilder(EdagBuilder&&) noexcept = default;
EdagBuilder& EdagBuilder::operator=(EdagBuilder&&) noexcept = default;

void EdagBuilder::add(const TraceRecord& rec) { impl_->add(rec); }
BuildResult EdagBuilder::finish() { return impl_->finish(); }
std::uint64_t EdagBuilder::vertices_seen() const { return impl_->summary.vertex_count; }

BuildResult build(TraceReader& reader, const CacheConfig& cache, const CostModel& cost,
                  const BuildOptions& options) {
  EdagBuilder b(cache, cost, options);
  TraceRecord rec;
  while (reader.next(rec)) b.add(rec);
  return b.finish();
}

BuildResult build(std::span<const TraceRecord> records, const CacheConfig& cache, const CostModel& cost,
                  const BuildOptions& options) {
  EdagBuilder b(cache, cost, options);
  for (const auto& r : records) b.add(r);
  return b.finish();
}

BuildResult build_from_text(std::string_view text, const CacheConfig& cache, const CostModel& cost,
                            const BuildOptions& options) {
  std::istringstream in{std::string(text)};
  TraceReader reader(in);
  return build(reader, cache, cost, options);
}

namespace {

struct Times {
  std::vector<std::uint64_t> start, finish;
  std::vector<std::uint32_t> layer, mlayer;
};

Times compute_times(const MaterializedEdag& g) {
  const std::size_t n = g.vertices.size();
  Times t;
  t.start.assign(n, 0);
  t.finish.assign(n, 0);
  t.layer.assign(n, 0);
  t.mlayer.assign(n, 0);
  std::size_t e = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::uint64_t s = 0;
    std::uint32_t ml = 0;
    for (; e < g.edges.size() && g.edges[e].to == v; ++e) {
      const auto u = g.edges[e].from;
      if (u >= v) throw Error("edge list is not in topological order");
      s = std::max(s, t.finish[u]);
      ml = std::max(ml, t.mlayer[u]);
    }
    t.start[v] = s;
    t.finish[v] = s + g.vertices[v].cost;
    if (g.vertices[v].is_memory_access) {
      t.layer[v] = ml + 1;
      t.mlayer[v] = ml + 1;
    } else {
      t.mlayer[v] = ml;
    }
  }
  return t;
}

}  // namespace

void schedule_vertices(MaterializedEdag& graph) {
  const Times t = compute_times(graph);
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    graph.vertices[v].start = t.start[v];
    graph.vertices[v].finish = t.finish[v];
    graph.vertices[v].layer = t.layer[v];
  }
}

EdagSummary summarize(const MaterializedEdag& graph, std::optional<std::uint64_t> tau) {
  const Times t = compute_times(graph);
  EdagSummary s;
  std::vector<std::int64_t> diff;
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    const Vertex& x = graph.vertices[v];
    s.T1 += x.cost;
    s.Tinf = std::max(s.Tinf, t.finish[v]);
    ++s.vertex_count;
    if (x.is_memory_access) {
      ++s.W;
      s.bytes_total += x.bytes;
      if (s.layer_counts.size() < t.layer[v]) s.layer_counts.resize(t.layer[v], 0);
      ++s.layer_counts[t.layer[v] - 1];
    } else {
      s.C += x.cost;
    }
    if (tau && x.bytes > 0) add_movement(diff, *tau, t.start[v], t.finish[v], x.bytes);
  }
  s.D = s.layer_counts.size();
  if (tau) s.movement = finalize_movement(diff, *tau, s.Tinf);
  return s;
}

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

void export_dot(const MaterializedEdag& graph, std::ostream& out, std::size_t cap) {
  if (graph.vertices.size() > cap) throw CapExceeded(cap);
  out << "digraph edag {\n";
  out << "  node [shape=box, style=filled, fillcolor=white];\n";
  for (const auto& v : graph.vertices) {
    out << "  v" << v.id << " [label=\"" << v.id << ": " << dot_escape(v.text) << '"';
    if (v.is_memory_access) out << ", fillcolor=red";
    out << "];\n";
  }
  for (const auto& e : graph.edges) {
    out << "  v" << e.from << " -> v" << e.to;
    if (e.kind != EdgeKind::Raw) out << " [style=dashed, label=\"" << to_string(e.kind) << "\"]";
    out << ";\n";
  }
  out << "}\n";
}

}  // namespace edag
