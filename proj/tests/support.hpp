#pragma once

// Reference implementations used as test oracles. They favour obviousness
// over speed and share no code with the library beyond the decoder.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "edag/builder.hpp"
#include "edag/cache.hpp"
#include "edag/isa.hpp"
#include "edag/trace.hpp"

namespace edag::testing {

// Recency-list LRU: one std::list of line numbers per set, front = MRU.
class LruReference {
 public:
  LruReference(std::uint64_t total, std::uint64_t line, std::uint64_t ways)
      : line_(line), ways_(ways), sets_(total / (line * ways)), lists_(sets_) {}

  // true on hit
  bool access(std::uint64_t addr, std::uint32_t size, bool is_write) {
    bool all_hit = true;
    for (std::uint64_t l = addr / line_; l <= (addr + size - 1) / line_; ++l) {
      auto& lst = lists_[l % sets_];
      auto it = std::find(lst.begin(), lst.end(), l);
      if (it != lst.end()) {
        lst.erase(it);
        lst.push_front(l);
        continue;
      }
      all_hit = false;
      ++missed_lines_;
      if (!is_write) {
        lst.push_front(l);
        if (lst.size() > ways_) lst.pop_back();
      }
    }
    return all_hit;
  }

  std::uint64_t missed_lines() const { return missed_lines_; }
  std::uint64_t line_size() const { return line_; }

 private:
  std::uint64_t line_, ways_, sets_;
  std::vector<std::list<std::uint64_t>> lists_;
  std::uint64_t missed_lines_ = 0;
};

struct RefVertex {
  std::set<std::uint32_t> preds;
  bool mem = false;
  std::uint64_t cost = 0, bytes = 0, start = 0, finish = 0, layer = 0;
};

struct RefResult {
  std::vector<RefVertex> v;
  std::uint64_t T1 = 0, Tinf = 0, W = 0, D = 0, C = 0, bytes = 0;
  std::vector<std::uint64_t> layers;
};

// Naive eDAG construction straight from the definitions: explicit
// predecessor sets, keyed by (register | byte address).
inline RefResult reference_edag(const std::string& text, std::uint64_t alpha, std::uint64_t unit,
                                const CacheConfig* cache = nullptr, bool waw = false, bool war = false) {
  RefResult r;
  std::map<std::string, std::uint32_t> writer;
  std::map<std::string, std::set<std::uint32_t>> readers;
  std::unique_ptr<LruReference> lru;
  if (cache && cache->enabled) lru = std::make_unique<LruReference>(cache->total_size, cache->line_size, cache->associativity);

  auto key_name = [](const ValueKey& k) {
    if (auto* reg = std::get_if<Reg>(&k)) return "r" + std::to_string(reg->id);
    return "m" + std::to_string(std::get<MemByte>(k).address);
  };

  std::istringstream in(text);
  std::string line;
  std::uint64_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto rec = parse_trace_line(line, no);
    const auto eff = decode_effect(rec);
    const auto id = static_cast<std::uint32_t>(r.v.size());
    RefVertex v;
    for (const auto& k : eff.read_keys()) {
      auto it = writer.find(key_name(k));
      if (it != writer.end()) v.preds.insert(it->second);
    }
    for (const auto& k : eff.write_keys()) {
      const auto name = key_name(k);
      if (waw && writer.count(name)) v.preds.insert(writer[name]);
      if (war) v.preds.insert(readers[name].begin(), readers[name].end());
    }
    v.preds.erase(id);
    if (eff.mem) {
      if (lru) {
        const auto before = lru->missed_lines();
        v.mem = !lru->access(eff.mem->address, eff.mem->size, eff.mem->is_write);
        v.bytes = (lru->missed_lines() - before) * lru->line_size();
      } else {
        v.mem = true;
        v.bytes = eff.mem->size;
      }
    }
    v.cost = v.mem ? alpha : unit;
    std::uint64_t ml = 0;
    for (auto p : v.preds) {
      v.start = std::max(v.start, r.v[p].finish);
      ml = std::max(ml, r.v[p].layer);
    }
    v.finish = v.start + v.cost;
    v.layer = v.mem ? ml + 1 : ml;
    for (const auto& k : eff.read_keys()) readers[key_name(k)].insert(id);
    for (const auto& k : eff.write_keys()) {
      writer[key_name(k)] = id;
      readers[key_name(k)].clear();
    }
    r.v.push_back(v);
  }
  for (const auto& v : r.v) {
    r.T1 += v.cost;
    r.Tinf = std::max(r.Tinf, v.finish);
    if (v.mem) {
      ++r.W;
      r.bytes += v.bytes;
      r.D = std::max(r.D, v.layer);
      if (r.layers.size() < v.layer) r.layers.resize(v.layer);
      ++r.layers[v.layer - 1];
    } else {
      r.C += v.cost;
    }
  }
  return r;
}

// Optimal makespan of a small graph with unit-time memory vertices and
// zero-time others, by exhaustive search over every subset of ready memory
// vertices (at most m) started at each time step.
inline std::uint64_t exhaustive_makespan(const MaterializedEdag& g, std::uint64_t m) {
  const auto n = g.vertices.size();
  std::vector<std::vector<std::uint32_t>> preds(n);
  for (const auto& e : g.edges) preds[e.to].push_back(e.from);

  // Free vertices complete instantly once their predecessors have.
  auto close = [&](std::uint64_t done) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (done >> i & 1 || g.vertices[i].is_memory_access) continue;
        bool ok = true;
        for (auto p : preds[i]) ok = ok && (done >> p & 1);
        if (ok) {
          done |= 1ull << i;
          changed = true;
        }
      }
    }
    return done;
  };
  const std::uint64_t all = n == 64 ? ~0ull : (1ull << n) - 1;
  std::map<std::uint64_t, std::uint64_t> memo;
  std::function<std::uint64_t(std::uint64_t)> solve = [&](std::uint64_t done) -> std::uint64_t {
    done = close(done);
    if (done == all) return 0;
    if (auto it = memo.find(done); it != memo.end()) return it->second;
    std::vector<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (done >> i & 1) continue;
      bool ok = true;
      for (auto p : preds[i]) ok = ok && (done >> p & 1);
      if (ok) ready.push_back(i);
    }
    std::uint64_t best = ~0ull;
    const auto k = ready.size();
    for (std::uint64_t mask = 1; mask < (1ull << k); ++mask) {
      if (static_cast<std::uint64_t>(__builtin_popcountll(mask)) > m) continue;
      std::uint64_t next = done;
      for (std::size_t j = 0; j < k; ++j) {
        if (mask >> j & 1) next |= 1ull << ready[j];
      }
      best = std::min(best, 1 + solve(next));
    }
    memo[done] = best;
    return best;
  };
  return solve(0);
}

inline std::filesystem::path temp_dir() {
  static const auto dir = [] {
    std::random_device rd;
    auto d = std::filesystem::temp_directory_path() / ("edag-test-" + std::to_string(rd()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

inline std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = temp_dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Matrix-multiply fragment: two products accumulated into c[0].
inline const char* kMatmulFragment =
    "lw a4,0(a5);0x1000\n"
    "lw a3,0(a1);0x2000\n"
    "lw a7,0(a6);0x3000\n"
    "mulw a4,a4,a3\n"
    "lw a2,4(a5);0x1004\n"
    "lw a3,64(a1);0x2040\n"
    "mulw a2,a2,a3\n"
    "addw a4,a4,a2\n"
    "addw a7,a7,a4\n"
    "sw a7,0(a6);0x3000\n";

}  // namespace edag::testing
