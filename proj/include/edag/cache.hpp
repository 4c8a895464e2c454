#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edag/error.hpp"

namespace edag {

class InvalidCacheConfig : public Error {
 public:
  using Error::Error;
};

// Set-associative, write-through, no-write-allocate, LRU data cache.
struct CacheConfig {
  std::uint64_t total_size = 32768;
  std::uint64_t line_size = 64;
  std::uint64_t associativity = 2;
  bool enabled = true;

  static CacheConfig disabled() { return {0, 0, 0, false}; }

  /// Parses `SIZE:LINE:ASSOC`; SIZE accepts a k/K (KiB) or m/M (MiB) suffix.
  static CacheConfig parse(std::string_view spec);

  std::uint64_t num_sets() const { return enabled ? total_size / (line_size * associativity) : 0; }

  /// Throws InvalidCacheConfig unless line size and associativity are powers
  /// of two and total_size = sets * ways * line with at least one set.
  void validate() const;

  std::string to_string() const;

  friend bool operator==(const CacheConfig&, const CacheConfig&) = default;
};

enum class CacheOutcome : std::uint8_t { Hit, Miss };

struct CacheCounters {
  std::uint64_t load_hits = 0;
  std::uint64_t load_misses = 0;
  std::uint64_t store_hits = 0;
  std::uint64_t store_misses = 0;

  std::uint64_t hits() const { return load_hits + store_hits; }
  std::uint64_t misses() const { return load_misses + store_misses; }
  std::uint64_t accesses() const { return hits() + misses(); }

  friend bool operator==(const CacheCounters&, const CacheCounters&) = default;
};

struct AccessResult {
  CacheOutcome outcome = CacheOutcome::Miss;
  std::uint32_t lines_touched = 0;
  std::uint32_t lines_missed = 0;
};

class Cache {
 public:
  explicit Cache(const CacheConfig& config);

  /// Probes every line overlapped by [addr, addr+size). The access misses if
  /// any touched line misses. Reads allocate on miss; write hits refresh
  /// recency and write misses leave the cache untouched. A disabled cache
  /// reports every access as a miss.
  AccessResult access(std::uint64_t addr, std::uint32_t size, bool is_write);

  const CacheConfig& config() const { return config_; }
  const CacheCounters& counters() const { return counters_; }

  /// Tags resident in a set, most recently used first.
  std::vector<std::uint64_t> set_contents(std::uint64_t set) const;

 private:
  bool probe_line(std::uint64_t line, bool is_write);

  CacheConfig config_;
  std::uint64_t sets_ = 0;
  unsigned line_shift_ = 0;
  std::vector<std::uint64_t> ways_;     // sets_ * associativity, MRU first
  std::vector<std::uint32_t> fill_;     // valid ways per set
  CacheCounters counters_;
};

}  // namespace edag
