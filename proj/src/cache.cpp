#include "edag/cache.hpp"

#include <algorithm>
#include <bit>
#include <charconv>

namespace edag {

namespace {

std::uint64_t parse_size(std::string_view s, std::string_view spec) {
  std::uint64_t mult = 1;
  if (!s.empty() && (s.back() == 'k' || s.back() == 'K')) {
    mult = 1024;
    s.remove_suffix(1);
  } else if (!s.empty() && (s.back() == 'm' || s.back() == 'M')) {
    mult = 1024 * 1024;
    s.remove_suffix(1);
  }
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw InvalidCacheConfig("bad cache spec '" + std::string(spec) + "', expected SIZE:LINE:ASSOC");
  }
  return v * mult;
}

}  // namespace

CacheConfig CacheConfig::parse(std::string_view spec) {
  auto c1 = spec.find(':');
  auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos || spec.find(':', c2 + 1) != std::string_view::npos) {
    throw InvalidCacheConfig("bad cache spec '" + std::string(spec) + "', expected SIZE:LINE:ASSOC");
  }
  CacheConfig c;
  c.total_size = parse_size(spec.substr(0, c1), spec);
  c.line_size = parse_size(spec.substr(c1 + 1, c2 - c1 - 1), spec);
  c.associativity = parse_size(spec.substr(c2 + 1), spec);
  c.enabled = true;
  c.validate();
  return c;
}

void CacheConfig::validate() const {
  if (!enabled) return;
  if (!std::has_single_bit(line_size)) throw InvalidCacheConfig("line size must be a power of two");
  if (!std::has_single_bit(associativity)) throw InvalidCacheConfig("associativity must be a power of two");
  const auto way_bytes = line_size * associativity;
  if (total_size < way_bytes || total_size % way_bytes != 0) {
    throw InvalidCacheConfig("total size must be a positive multiple of line size * associativity");
  }
}

std::string CacheConfig::to_string() const {
  if (!enabled) return "none";
  return std::to_string(total_size) + ":" + std::to_string(line_size) + ":" + std::to_string(associativity);
}

Cache::Cache(const CacheConfig& config) : config_(config) {
  config_.validate();
  if (config_.enabled) {
    sets_ = config_.num_sets();
    line_shift_ = static_cast<unsigned>(std::countr_zero(config_.line_size));
    ways_.assign(sets_ * config_.associativity, 0);
    fill_.assign(sets_, 0);
  }
}

bool Cache::probe_line(std::uint64_t line, bool is_write) {
  // sets_ is not required to be a power of two.
  const std::uint64_t set = line % sets_;
  const std::uint64_t tag = line / sets_;
  auto* base = ways_.data() + set * config_.associativity;
  auto& fill = fill_[set];
  auto* end = base + fill;
  if (auto* hit = std::find(base, end, tag); hit != end) {
    std::rotate(base, hit, hit + 1);
    return true;
  }
  if (!is_write) {
    if (fill < config_.associativity) ++fill;
    std::copy_backward(base, base + fill - 1, base + fill);
    base[0] = tag;
  }
  return false;
}

AccessResult Cache::access(std::uint64_t addr, std::uint32_t size, bool is_write) {
  AccessResult r;
  if (!config_.enabled) {
    r.outcome = CacheOutcome::Miss;
    (is_write ? counters_.store_misses : counters_.load_misses)++;
    return r;
  }
  const std::uint64_t first = addr >> line_shift_;
  const std::uint64_t last = (addr + std::max<std::uint32_t>(size, 1) - 1) >> line_shift_;
  for (std::uint64_t line = first; line <= last; ++line) {
    ++r.lines_touched;
    if (!probe_line(line, is_write)) ++r.lines_missed;
  }
  r.outcome = r.lines_missed > 0 ? CacheOutcome::Miss : CacheOutcome::Hit;
  if (r.outcome == CacheOutcome::Hit) {
    (is_write ? counters_.store_hits : counters_.load_hits)++;
  } else {
    (is_write ? counters_.store_misses : counters_.load_misses)++;
  }
  return r;
}

std::vector<std::uint64_t> Cache::set_contents(std::uint64_t set) const {
  if (!config_.enabled || set >= sets_) return {};
  auto* base = ways_.data() + set * config_.associativity;
  return {base, base + fill_[set]};
}

}  // namespace edag
