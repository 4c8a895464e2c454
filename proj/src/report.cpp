#include "edag/report.hpp"

namespace edag {

using nlohmann::json;
using nlohmann::ordered_json;

BuildOptions AnalyzeConfig::build_options() const {
  BuildOptions o;
  o.materialize = materialize || oracle;
  o.keep_waw = keep_false_deps;
  o.keep_war = keep_war;
  o.tau = tau;
  o.vertex_cap = vertex_cap;
  o.decode_mode = decode_mode;
  return o;
}

ordered_json rational_json(const Rational& r) {
  ordered_json j;
  j["num"] = r.numerator();
  j["den"] = r.denominator();
  j["decimal"] = to_decimal(r);
  return j;
}

namespace {

template <typename T, typename Fn>
ordered_json optional_json(const std::optional<T>& v, Fn&& fn) {
  return v ? ordered_json(fn(*v)) : ordered_json(nullptr);
}

}  // namespace

ordered_json to_json(const AnalyzeConfig& c) {
  ordered_json j;
  j["trace"] = c.trace;
  ordered_json cache;
  cache["enabled"] = c.cache.enabled;
  if (c.cache.enabled) {
    cache["size"] = c.cache.total_size;
    cache["line"] = c.cache.line_size;
    cache["assoc"] = c.cache.associativity;
    cache["policy"] = "write-through, no-write-allocate, LRU";
  }
  j["cache"] = cache;
  j["alpha"] = c.params.alpha;
  j["unit_cost"] = c.unit_cost;
  j["m"] = c.params.m;
  j["alpha0"] = c.params.alpha0;
  j["clock_hz"] = c.params.clock_hz;
  j["tau"] = optional_json(c.tau, [](auto v) { return v; });
  j["materialize"] = c.materialize;
  j["oracle"] = c.oracle;
  j["keep_false_deps"] = c.keep_false_deps;
  j["keep_war"] = c.keep_war;
  j["vertex_cap"] = c.vertex_cap;
  j["decode"] = c.decode_mode == DecodeMode::Strict ? "strict" : "permissive";
  return j;
}

AnalyzeConfig analyze_config_from_json(const json& j) {
  AnalyzeConfig c;
  c.trace = j.at("trace").get<std::string>();
  const auto& cache = j.at("cache");
  if (cache.at("enabled").get<bool>()) {
    c.cache = CacheConfig{cache.at("size").get<std::uint64_t>(), cache.at("line").get<std::uint64_t>(),
                          cache.at("assoc").get<std::uint64_t>(), true};
    c.cache.validate();
  } else {
    c.cache = CacheConfig::disabled();
  }
  c.params.alpha = j.at("alpha").get<std::uint64_t>();
  c.unit_cost = j.at("unit_cost").get<std::uint64_t>();
  c.params.m = j.at("m").get<std::uint64_t>();
  c.params.alpha0 = j.at("alpha0").get<std::uint64_t>();
  c.params.clock_hz = j.at("clock_hz").get<double>();
  if (!j.at("tau").is_null()) c.tau = j.at("tau").get<std::uint64_t>();
  c.materialize = j.at("materialize").get<bool>();
  c.oracle = j.at("oracle").get<bool>();
  c.keep_false_deps = j.at("keep_false_deps").get<bool>();
  c.keep_war = j.at("keep_war").get<bool>();
  c.vertex_cap = j.at("vertex_cap").get<std::size_t>();
  const auto decode = j.at("decode").get<std::string>();
  if (decode != "strict" && decode != "permissive") throw Error("bad decode mode '" + decode + "' in config");
  c.decode_mode = decode == "strict" ? DecodeMode::Strict : DecodeMode::Permissive;
  return c;
}

ordered_json to_json(const EdagSummary& s) {
  ordered_json j;
  j["T1"] = s.T1;
  j["Tinf"] = s.Tinf;
  j["vertices"] = s.vertex_count;
  j["W"] = s.W;
  j["D"] = s.D;
  j["C"] = s.C;
  j["layer_histogram"] = s.layer_counts;
  j["bytes_total"] = s.bytes_total;
  ordered_json cache;
  cache["hits"] = s.cache.hits();
  cache["misses"] = s.cache.misses();
  cache["load_hits"] = s.cache.load_hits;
  cache["load_misses"] = s.cache.load_misses;
  cache["store_hits"] = s.cache.store_hits;
  cache["store_misses"] = s.cache.store_misses;
  j["cache"] = cache;
  j["unknown_mnemonics"] = s.unknown_mnemonics;
  j["atomic_records"] = s.atomic_records;
  return j;
}

ordered_json to_json(const MetricsReport& m) {
  ordered_json j;
  j["lower"] = m.memory.lower;
  j["upper_layered"] = m.memory.layered_upper;
  j["upper_closed"] = rational_json(m.memory.closed_upper);
  ordered_json total;
  total["lower"] = rational_json(m.total.lower);
  total["upper_layered"] = rational_json(m.total.layered_upper);
  total["upper_closed"] = rational_json(m.total.upper);
  j["total"] = total;
  j["lambda"] = rational_json(m.lambda);
  j["Lambda"] = optional_json(m.Lambda, rational_json);
  j["parallelism"] = optional_json(m.parallelism, rational_json);
  j["bandwidth_gbs"] = optional_json(m.bandwidth_gbs, [](double v) { return v; });
  j["bandwidth_note"] = "theoretical maximum average bandwidth, not an estimate of actual usage";
  j["w_over_c"] = optional_json(m.w_over_c, rational_json);
  return j;
}

ordered_json make_report(const AnalyzeConfig& config, const EdagSummary& summary, const MetricsReport& metrics,
                         const std::optional<OracleReport>& oracle) {
  ordered_json j;
  j["tool_version"] = kToolVersion;
  j["config"] = to_json(config);
  j["summary"] = to_json(summary);
  j["metrics"] = to_json(metrics);
  if (oracle) {
    ordered_json o;
    o["policy"] = "greedy, layer-then-id";
    o["makespan"] = oracle->makespan;
    o["memory_makespan"] = oracle->memory_makespan;
    o["peak_memory_issues"] = oracle->peak_memory_issues;
    o["depth"] = oracle->depth;
    j["oracle"] = o;
  }
  j["warnings"] = metrics.warnings;
  return j;
}

}  // namespace edag
