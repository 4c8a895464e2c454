#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "edag/builder.hpp"
#include "edag/metrics.hpp"
#include "edag/oracle.hpp"

namespace edag {

inline constexpr const char* kToolVersion = "0.1.0";

// Effective configuration of one `analyze` run; embedded in every report.
struct AnalyzeConfig {
  std::string trace;
  CacheConfig cache;
  std::uint64_t unit_cost = 1;
  ModelParams params;
  std::optional<std::uint64_t> tau;
  bool materialize = false;
  bool oracle = false;
  bool keep_false_deps = false;  // output (WAW) dependencies
  bool keep_war = false;         // anti (WAR) dependencies
  std::size_t vertex_cap = kDefaultVertexCap;
  DecodeMode decode_mode = DecodeMode::Strict;

  CostModel cost() const { return {params.alpha, unit_cost}; }
  BuildOptions build_options() const;
};

struct OracleReport {
  std::uint64_t makespan = 0;              // with the configured non-memory cost
  std::uint64_t memory_makespan = 0;       // non-memory vertices free
  std::uint64_t peak_memory_issues = 0;
  std::uint64_t depth = 0;                 // brute-force memory depth
};

nlohmann::ordered_json to_json(const AnalyzeConfig& c);
AnalyzeConfig analyze_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const EdagSummary& s);
nlohmann::ordered_json to_json(const MetricsReport& m);
nlohmann::ordered_json rational_json(const Rational& r);

nlohmann::ordered_json make_report(const AnalyzeConfig& config, const EdagSummary& summary,
                                   const MetricsReport& metrics, const std::optional<OracleReport>& oracle);

}  // namespace edag
