#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edag/builder.hpp"
#include "edag/cache.hpp"
#include "edag/error.hpp"

namespace edag {

// All bound and sensitivity arithmetic is exact.
using Rational = boost::rational<std::int64_t>;

/// Fixed-point rendering rounded half away from zero, trailing zeros trimmed.
std::string to_decimal(const Rational& r, int max_fraction_digits = 6);
double to_double(const Rational& r);

class InconsistentSummary : public Error { public: using Error::Error; };
class DepthExceedsWork : public Error { public: using Error::Error; };
class ZeroBaselineCost : public Error { public: using Error::Error; };
class ZeroSpan : public Error { public: using Error::Error; };
class TauMismatch : public Error { public: using Error::Error; };
class MixedParams : public Error { public: using Error::Error; };

struct ModelParams {
  std::uint64_t m = 4;        // memory issue slots
  std::uint64_t alpha = 200;  // RAM latency, cycles
  std::uint64_t alpha0 = 50;  // baseline latency, cycles
  double clock_hz = 1e9;

  void validate() const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct MemoryCostBounds {
  std::uint64_t lower = 0;          // max(D, ceil(W/m)) * alpha
  std::uint64_t layered_upper = 0;  // sum_i ceil(W_i/m) * alpha
  Rational closed_upper{0};         // ((W - D)/m + D) * alpha
};

MemoryCostBounds memory_cost_bounds(std::uint64_t W, std::uint64_t D, std::span<const std::uint64_t> layer_counts,
                                    std::uint64_t m, std::uint64_t alpha);

struct TotalCostBounds {
  Rational lower{0};
  Rational layered_upper{0};
  Rational upper{0};
};

TotalCostBounds total_cost_bounds(const MemoryCostBounds& bounds, std::uint64_t C);

/// Absolute memory latency sensitivity (W - D)/m + D.
Rational lambda(std::uint64_t W, std::uint64_t D, std::uint64_t m);

/// The same quantity rearranged as W/m + (1 - 1/m) D.
Rational lambda_rearranged(std::uint64_t W, std::uint64_t D, std::uint64_t m);

/// Relative memory latency sensitivity lambda / (lambda * alpha0 + C).
Rational big_lambda(const Rational& lambda, std::uint64_t alpha0, std::uint64_t C);

/// Theoretical maximum average bandwidth in GB/s (1e9 bytes).
double bandwidth_gbs(std::uint64_t bytes_total, std::uint64_t Tinf, double clock_hz);

struct MovementRow {
  std::uint64_t time_cycles = 0;
  std::uint64_t bytes = 0;
  friend bool operator==(const MovementRow&, const MovementRow&) = default;
};

std::vector<MovementRow> movement_series(const MovementBins& bins, std::uint64_t tau);

struct MetricsReport {
  ModelParams params;
  CacheConfig cache;
  CostModel cost;

  std::uint64_t W = 0;
  std::uint64_t D = 0;
  std::uint64_t C = 0;

  MemoryCostBounds memory;
  TotalCostBounds total;
  Rational lambda{0};
  std::optional<Rational> Lambda;       // undefined when lambda*alpha0 + C = 0
  std::optional<Rational> parallelism;  // undefined when Tinf = 0
  std::optional<double> bandwidth_gbs;  // undefined when Tinf = 0
  std::optional<Rational> w_over_c;     // undefined when C = 0
  std::vector<std::string> warnings;
};

inline constexpr std::int64_t kLambdaConfidenceNum = 3;  // W/C threshold 3/10
inline constexpr std::int64_t kLambdaConfidenceDen = 10;

bool low_confidence_Lambda(const MetricsReport& r);

MetricsReport compute_metrics(const EdagSummary& summary, const ModelParams& params, const CacheConfig& cache,
                              const CostModel& cost);

enum class RankMetric { Lambda, RelativeLambda };

struct NamedReport {
  std::string name;
  MetricsReport report;
};

struct RankedTrace {
  std::string name;
  Rational value{0};
  std::size_t rank = 0;  // 1 = most latency sensitive
  std::vector<std::string> warnings;
};

/// Descending by metric, ties broken by name. Requires at least two reports
/// produced under identical model, cache and cost settings.
std::vector<RankedTrace> rank_traces(std::span<const NamedReport> reports, RankMetric metric);

}  // namespace edag
