#include "edag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace edag {

namespace {

std::int64_t checked(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw Error("metric arithmetic overflows 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t as_i64(std::uint64_t v) { return checked(static_cast<__int128>(v)); }

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0 ? 1 : 0); }

}  // namespace

std::string to_decimal(const Rational& r, int max_fraction_digits) {
  const bool neg = r.numerator() < 0;
  const unsigned __int128 num = neg ? -static_cast<__int128>(r.numerator()) : r.numerator();
  const auto den = static_cast<unsigned __int128>(r.denominator());
  unsigned __int128 scale = 1;
  for (int i = 0; i < max_fraction_digits; ++i) scale *= 10;
  // round half away from zero at the last digit
  unsigned __int128 scaled = (num * scale * 2 + den) / (den * 2);
  auto whole = static_cast<std::uint64_t>(scaled / scale);
  auto frac = static_cast<std::uint64_t>(scaled % scale);

  std::string out = (neg && scaled != 0 ? "-" : "") + std::to_string(whole);
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, static_cast<std::size_t>(max_fraction_digits) - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += '.' + digits;
  }
  return out;
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

void ModelParams::validate() const {
  if (m < 1) throw Error("m must be at least 1");
  if (alpha < alpha0) throw Error("alpha must be at least alpha0");
  if (!(clock_hz > 0)) throw Error("clock frequency must be positive");
}

MemoryCostBounds memory_cost_bounds(std::uint64_t W, std::uint64_t D, std::span<const std::uint64_t> layer_counts,
                                    std::uint64_t m, std::uint64_t alpha) {
  if (m < 1) throw Error("m must be at least 1");
  std::uint64_t sum = 0;
  std::uint64_t layered = 0;
  for (auto c : layer_counts) {
    sum += c;
    layered += ceil_div(c, m);
  }
  if (sum != W) throw InconsistentSummary("layer counts sum to " + std::to_string(sum) + " but W = " + std::to_string(W));
  if (D != layer_counts.size()) throw InconsistentSummary("D does not match the number of layers");

  MemoryCostBounds b;
  b.lower = std::max(D, ceil_div(W, m)) * alpha;
  b.layered_upper = layered * alpha;
  b.closed_upper = lambda(W, D, m) * as_i64(alpha);
  return b;
}

TotalCostBounds total_cost_bounds(const MemoryCostBounds& bounds, std::uint64_t C) {
  const auto c = as_i64(C);
  return {Rational(as_i64(bounds.lower)) + c, Rational(as_i64(bounds.layered_upper)) + c, bounds.closed_upper + c};
}

Rational lambda(std::uint64_t W, std::uint64_t D, std::uint64_t m) {
  if (m < 1) throw Error("m must be at least 1");
  if (D > W) throw DepthExceedsWork("memory depth " + std::to_string(D) + " exceeds memory work " + std::to_string(W));
  return Rational(as_i64(W - D), as_i64(m)) + as_i64(D);
}

Rational lambda_rearranged(std::uint64_t W, std::uint64_t D, std::uint64_t m) {
  if (m < 1) throw Error("m must be at least 1");
  if (D > W) throw DepthExceedsWork("memory depth exceeds memory work");
  const Rational inv_m(1, as_i64(m));
  return inv_m * as_i64(W) + (Rational(1) - inv_m) * as_i64(D);
}

Rational big_lambda(const Rational& lam, std::uint64_t alpha0, std::uint64_t C) {
  // lam = p/q  =>  Lambda = p / (p * alpha0 + C * q)
  const __int128 p = lam.numerator();
  const __int128 q = lam.denominator();
  const __int128 den = p * static_cast<__int128>(alpha0) + static_cast<__int128>(C) * q;
  if (den == 0) throw ZeroBaselineCost("lambda * alpha0 + C is zero");
  return Rational(checked(p), checked(den));
}

double bandwidth_gbs(std::uint64_t bytes_total, std::uint64_t Tinf, double clock_hz) {
  if (Tinf == 0) throw ZeroSpan("span is zero; bandwidth is undefined");
  const double seconds = static_cast<double>(Tinf) / clock_hz;
  return static_cast<double>(bytes_total) / seconds / 1e9;
}

std::vector<MovementRow> movement_series(const MovementBins& bins, std::uint64_t tau) {
  if (bins.tau != tau) {
    throw TauMismatch("movement bins were sampled with tau=" + std::to_string(bins.tau) + ", not " +
                      std::to_string(tau));
  }
  std::vector<MovementRow> rows;
  rows.reserve(bins.bytes.size());
  for (std::size_t i = 0; i < bins.bytes.size(); ++i) rows.push_back({tau * i, bins.bytes[i]});
  return rows;
}

bool low_confidence_Lambda(const MetricsReport& r) {
  return r.w_over_c && *r.w_over_c < Rational(kLambdaConfidenceNum, kLambdaConfidenceDen);
}

MetricsReport compute_metrics(const EdagSummary& s, const ModelParams& params, const CacheConfig& cache,
                              const CostModel& cost) {
  params.validate();
  if (params.alpha != cost.miss_cost) throw Error("model alpha differs from the miss cost used to build the eDAG");

  MetricsReport r;
  r.params = params;
  r.cache = cache;
  r.cost = cost;
  r.W = s.W;
  r.D = s.D;
  r.C = s.C;
  r.memory = memory_cost_bounds(s.W, s.D, s.layer_counts, params.m, params.alpha);
  r.total = total_cost_bounds(r.memory, s.C);
  r.lambda = lambda(s.W, s.D, params.m);
  try {
    r.Lambda = big_lambda(r.lambda, params.alpha0, s.C);
  } catch (const ZeroBaselineCost&) {
    r.warnings.emplace_back("Lambda undefined: lambda * alpha0 + C is zero");
  }
  if (s.C > 0) r.w_over_c = Rational(as_i64(s.W), as_i64(s.C));
  if (s.Tinf > 0) {
    r.parallelism = Rational(as_i64(s.T1), as_i64(s.Tinf));
    r.bandwidth_gbs = bandwidth_gbs(s.bytes_total, s.Tinf, params.clock_hz);
  } else {
    r.warnings.emplace_back("span is zero; parallelism and bandwidth undefined");
  }
  if (low_confidence_Lambda(r)) {
    r.warnings.push_back("W/C = " + to_decimal(*r.w_over_c) + " is below 0.3; Lambda is low-confidence");
  }
  if (s.unknown_mnemonics > 0) {
    r.warnings.push_back(std::to_string(s.unknown_mnemonics) + " records with unknown mnemonics decoded permissively");
  }
  if (s.atomic_records > 0) {
    r.warnings.push_back(std::to_string(s.atomic_records) + " atomic records decoded as single load+store vertices");
  }
  return r;
}

std::vector<RankedTrace> rank_traces(std::span<const NamedReport> reports, RankMetric metric) {
  if (reports.size() < 2) throw Error("ranking needs at least two traces");
  const auto& ref = reports.front().report;
  for (const auto& nr : reports) {
    if (!(nr.report.params == ref.params) || !(nr.report.cache == ref.cache) || !(nr.report.cost == ref.cost)) {
      throw MixedParams("trace '" + nr.name + "' was analyzed with different parameters");
    }
  }

  std::vector<RankedTrace> out;
  out.reserve(reports.size());
  for (const auto& nr : reports) {
    RankedTrace t;
    t.name = nr.name;
    if (metric == RankMetric::Lambda) {
      t.value = nr.report.lambda;
    } else {
      t.value = nr.report.Lambda.value_or(Rational(0));
      if (!nr.report.Lambda) t.warnings.emplace_back("Lambda undefined");
      if (low_confidence_Lambda(nr.report)) {
        t.warnings.push_back("low-confidence: W/C = " + to_decimal(*nr.report.w_over_c) + " < 0.3");
      }
    }
    out.push_back(std::move(t));
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedTrace& a, const RankedTrace& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.name < b.name;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

}  // namespace edag
