#include "edag/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "edag/builder.hpp"
#include "edag/isa.hpp"
#include "edag/metrics.hpp"
#include "edag/oracle.hpp"
#include "edag/report.hpp"
#include "edag/synth.hpp"
#include "edag/trace.hpp"

namespace edag {

namespace {

// Thrown for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  std::string cache_spec;
  bool no_cache = false;
  std::uint64_t m = 4;
  std::uint64_t alpha = 200;
  std::uint64_t alpha0 = 50;
  std::uint64_t unit_cost = 1;
  double clock_hz = 1e9;
  bool permissive = false;
  bool quiet = false;

  void attach(CLI::App& app) {
    auto* cache = app.add_option("--cache", cache_spec, "Cache as SIZE:LINE:ASSOC (default 32768:64:2)");
    app.add_flag("--no-cache", no_cache, "Treat every access as a RAM access")->excludes(cache);
    app.add_option("--m", m, "Memory issue slots")->check(CLI::PositiveNumber);
    app.add_option("--alpha", alpha, "RAM access latency in cycles")->check(CLI::PositiveNumber);
    app.add_option("--alpha0", alpha0, "Baseline memory latency in cycles");
    app.add_option("--unit-cost", unit_cost, "Cost of every non-RAM vertex in cycles");
    app.add_option("--clock", clock_hz, "Clock frequency in Hz")->check(CLI::PositiveNumber);
    app.add_flag("--permissive", permissive, "Decode unknown mnemonics generically instead of failing");
    app.add_flag("--quiet", quiet, "No progress output");
  }

  AnalyzeConfig config(const std::string& trace) const {
    AnalyzeConfig c;
    c.trace = trace;
    if (no_cache) {
      c.cache = CacheConfig::disabled();
    } else if (!cache_spec.empty()) {
      try {
        c.cache = CacheConfig::parse(cache_spec);
      } catch (const InvalidCacheConfig& e) {
        throw UsageError(std::string("--cache: ") + e.what());
      }
    }
    c.unit_cost = unit_cost;
    c.params.m = m;
    c.params.alpha = alpha;
    c.params.alpha0 = alpha0;
    c.params.clock_hz = clock_hz;
    if (alpha0 > alpha) throw UsageError("--alpha0 must not exceed --alpha");
    c.decode_mode = permissive ? DecodeMode::Permissive : DecodeMode::Strict;
    return c;
  }
};

class Progress {
 public:
  Progress(std::ostream& err, bool quiet, std::string label)
      : err_(err), quiet_(quiet), label_(std::move(label)), begin_(Clock::now()) {}

  void tick(std::uint64_t lines) {
    if (quiet_ || (lines & ((1u << 22) - 1)) != 0) return;
    const double secs = std::chrono::duration<double>(Clock::now() - begin_).count();
    std::lock_guard lock(mutex());
    err_ << label_ << ": " << lines << " lines (" << static_cast<std::uint64_t>(lines / std::max(secs, 1e-9))
         << " lines/s)\n";
  }

 private:
  using Clock = std::chrono::steady_clock;
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
  std::ostream& err_;
  bool quiet_;
  std::string label_;
  Clock::time_point begin_;
};

BuildResult run_build(const AnalyzeConfig& c, std::ostream& err, bool quiet) {
  TraceReader reader{std::filesystem::path(c.trace)};
  EdagBuilder builder(c.cache, c.cost(), c.build_options());
  Progress progress(err, quiet, c.trace);
  TraceRecord rec;
  std::uint64_t n = 0;
  while (reader.next(rec)) {
    builder.add(rec);
    progress.tick(++n);
  }
  return builder.finish();
}

// Writes to --out when given, else to the command's output stream.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write(f);
  if (!f) throw Error("failed writing '" + path + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err, const std::string& prefix) {
  for (const auto& w : warnings) err << "warning: " << prefix << w << '\n';
}

int cmd_analyze(AnalyzeConfig c, const std::string& out_path, bool quiet, std::ostream& out, std::ostream& err) {
  BuildResult built = run_build(c, err, quiet);
  const MetricsReport metrics = compute_metrics(built.summary, c.params, c.cache, c.cost());
  std::optional<OracleReport> oracle;
  if (c.oracle) {
    const auto& g = *built.graph;
    OracleReport o;
    const auto full = simulate_greedy_memory(g, c.params.m, c.params.alpha, c.unit_cost, SchedulePolicy::LayerThenId,
                                             c.vertex_cap);
    const auto mem_only =
        simulate_greedy_memory(g, c.params.m, c.params.alpha, 0, SchedulePolicy::LayerThenId, c.vertex_cap);
    o.makespan = full.makespan;
    o.memory_makespan = mem_only.makespan;
    o.peak_memory_issues = mem_only.peak_memory_issues;
    o.depth = brute_force_memory_depth(g, c.vertex_cap);
    oracle = o;
  }
  const auto report = make_report(c, built.summary, metrics, oracle);
  emit(out_path, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  print_warnings(metrics.warnings, err, "");
  return kExitOk;
}

int cmd_rank(const ModelFlags& flags, const std::string& metric_name, const std::vector<std::string>& traces,
             unsigned jobs, const std::string& out_path, std::ostream& out, std::ostream& err) {
  RankMetric metric;
  if (metric_name == "lambda") {
    metric = RankMetric::Lambda;
  } else if (metric_name == "Lambda") {
    metric = RankMetric::RelativeLambda;
  } else {
    throw UsageError("--metric must be 'lambda' or 'Lambda'");
  }
  if (traces.size() < 2) throw UsageError("rank needs at least two traces");

  std::vector<NamedReport> reports(traces.size());
  std::vector<std::exception_ptr> failures(traces.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < traces.size(); i = next++) {
      try {
        const AnalyzeConfig c = flags.config(traces[i]);
        const BuildResult built = run_build(c, err, flags.quiet);
        reports[i].name = std::filesystem::path(traces[i]).filename().string();
        reports[i].report = compute_metrics(built.summary, c.params, c.cache, c.cost());
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(traces.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  const auto ranked = rank_traces(reports, metric);
  emit(out_path, out, [&](std::ostream& os) {
    os << "name,metric,rank,warnings\n";
    for (const auto& r : ranked) {
      std::string w;
      for (const auto& s : r.warnings) w += (w.empty() ? "" : "; ") + s;
      os << csv_field(r.name) << ',' << to_decimal(r.value, 9) << ',' << r.rank << ',' << csv_field(w) << '\n';
    }
  });
  for (const auto& r : ranked) print_warnings(r.warnings, err, r.name + ": ");
  return kExitOk;
}

int cmd_movement(AnalyzeConfig c, const std::string& out_path, bool quiet, std::ostream& out, std::ostream& err) {
  const BuildResult built = run_build(c, err, quiet);
  const auto rows = movement_series(*built.summary.movement, *c.tau);
  emit(out_path, out, [&](std::ostream& os) {
    os << "time_cycles,bytes\n";
    for (const auto& r : rows) os << r.time_cycles << ',' << r.bytes << '\n';
  });
  return kExitOk;
}

int cmd_export_dot(AnalyzeConfig c, const std::string& out_path, bool quiet, std::ostream& out, std::ostream& err) {
  c.materialize = true;
  const BuildResult built = run_build(c, err, quiet);
  emit(out_path, out, [&](std::ostream& os) { export_dot(*built.graph, os, c.vertex_cap); });
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"eDAG memory-level-parallelism and latency-sensitivity analyzer", "edag"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Build the eDAG of one trace and report its metrics");
  ModelFlags af;
  std::string a_trace, a_out, a_config;
  std::uint64_t a_tau = 0;
  std::size_t a_cap = kDefaultVertexCap;
  bool a_materialize = false, a_oracle = false, a_keep = false, a_keep_war = false;
  af.attach(*analyze);
  analyze->add_option("--trace", a_trace, "Trace file (.gz accepted)");
  analyze->add_option("--tau", a_tau, "Data-movement sampling interval in cycles")->check(CLI::PositiveNumber);
  analyze->add_flag("--materialize", a_materialize, "Keep the explicit graph in memory");
  analyze->add_flag("--oracle", a_oracle, "Also run the greedy schedule and depth oracles (implies --materialize)");
  analyze->add_flag("--keep-false-deps", a_keep, "Retain WAW dependencies (requires --materialize)");
  analyze->add_flag("--keep-war", a_keep_war, "Retain WAR dependencies (requires --materialize)");
  analyze->add_option("--cap", a_cap, "Vertex cap for materialization");
  analyze->add_option("--out", a_out, "Report file (JSON)");
  analyze->add_option("--config", a_config, "Re-run with the configuration embedded in a report");

  // rank
  auto* rank = app.add_subcommand("rank", "Rank traces by memory latency sensitivity");
  ModelFlags rf;
  std::string r_metric, r_out;
  std::vector<std::string> r_traces;
  unsigned r_jobs = std::max(1u, std::thread::hardware_concurrency());
  rf.attach(*rank);
  rank->add_option("--metric", r_metric, "lambda or Lambda")->required();
  rank->add_option("--out", r_out, "Ranking file (CSV)");
  rank->add_option("--jobs", r_jobs, "Traces analyzed in parallel")->check(CLI::PositiveNumber);
  rank->add_option("traces", r_traces, "Trace files")->required();

  // movement
  auto* movement = app.add_subcommand("movement", "Emit the data-movement time series of a trace");
  ModelFlags mf;
  std::string m_trace, m_out;
  std::uint64_t m_tau = 0;
  mf.attach(*movement);
  movement->add_option("--trace", m_trace, "Trace file")->required();
  movement->add_option("--tau", m_tau, "Sampling interval in cycles")->required()->check(CLI::PositiveNumber);
  movement->add_option("--out", m_out, "Series file (CSV)");

  // export-dot
  auto* dot = app.add_subcommand("export-dot", "Write the eDAG as Graphviz DOT");
  ModelFlags df;
  std::string d_trace, d_out;
  std::size_t d_cap = kDefaultVertexCap;
  bool d_keep = false, d_keep_war = false;
  df.attach(*dot);
  dot->add_option("--trace", d_trace, "Trace file")->required();
  dot->add_flag("--keep-false-deps", d_keep, "Draw WAW dependencies as dashed edges");
  dot->add_flag("--keep-war", d_keep_war, "Draw WAR dependencies as dashed edges");
  dot->add_option("--cap", d_cap, "Vertex cap");
  dot->add_option("--out", d_out, "DOT file");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic trace");
  std::string s_pattern, s_out;
  SynthSpec spec;
  bool s_list = false;
  synth->add_option("--pattern", s_pattern, "chain | fanout | sum | ptr-chase | random-dag");
  synth->add_option("--n", spec.n, "Size")->check(CLI::PositiveNumber);
  synth->add_option("--seed", spec.seed, "Random seed");
  synth->add_option("--base", spec.base_addr, "Base address");
  synth->add_option("--stride", spec.stride, "Address stride in bytes")->check(CLI::PositiveNumber);
  synth->add_option("--out", s_out, "Trace file");
  synth->add_flag("--list-isa", s_list, "List the supported mnemonic table and exit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      AnalyzeConfig c;
      if (!a_config.empty()) {
        std::ifstream f(a_config);
        if (!f) throw UsageError("--config: cannot open '" + a_config + "'");
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(f);
          c = analyze_config_from_json(j.contains("config") ? j.at("config") : j);
        } catch (const nlohmann::json::exception& e) {
          throw UsageError(std::string("--config: ") + e.what());
        }
      } else {
        if (a_trace.empty()) throw UsageError("--trace is required");
        c = af.config(a_trace);
        if (*analyze->get_option("--tau")) c.tau = a_tau;
        c.materialize = a_materialize;
        c.oracle = a_oracle;
        c.keep_false_deps = a_keep;
        c.keep_war = a_keep_war;
        c.vertex_cap = a_cap;
      }
      if ((c.keep_false_deps || c.keep_war) && !(c.materialize || c.oracle)) {
        throw UsageError(std::string(c.keep_false_deps ? "--keep-false-deps" : "--keep-war") +
                         " requires --materialize");
      }
      return cmd_analyze(c, a_out, af.quiet, out, err);
    }
    if (rank->parsed()) return cmd_rank(rf, r_metric, r_traces, r_jobs, r_out, out, err);
    if (movement->parsed()) {
      AnalyzeConfig c = mf.config(m_trace);
      c.tau = m_tau;
      return cmd_movement(c, m_out, mf.quiet, out, err);
    }
    if (dot->parsed()) {
      AnalyzeConfig c = df.config(d_trace);
      c.keep_false_deps = d_keep;
      c.keep_war = d_keep_war;
      c.vertex_cap = d_cap;
      return cmd_export_dot(c, d_out, df.quiet, out, err);
    }
    if (synth->parsed()) {
      if (s_list) {
        emit(s_out, out, [](std::ostream& os) { list_isa(os); });
        return kExitOk;
      }
      if (s_pattern.empty()) throw UsageError("--pattern is required");
      auto p = parse_pattern(s_pattern);
      if (!p) throw UsageError("--pattern: unknown pattern '" + s_pattern + "'");
      spec.pattern = *p;
      const SynthTrace t = generate(spec);
      emit(s_out, out, [&](std::ostream& os) { os << t.text; });
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
  return kExitUsage;
}

}  // namespace edag
