#include <doctest.h>

#include <set>

#include "edag/metrics.hpp"
#include "edag/oracle.hpp"
#include "edag/synth.hpp"
#include "support.hpp"

using namespace edag;

namespace {

MaterializedEdag graph_of(const std::string& text, std::uint64_t alpha = 1, std::uint64_t unit = 0) {
  BuildOptions o;
  o.materialize = true;
  return *build_from_text(text, CacheConfig::disabled(), {alpha, unit}, o).graph;
}

// No memory slot idles while a memory vertex is ready and waiting.
void check_work_conserving(const MaterializedEdag& g, const ScheduleResult& s, std::uint64_t m) {
  std::vector<std::uint64_t> ready(g.vertices.size(), 0);
  for (const auto& e : g.edges) {
    ready[e.to] = std::max(ready[e.to], s.finish[e.from]);
    CHECK(s.issue[e.to] >= s.finish[e.from]);
  }
  auto busy = [&](std::uint64_t t) {
    std::uint64_t n = 0;
    for (const auto& v : g.vertices) {
      if (v.is_memory_access && s.issue[v.id] <= t && t < s.finish[v.id]) ++n;
    }
    return n;
  };
  for (const auto& v : g.vertices) {
    if (!v.is_memory_access) {
      CHECK(s.issue[v.id] == ready[v.id]);
      continue;
    }
    std::set<std::uint64_t> probes{ready[v.id]};
    for (const auto& u : g.vertices) {
      if (s.finish[u.id] >= ready[v.id] && s.finish[u.id] < s.issue[v.id]) probes.insert(s.finish[u.id]);
    }
    for (auto t : probes) {
      if (t < s.issue[v.id]) CHECK(busy(t) == m);
    }
  }
  for (const auto& v : g.vertices) CHECK(busy(s.issue[v.id]) <= m);
}

}  // namespace

TEST_CASE("eight independent misses on four slots") {
  const auto g = graph_of(generate({SynthPattern::Fanout, 8, 1}).text);
  const auto s = simulate_greedy_memory(g, 4, 1, 0);
  CHECK(s.makespan == 2);
  CHECK(s.makespan == testing::exhaustive_makespan(g, 4));
  CHECK(s.peak_memory_issues == 4);
  CHECK(simulate_greedy_memory(g, 4, 1, 0, SchedulePolicy::Fifo).makespan == 2);
}

TEST_CASE("a chain serializes") {
  for (std::uint64_t s : {1, 3, 9}) {
    const auto g = graph_of(generate({SynthPattern::PtrChase, s, 1}).text, 200);
    for (std::uint64_t m : {1, 2, 8}) CHECK(simulate_greedy_memory(g, m, 200, 0).makespan == s * 200);
  }
}

TEST_CASE("empty and memory-free graphs") {
  CHECK(simulate_greedy_memory(MaterializedEdag{}, 4, 200, 1).makespan == 0);
  CHECK(brute_force_memory_depth(MaterializedEdag{}) == 0);
  const auto g = graph_of("addi a0,a0,1\naddi a0,a0,1\nmv a1,a0\n", 200, 1);
  CHECK(brute_force_memory_depth(g) == 0);
  CHECK(simulate_greedy_memory(g, 4, 200, 1).makespan == 3);
}

TEST_CASE("depth of known shapes") {
  CHECK(brute_force_memory_depth(graph_of(generate({SynthPattern::Sum, 4, 1}).text)) == 1);
  CHECK(brute_force_memory_depth(graph_of(generate({SynthPattern::PtrChase, 12, 1}).text)) == 12);
}

TEST_CASE("greedy schedules stay within the bounds") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto text = generate({SynthPattern::RandomDag, 80, seed}).text;
    const auto res = build_from_text(text, CacheConfig::disabled(), {7, 0}, {true});
    const auto& g = *res.graph;
    const auto& sum = res.summary;
    for (std::uint64_t m : {1, 2, 3, 4, 8}) {
      CAPTURE(seed);
      CAPTURE(m);
      const auto b = memory_cost_bounds(sum.W, sum.D, sum.layer_counts, m, 7);
      const auto layered = simulate_greedy_memory(g, m, 7, 0);
      CHECK(layered.makespan >= b.lower);
      CHECK(layered.makespan <= b.layered_upper);
      check_work_conserving(g, layered, m);
      const auto fifo = simulate_greedy_memory(g, m, 7, 0, SchedulePolicy::Fifo);
      CHECK(fifo.makespan >= b.lower);
      CHECK(Rational(static_cast<std::int64_t>(fifo.makespan)) <= b.closed_upper);
      check_work_conserving(g, fifo, m);
    }
  }
}

TEST_CASE("greedy never beats the exhaustive optimum") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto g = graph_of(generate({SynthPattern::RandomDag, 16, seed}).text);
    for (std::uint64_t m : {1, 2, 3}) {
      const auto opt = testing::exhaustive_makespan(g, m);
      CHECK(simulate_greedy_memory(g, m, 1, 0).makespan >= opt);
    }
  }
}

TEST_CASE("non-memory vertices run unconstrained") {
  const auto g = graph_of(generate({SynthPattern::Sum, 16, 1}).text, 10, 1);
  const auto s = simulate_greedy_memory(g, 64, 10, 1);
  const auto summary = summarize(g, std::nullopt);
  CHECK(s.makespan == summary.Tinf);
}

TEST_CASE("oracle caps") {
  const auto g = graph_of(generate({SynthPattern::Fanout, 20, 1}).text);
  CHECK_THROWS_AS(simulate_greedy_memory(g, 4, 1, 0, SchedulePolicy::LayerThenId, 10), CapExceeded);
  CHECK_THROWS_AS(brute_force_memory_depth(g, 10), CapExceeded);
}
