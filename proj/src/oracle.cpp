#include "edag/oracle.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <tuple>

namespace edag {

namespace {

struct Adjacency {
  std::vector<std::uint32_t> offset;  // CSR over successors
  std::vector<std::uint32_t> succ;
  std::vector<std::uint32_t> indegree;
};

Adjacency successors(const MaterializedEdag& g) {
  const std::size_t n = g.vertices.size();
  Adjacency a;
  a.offset.assign(n + 1, 0);
  a.indegree.assign(n, 0);
  for (const auto& e : g.edges) {
    if (e.from >= n || e.to >= n) throw Error("edge references a missing vertex");
    ++a.offset[e.from + 1];
    ++a.indegree[e.to];
  }
  for (std::size_t i = 0; i < n; ++i) a.offset[i + 1] += a.offset[i];
  a.succ.resize(g.edges.size());
  auto fill = a.offset;
  for (const auto& e : g.edges) a.succ[fill[e.from]++] = e.to;
  return a;
}

}  // namespace

ScheduleResult simulate_greedy_memory(const MaterializedEdag& graph, std::uint64_t m, std::uint64_t alpha,
                                      std::uint64_t unit_cost, SchedulePolicy policy, std::size_t cap) {
  if (graph.vertices.size() > cap) throw CapExceeded(cap);
  if (m < 1) throw Error("m must be at least 1");
  const std::size_t n = graph.vertices.size();
  const Adjacency adj = successors(graph);
  auto indeg = adj.indegree;
  auto is_mem = [&](std::uint32_t v) { return graph.vertices[v].is_memory_access; };

  // Memory layers for the ready-queue priority, computed here from the edges.
  std::vector<std::uint32_t> reach(n, 0);  // memory vertices on the deepest path ending at v
  for (std::uint32_t v = 0; v < n; ++v) {
    if (is_mem(v)) ++reach[v];
    for (auto i = adj.offset[v]; i < adj.offset[v + 1]; ++i) {
      reach[adj.succ[i]] = std::max(reach[adj.succ[i]], reach[v]);
    }
  }

  using Key = std::tuple<std::uint32_t, std::uint32_t>;  // (priority, id)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  using Event = std::pair<std::uint64_t, std::uint32_t>;  // (finish, id)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> running;

  ScheduleResult r;
  r.issue.assign(n, 0);
  r.finish.assign(n, 0);
  std::uint64_t now = 0;
  std::uint64_t busy = 0;
  std::size_t done = 0;
  std::vector<std::uint32_t> released;

  auto complete = [&](std::uint32_t v) {
    r.finish[v] = now;
    ++done;
    for (auto i = adj.offset[v]; i < adj.offset[v + 1]; ++i) {
      if (--indeg[adj.succ[i]] == 0) released.push_back(adj.succ[i]);
    }
  };
  auto drain_released = [&] {
    while (!released.empty()) {
      const auto v = released.back();
      released.pop_back();
      r.issue[v] = now;
      if (is_mem(v)) {
        ready.emplace(policy == SchedulePolicy::LayerThenId ? reach[v] : 0u, v);
      } else if (unit_cost == 0) {
        complete(v);
      } else {
        running.emplace(now + unit_cost, v);
      }
    }
  };

  for (std::uint32_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) released.push_back(v);
  }
  std::reverse(released.begin(), released.end());

  while (true) {
    drain_released();
    while (busy < m && !ready.empty()) {
      const auto v = std::get<1>(ready.top());
      ready.pop();
      r.issue[v] = now;
      ++busy;
      r.peak_memory_issues = std::max(r.peak_memory_issues, busy);
      running.emplace(now + alpha, v);
    }
    if (running.empty()) break;
    now = running.top().first;
    while (!running.empty() && running.top().first == now) {
      const auto v = running.top().second;
      running.pop();
      if (is_mem(v)) --busy;
      complete(v);
    }
  }
  if (done != n) throw Error("graph contains a cycle");
  for (auto f : r.finish) r.makespan = std::max(r.makespan, f);
  return r;
}

std::uint64_t brute_force_memory_depth(const MaterializedEdag& graph, std::size_t cap) {
  if (graph.vertices.size() > cap) throw CapExceeded(cap);
  const std::size_t n = graph.vertices.size();
  const Adjacency adj = successors(graph);
  std::vector<std::uint64_t> best(n, 0);  // memory vertices on the deepest path starting at v
  std::uint64_t depth = 0;
  for (std::size_t v = n; v-- > 0;) {
    std::uint64_t tail = 0;
    for (auto i = adj.offset[v]; i < adj.offset[v + 1]; ++i) {
      if (adj.succ[i] <= v) throw Error("edge does not follow trace order");
      tail = std::max(tail, best[adj.succ[i]]);
    }
    best[v] = tail + (graph.vertices[v].is_memory_access ? 1 : 0);
    depth = std::max(depth, best[v]);
  }
  return depth;
}

}  // namespace edag
