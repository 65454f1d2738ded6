#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the sampler, the closed-form probabilities or the flow code.

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "apdesign/decomposition.hpp"
#include "apdesign/many_to_one.hpp"

namespace oracle {

struct Outcome {
  std::vector<std::uint8_t> w;
  long double prob = 0.0L;
};

// Distribution of the sequential design, built edge by edge with a
// depth-first walk over the conditional rules.
inline std::vector<Outcome> distribution(apd::ComponentKind kind, std::size_t k, long double p) {
  std::vector<Outcome> out;
  std::vector<std::uint8_t> w(k, 0);
  const bool cycle = kind == apd::ComponentKind::Cycle;
  std::function<void(std::size_t, long double)> walk = [&](std::size_t j, long double prob) {
    if (prob == 0.0L) return;
    if (j == k) {
      out.push_back({w, prob});
      return;
    }
    if (cycle && j == k - 1) {
      w[j] = (w[0] == 0 && w[j - 1] == 0) ? 1 : 0;
      walk(j + 1, prob);
      return;
    }
    const long double on = j == 0 ? p / (1.0L + p) : (w[j - 1] ? 0.0L : p);
    w[j] = 1;
    walk(j + 1, prob * on);
    w[j] = 0;
    walk(j + 1, prob * (1.0L - on));
  };
  walk(0, 1.0L);
  return out;
}

inline long double marginal(const std::vector<Outcome>& d, std::size_t j) {
  long double s = 0.0L;
  for (const auto& o : d) {
    if (o.w[j]) s += o.prob;
  }
  return s;
}

inline long double joint(const std::vector<Outcome>& d, std::size_t j, std::size_t q) {
  long double s = 0.0L;
  for (const auto& o : d) {
    if (o.w[j] && o.w[q]) s += o.prob;
  }
  return s;
}

// HT estimate with weights taken from the oracle marginals.
inline long double ht(const apd::AlternatingComponent& c, const std::vector<double>& y,
                      const std::vector<std::uint8_t>& w, const std::vector<long double>& pi) {
  long double g = 0.0L;
  for (std::size_t j = 0; j < c.k(); ++j) {
    if (!w[j]) continue;
    const long double sign = c.labels[j] == apd::EdgeLabel::T ? 1.0L : -1.0L;
    g += sign * y[j] / pi[j];
  }
  return g;
}

struct Moments {
  long double mean = 0.0L;
  long double var = 0.0L;
};

// Exact mean and variance of any statistic of the realization.
template <class Stat>
Moments moments(const std::vector<Outcome>& d, Stat&& stat) {
  Moments m;
  for (const auto& o : d) m.mean += o.prob * stat(o.w);
  for (const auto& o : d) {
    const long double x = stat(o.w) - m.mean;
    m.var += o.prob * x * x;
  }
  return m;
}

// Ford–Fulkerson with depth-first augmenting paths on an aggregated
// capacity matrix. Node n is the source, n + 1 the sink.
inline int ford_fulkerson(const apd::FlowNetwork& net) {
  const auto& g = net.graph;
  const std::size_t n = g.vertices().size();
  const std::size_t size = n + 2;
  std::vector<std::vector<int>> cap(size, std::vector<int>(size, 0));
  for (const auto& a : g.arcs()) ++cap[g.index_of(a.from)][g.index_of(a.to)];
  for (std::size_t v = 0; v < n; ++v) {
    cap[n][v] += net.source_capacity[v];
    cap[v][n + 1] += net.sink_capacity[v];
  }
  int flow = 0;
  while (true) {
    std::vector<int> parent(size, -1);
    std::vector<bool> seen(size, false);
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
      if (u == n + 1) return true;
      seen[u] = true;
      for (std::size_t v = 0; v < size; ++v) {
        if (cap[u][v] > 0 && !seen[v]) {
          parent[v] = static_cast<int>(u);
          if (dfs(v)) return true;
        }
      }
      return false;
    };
    if (!dfs(n)) break;
    for (std::size_t v = n + 1; v != n; v = static_cast<std::size_t>(parent[v])) {
      const auto u = static_cast<std::size_t>(parent[v]);
      --cap[u][v];
      ++cap[v][u];
    }
    ++flow;
  }
  return flow;
}

}  // namespace oracle
