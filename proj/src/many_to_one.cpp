#include "apdesign/many_to_one.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <tuple>

namespace apd {

namespace {

auto arc_key(const AuxArc& a) { return std::tie(a.from, a.to, a.demand); }

}  // namespace

AuxDigraph::AuxDigraph(std::vector<AuxArc> arcs) : arcs_(std::move(arcs)) {
  std::sort(arcs_.begin(), arcs_.end(),
            [](const AuxArc& x, const AuxArc& y) { return arc_key(x) < arc_key(y); });
  std::set<Vertex> vs;
  for (const auto& a : arcs_) {
    vs.insert(a.from);
    vs.insert(a.to);
  }
  vertices_.assign(vs.begin(), vs.end());
  for (std::size_t i = 0; i < vertices_.size(); ++i) index_[vertices_[i]] = i;
  out_.assign(vertices_.size(), 0);
  in_.assign(vertices_.size(), 0);
  for (const auto& a : arcs_) {
    ++out_[index_.at(a.from)];
    ++in_[index_.at(a.to)];
  }
}

std::size_t AuxDigraph::index_of(const Vertex& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) {
    throw Error(ErrorCode::IndexOutOfRange, "vertex " + to_string(v) + " not in digraph");
  }
  return it->second;
}

int AuxDigraph::out_degree(const Vertex& v) const {
  auto it = index_.find(v);
  return it == index_.end() ? 0 : out_[it->second];
}

int AuxDigraph::in_degree(const Vertex& v) const {
  auto it = index_.find(v);
  return it == index_.end() ? 0 : in_[it->second];
}

int AuxDigraph::imbalance(const Vertex& v) const { return out_degree(v) - in_degree(v); }

void AuxDigraph::expand(const AuxArc& arc, std::vector<Vertex>& vertices,
                        std::vector<EdgeLabel>& labels) {
  if (vertices.empty()) vertices.push_back(arc.from);
  if (arc.from.side == Side::Supplier && arc.to.side == Side::Supplier) {
    vertices.push_back({Side::Demand, arc.demand});
    labels.push_back(EdgeLabel::T);
    vertices.push_back(arc.to);
    labels.push_back(EdgeLabel::C);
  } else {
    vertices.push_back(arc.to);
    labels.push_back(arc.from.side == Side::Supplier ? EdgeLabel::T : EdgeLabel::C);
  }
}

AuxDigraph AuxDigraph::without(const std::vector<bool>& removed) const {
  std::vector<AuxArc> kept;
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    if (i >= removed.size() || !removed[i]) kept.push_back(arcs_[i]);
  }
  return AuxDigraph(std::move(kept));
}

AuxDigraph build_aux_digraph(const DisagreementSet& d) {
  if (d.mode != MatchingMode::ManyToOne) {
    throw Error(ErrorCode::ModeMismatch, "auxiliary digraph needs a many-to-one disagreement set");
  }
  std::map<AgentId, AgentId> t_supplier;
  std::map<AgentId, AgentId> c_supplier;
  std::map<AgentId, int> t_load;
  std::map<AgentId, int> c_load;
  for (const auto& e : d.t_edges) {
    if (!t_supplier.emplace(e.b, e.a).second) {
      throw Error(ErrorCode::DegreeViolation,
                  "demand " + std::to_string(e.b) + " has two t-matches");
    }
    ++t_load[e.a];
  }
  for (const auto& e : d.c_edges) {
    if (!c_supplier.emplace(e.b, e.a).second) {
      throw Error(ErrorCode::DegreeViolation,
                  "demand " + std::to_string(e.b) + " has two c-matches");
    }
    ++c_load[e.a];
  }
  for (const auto* load : {&t_load, &c_load}) {
    for (const auto& [s, count] : *load) {
      if (count > d.capacity) {
        throw Error(ErrorCode::DegreeViolation,
                    "supplier " + std::to_string(s) + " has " + std::to_string(count) +
                        " disagreement edges on one side, capacity " +
                        std::to_string(d.capacity));
      }
    }
  }

  std::vector<AuxArc> arcs;
  std::set<AgentId> demands;
  for (const auto& [dem, s] : t_supplier) demands.insert(dem);
  for (const auto& [dem, s] : c_supplier) demands.insert(dem);
  for (AgentId dem : demands) {
    auto t = t_supplier.find(dem);
    auto c = c_supplier.find(dem);
    const Vertex dv{Side::Demand, dem};
    if (t != t_supplier.end() && c != c_supplier.end()) {
      if (t->second == c->second) {
        throw Error(ErrorCode::DegreeViolation, "pair (" + std::to_string(t->second) + "," +
                                                   std::to_string(dem) +
                                                   ") is both a t-match and a c-match");
      }
      arcs.push_back({{Side::Supplier, t->second}, {Side::Supplier, c->second}, dem});
    } else if (t != t_supplier.end()) {
      arcs.push_back({{Side::Supplier, t->second}, dv, dem});
    } else {
      arcs.push_back({dv, {Side::Supplier, c->second}, dem});
    }
  }
  return AuxDigraph(std::move(arcs));
}

FlowNetwork build_flow_network(const AuxDigraph& g) {
  FlowNetwork n;
  n.graph = g;
  const auto& vs = g.vertices();
  n.source_capacity.assign(vs.size(), 0);
  n.sink_capacity.assign(vs.size(), 0);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const int b = g.imbalance(vs[i]);
    if (b > 0) {
      n.source_capacity[i] = b;
      n.c_prime += b;
    } else if (b < 0) {
      n.sink_capacity[i] = -b;
    }
  }
  return n;
}

namespace {

constexpr std::size_t kNoArc = std::numeric_limits<std::size_t>::max();

struct ResidualEdge {
  std::size_t to;
  int capacity;
  std::size_t reverse;  // index of the paired edge
  std::size_t arc;      // original arc index, kNoArc for source/sink/reverse edges
  AgentId label;
  bool is_reverse;
};

class Residual {
 public:
  Residual(const FlowNetwork& n) : vertex_count_(n.graph.vertices().size()) {
    adj_.resize(vertex_count_ + 2);
    const auto& g = n.graph;
    for (std::size_t v = 0; v < vertex_count_; ++v) {
      if (n.source_capacity[v] > 0) add(source(), v, n.source_capacity[v], kNoArc, 0);
    }
    for (std::size_t a = 0; a < g.arcs().size(); ++a) {
      const auto& arc = g.arcs()[a];
      add(g.index_of(arc.from), g.index_of(arc.to), 1, a, arc.demand);
    }
    for (std::size_t v = 0; v < vertex_count_; ++v) {
      if (n.sink_capacity[v] > 0) add(v, sink(), n.sink_capacity[v], kNoArc, 0);
    }
    // Neighbour order: (head vertex, arc label), forward edges before reverse.
    order_.resize(adj_.size());
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      auto& ord = order_[u];
      ord.resize(adj_[u].size());
      for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
      std::sort(ord.begin(), ord.end(), [&](std::size_t x, std::size_t y) {
        const auto& ex = edges_[adj_[u][x]];
        const auto& ey = edges_[adj_[u][y]];
        return std::tie(ex.to, ex.label, ex.is_reverse) < std::tie(ey.to, ey.label, ey.is_reverse);
      });
    }
  }

  std::size_t source() const { return vertex_count_; }
  std::size_t sink() const { return vertex_count_ + 1; }

  // Breadth-first search in the residual network; returns edge ids s..t.
  std::vector<std::size_t> bfs() const {
    const std::size_t n = adj_.size();
    std::vector<std::size_t> parent_edge(n, kNoArc);
    std::vector<bool> visited(n, false);
    std::deque<std::size_t> queue{source()};
    visited[source()] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t i : order_[u]) {
        const std::size_t e = adj_[u][i];
        const auto& edge = edges_[e];
        if (edge.capacity <= 0 || visited[edge.to]) continue;
        visited[edge.to] = true;
        parent_edge[edge.to] = e;
        if (edge.to == sink()) {
          std::vector<std::size_t> path;
          for (std::size_t v = sink(); v != source();) {
            const std::size_t pe = parent_edge[v];
            path.push_back(pe);
            v = edges_[edges_[pe].reverse].to;
          }
          std::reverse(path.begin(), path.end());
          return path;
        }
        queue.push_back(edge.to);
      }
    }
    return {};
  }

  void push(const std::vector<std::size_t>& path, int delta) {
    for (std::size_t e : path) {
      edges_[e].capacity -= delta;
      edges_[edges_[e].reverse].capacity += delta;
    }
  }

  int residual(std::size_t e) const { return edges_[e].capacity; }
  const ResidualEdge& edge(std::size_t e) const { return edges_[e]; }

  // Flow currently carried by forward edge e.
  int flow(std::size_t e) const { return edges_[edges_[e].reverse].capacity; }

  const std::vector<std::size_t>& adjacency(std::size_t u) const { return adj_[u]; }

 private:
  void add(std::size_t u, std::size_t v, int cap, std::size_t arc, AgentId label) {
    const std::size_t e = edges_.size();
    edges_.push_back({v, cap, e + 1, arc, label, false});
    edges_.push_back({u, 0, e, kNoArc, label, true});
    adj_[u].push_back(e);
    adj_[v].push_back(e + 1);
  }

  std::size_t vertex_count_;
  std::vector<ResidualEdge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::vector<std::size_t>> order_;
};

}  // namespace

FlowResult edmonds_karp(const FlowNetwork& n) {
  FlowResult out;
  const auto& g = n.graph;
  out.arc_in_path.assign(g.arcs().size(), false);
  if (n.c_prime == 0) return out;

  Residual r(n);
  while (true) {
    const auto path = r.bfs();
    if (path.empty()) break;
    int delta = std::numeric_limits<int>::max();
    for (std::size_t e : path) delta = std::min(delta, r.residual(e));
    std::vector<std::size_t> nodes{r.source()};
    for (std::size_t e : path) nodes.push_back(r.edge(e).to);
    out.augmenting_paths.push_back(std::move(nodes));
    r.push(path, delta);
    out.flow_value += delta;
  }

  // Decompose the flow on original arcs into S -> D paths.
  const std::size_t vcount = g.vertices().size();
  std::vector<int> arc_flow(g.arcs().size(), 0);
  std::vector<int> source_left(vcount, 0);
  std::vector<int> sink_left(vcount, 0);
  // Outgoing original arcs per vertex, in (head, label) order.
  std::vector<std::vector<std::size_t>> out_arcs(vcount);
  for (std::size_t u = 0; u <= vcount + 1; ++u) {
    for (std::size_t e : r.adjacency(u)) {
      const auto& edge = r.edge(e);
      if (edge.is_reverse) continue;
      if (edge.arc != kNoArc) {
        arc_flow[edge.arc] = r.flow(e);
      } else if (u == r.source()) {
        source_left[edge.to] = r.flow(e);
      } else {
        sink_left[u] = r.flow(e);
      }
    }
  }
  for (std::size_t a = 0; a < g.arcs().size(); ++a) {
    out_arcs[g.index_of(g.arcs()[a].from)].push_back(a);
  }
  for (auto& list : out_arcs) {
    std::sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) {
      const auto& ax = g.arcs()[x];
      const auto& ay = g.arcs()[y];
      return std::tie(ax.to, ax.demand) < std::tie(ay.to, ay.demand);
    });
  }

  for (std::size_t start = 0; start < vcount; ++start) {
    while (source_left[start] > 0) {
      --source_left[start];
      std::vector<std::size_t> arcs;
      std::vector<std::size_t> verts{start};
      std::size_t cur = start;
      while (sink_left[cur] == 0) {
        std::size_t next_arc = kNoArc;
        for (std::size_t a : out_arcs[cur]) {
          if (arc_flow[a] > 0) {
            next_arc = a;
            break;
          }
        }
        if (next_arc == kNoArc) {
          throw Error(ErrorCode::UnbalancedVertex, "flow conservation violated during decomposition");
        }
        arc_flow[next_arc] = 0;
        const std::size_t next = g.index_of(g.arcs()[next_arc].to);
        auto seen = std::find(verts.begin(), verts.end(), next);
        if (seen != verts.end()) {
          // Drop the flow loop; its arcs stay in the residual graph.
          const auto pos = static_cast<std::size_t>(seen - verts.begin());
          arcs.resize(pos);
          verts.resize(pos + 1);
        } else {
          arcs.push_back(next_arc);
          verts.push_back(next);
        }
        cur = next;
      }
      --sink_left[cur];
      for (std::size_t a : arcs) out.arc_in_path[a] = true;
      out.paths.push_back(std::move(arcs));
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> eulerian_cycle_decomposition(const AuxDigraph& g) {
  for (const auto& v : g.vertices()) {
    if (g.imbalance(v) != 0) {
      throw Error(ErrorCode::UnbalancedVertex,
                  "vertex " + to_string(v) + " has in-degree " + std::to_string(g.in_degree(v)) +
                      " and out-degree " + std::to_string(g.out_degree(v)));
    }
  }
  const auto& arcs = g.arcs();
  const std::size_t vcount = g.vertices().size();
  // Unused outgoing arcs per vertex, smallest label first.
  std::vector<std::vector<std::size_t>> out(vcount);
  for (std::size_t a = 0; a < arcs.size(); ++a) out[g.index_of(arcs[a].from)].push_back(a);
  for (auto& list : out) {
    std::sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) {
      return std::tie(arcs[x].demand, arcs[x].to) < std::tie(arcs[y].demand, arcs[y].to);
    });
  }
  std::vector<std::size_t> next_unused(vcount, 0);
  auto has_unused = [&](std::size_t v) { return next_unused[v] < out[v].size(); };

  std::vector<std::vector<std::size_t>> cycles;
  for (std::size_t v0 = 0; v0 < vcount; ++v0) {
    while (has_unused(v0)) {
      // Closed walk from v0 along unused arcs.
      std::vector<std::size_t> walk_vertices{v0};
      std::vector<std::size_t> walk_arcs;
      std::size_t v = v0;
      while (has_unused(v)) {
        const std::size_t a = out[v][next_unused[v]++];
        walk_arcs.push_back(a);
        v = g.index_of(arcs[a].to);
        walk_vertices.push_back(v);
      }
      // Cut the walk into simple cycles at repeated vertices.
      std::vector<long> first_pos(vcount, -1);
      std::vector<std::size_t> stack_vertices;
      std::vector<std::size_t> stack_arcs;
      for (std::size_t i = 0; i < walk_vertices.size(); ++i) {
        const std::size_t x = walk_vertices[i];
        if (i > 0) stack_arcs.push_back(walk_arcs[i - 1]);
        if (first_pos[x] == -1) {
          first_pos[x] = static_cast<long>(stack_vertices.size());
          stack_vertices.push_back(x);
          continue;
        }
        const auto j = static_cast<std::size_t>(first_pos[x]);
        cycles.emplace_back(stack_arcs.begin() + static_cast<long>(j), stack_arcs.end());
        stack_arcs.resize(j);
        for (std::size_t m = j + 1; m < stack_vertices.size(); ++m) first_pos[stack_vertices[m]] = -1;
        stack_vertices.resize(j + 1);
      }
    }
  }
  return cycles;
}

AlternatingComponent expand_arcs(const std::vector<AuxArc>& arcs, ComponentKind kind) {
  AlternatingComponent c;
  c.kind = kind;
  for (const auto& a : arcs) AuxDigraph::expand(a, c.vertices, c.labels);
  return c;
}

ManyToOneDecomposition decompose_many_to_one_detailed(const DisagreementSet& d) {
  ManyToOneDecomposition out;
  out.graph = build_aux_digraph(d);
  out.network = build_flow_network(out.graph);
  out.flow = edmonds_karp(out.network);
  out.residual = out.graph.without(out.flow.arc_in_path);
  out.cycles = eulerian_cycle_decomposition(out.residual);

  for (const auto& path : out.flow.paths) {
    std::vector<AuxArc> arcs;
    for (std::size_t a : path) arcs.push_back(out.graph.arcs()[a]);
    out.components.push_back(expand_arcs(arcs, ComponentKind::Path));
  }
  for (const auto& cycle : out.cycles) {
    std::vector<AuxArc> arcs;
    for (std::size_t a : cycle) arcs.push_back(out.residual.arcs()[a]);
    out.components.push_back(expand_arcs(arcs, ComponentKind::Cycle));
  }
  for (const auto& c : out.components) check_component_shape(c);
  return out;
}

std::vector<AlternatingComponent> decompose_many_to_one(const DisagreementSet& d) {
  return decompose_many_to_one_detailed(d).components;
}

bool DecompositionReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.pass; });
}

const ConditionResult& DecompositionReport::condition(int id) const {
  for (const auto& c : conditions) {
    if (c.id == id) return c;
  }
  throw Error(ErrorCode::IndexOutOfRange, "no condition " + std::to_string(id));
}

DecompositionReport validate_decomposition(const DisagreementSet& d,
                                           const std::vector<AlternatingComponent>& components,
                                           int capacity) {
  ConditionResult shape{0, "alternating shape", true, {}};
  ConditionResult cover{1, "each disagreement edge covered exactly once", true, {}};
  ConditionResult supply{2, "each supplier in at most C0 components", true, {}};
  ConditionResult demand{3, "each demand in at most one component", true, {}};
  ConditionResult simple{4, "no vertex repeated within a component", true, {}};

  auto fail = [](ConditionResult& r, std::string witness) {
    r.pass = false;
    r.witnesses.push_back(std::move(witness));
  };

  std::map<MatchEdge, EdgeLabel> expected;
  for (const auto& e : d.t_edges) expected[e] = EdgeLabel::T;
  for (const auto& e : d.c_edges) expected[e] = EdgeLabel::C;
  std::map<MatchEdge, int> covered;
  std::map<Vertex, int> membership;

  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const std::string where = "component " + std::to_string(i);
    try {
      check_component_shape(c);
    } catch (const Error& e) {
      fail(shape, where + ": " + e.what());
      continue;
    }
    for (std::size_t j = 0; j < c.k(); ++j) {
      const MatchEdge e = c.edge(j);
      ++covered[e];
      auto it = expected.find(e);
      if (it == expected.end()) {
        fail(cover, where + ": edge " + to_string(e) + " is not in the disagreement set");
      } else if (it->second != c.labels[j]) {
        fail(cover, where + ": edge " + to_string(e) + " carries the wrong label");
      }
    }
    const std::size_t distinct_end = c.is_cycle() ? c.k() : c.k() + 1;
    std::set<Vertex> seen;
    for (std::size_t j = 0; j < distinct_end; ++j) {
      if (!seen.insert(c.vertices[j]).second) {
        fail(simple, where + ": vertex " + to_string(c.vertices[j]) + " repeated");
      }
    }
    for (const auto& v : seen) ++membership[v];
  }

  for (const auto& [e, label] : expected) {
    auto it = covered.find(e);
    const int times = it == covered.end() ? 0 : it->second;
    if (times != 1) {
      fail(cover, "edge " + to_string(e) + " covered " + std::to_string(times) + " times");
    }
  }
  for (const auto& [v, count] : membership) {
    if (v.side == Side::Supplier && count > capacity) {
      fail(supply, "supplier " + to_string(v) + " in " + std::to_string(count) + " components");
    } else if (v.side != Side::Supplier && count > 1) {
      fail(demand, "vertex " + to_string(v) + " in " + std::to_string(count) + " components");
    }
  }

  DecompositionReport report;
  report.conditions = {shape, cover, supply, demand, simple};
  return report;
}

}  // namespace apd
