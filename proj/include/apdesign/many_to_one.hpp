#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "apdesign/decomposition.hpp"

namespace apd {

/// Directed arc of the auxiliary digraph.
///
///   supplier -> supplier : `demand` has its t-match at `from`, c-match at `to`
///   supplier -> demand   : degree-one demand with a t-match
///   demand   -> supplier : degree-one demand with a c-match
struct AuxArc {
  Vertex from;
  Vertex to;
  AgentId demand = 0;

  bool operator==(const AuxArc&) const = default;
};

/// Directed multigraph on suppliers plus degree-one demands. Parallel arcs are
/// distinct objects told apart by their demand label. Vertices are sorted by
/// (side, id) and arcs by (from, to, demand).
class AuxDigraph {
 public:
  AuxDigraph() = default;
  explicit AuxDigraph(std::vector<AuxArc> arcs);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<AuxArc>& arcs() const { return arcs_; }

  std::size_t index_of(const Vertex& v) const;  // throws IndexOutOfRange
  int out_degree(const Vertex& v) const;
  int in_degree(const Vertex& v) const;
  /// deg⁺ − deg⁻
  int imbalance(const Vertex& v) const;

  /// Alternating edges of the original disagreement set that `arc` stands for.
  static void expand(const AuxArc& arc, std::vector<Vertex>& vertices,
                     std::vector<EdgeLabel>& labels);

  /// Graph without `removed` arcs; vertices left without arcs are dropped.
  AuxDigraph without(const std::vector<bool>& removed) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<AuxArc> arcs_;
  std::map<Vertex, std::size_t> index_;
  std::vector<int> out_;
  std::vector<int> in_;
};

AuxDigraph build_aux_digraph(const DisagreementSet& d);

/// Unit-capacity network over the auxiliary digraph with super-source arcs of
/// capacity deg⁺ − deg⁻ into surplus vertices and super-sink arcs of capacity
/// deg⁻ − deg⁺ out of deficit vertices.
struct FlowNetwork {
  AuxDigraph graph;
  std::vector<int> source_capacity;  // per vertex index, 0 when not in S
  std::vector<int> sink_capacity;    // per vertex index, 0 when not in D
  int c_prime = 0;
};

FlowNetwork build_flow_network(const AuxDigraph& g);

struct FlowResult {
  int flow_value = 0;
  /// Every BFS augmenting path in discovery order, as flow-network node ids
  /// (vertex indices, with source = V and sink = V + 1). May use reverse arcs.
  std::vector<std::vector<std::size_t>> augmenting_paths;
  /// Decomposition of the final flow on original arcs into edge-disjoint
  /// simple directed paths from S to D, as arc indices. Exactly C′ of them.
  std::vector<std::vector<std::size_t>> paths;
  /// Arcs used by `paths`.
  std::vector<bool> arc_in_path;
};

/// Breadth-first augmenting paths over the residual network, then a flow
/// decomposition. Flow loops met during the decomposition are left to the
/// residual graph, which stays balanced.
FlowResult edmonds_karp(const FlowNetwork& n);

/// Splits a balanced digraph into edge-disjoint simple directed cycles by
/// building closed walks and cutting them at the first repeated vertex.
/// Cycles are returned as arc indices of `g`. Throws UnbalancedVertex.
std::vector<std::vector<std::size_t>> eulerian_cycle_decomposition(const AuxDigraph& g);

struct ManyToOneDecomposition {
  AuxDigraph graph;
  FlowNetwork network;
  FlowResult flow;
  AuxDigraph residual;
  std::vector<std::vector<std::size_t>> cycles;  // arc indices into `residual`
  std::vector<AlternatingComponent> components;  // paths first, then cycles
};

ManyToOneDecomposition decompose_many_to_one_detailed(const DisagreementSet& d);
std::vector<AlternatingComponent> decompose_many_to_one(const DisagreementSet& d);

/// Alternating component for a simple path or cycle of arcs.
AlternatingComponent expand_arcs(const std::vector<AuxArc>& arcs, ComponentKind kind);

struct ConditionResult {
  int id = 0;  // 0 = alternation/shape, 1..4 = feasibility conditions
  std::string name;
  bool pass = true;
  std::vector<std::string> witnesses;
};

struct DecompositionReport {
  std::vector<ConditionResult> conditions;

  bool all_pass() const;
  const ConditionResult& condition(int id) const;
};

/// Checks a proposed decomposition: exact-once edge cover, at most C0
/// components per supplier, at most one per demand (or one-to-one agent), no
/// repeated vertex inside a component, plus label alternation. Violations are
/// reported with witnesses, never thrown.
DecompositionReport validate_decomposition(const DisagreementSet& d,
                                           const std::vector<AlternatingComponent>& components,
                                           int capacity);

}  // namespace apd
