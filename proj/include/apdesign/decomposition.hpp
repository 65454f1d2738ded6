#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "apdesign/matching.hpp"

namespace apd {

enum class EdgeLabel : std::uint8_t { T, C };
enum class ComponentKind : std::uint8_t { Path, Cycle };

std::string_view to_string(EdgeLabel label);
std::string_view to_string(ComponentKind kind);

/// An alternating path or cycle. `vertices` has k + 1 entries; for a cycle
/// the last entry repeats the first. `labels[j]` labels the edge between
/// vertices[j] and vertices[j + 1].
struct AlternatingComponent {
  ComponentKind kind = ComponentKind::Path;
  std::vector<Vertex> vertices;
  std::vector<EdgeLabel> labels;

  std::size_t k() const { return labels.size(); }
  bool is_cycle() const { return kind == ComponentKind::Cycle; }

  /// Canonical outcome key of edge j (0-based).
  MatchEdge edge(std::size_t j) const;

  bool operator==(const AlternatingComponent&) const = default;
};

/// Structural checks shared by both decompositions: vertex count, label
/// alternation, closure and even length for cycles. Throws DegreeViolation.
void check_component_shape(const AlternatingComponent& c);

/// Unique decomposition of a one-to-one disagreement set into maximal
/// alternating paths and cycles.
///
/// Output is canonical: a path starts at its smaller endpoint, a cycle starts
/// at its smallest agent and leaves along its T edge, and components are
/// sorted by their smallest agent id.
std::vector<AlternatingComponent> decompose_one_to_one(const DisagreementSet& d);

}  // namespace apd
