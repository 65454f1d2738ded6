#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apdesign/error.hpp"

namespace apd {

/// Positive, 1-based agent identifier. Zero is reserved for "unmatched".
using AgentId = std::uint32_t;

enum class MatchingMode { OneToOne, ManyToOne };

std::string_view to_string(MatchingMode mode);

/// Which population a vertex belongs to. One-to-one instances only use
/// Agent; many-to-one instances distinguish suppliers from demands because
/// their identifiers live in separate namespaces.
enum class Side : std::uint8_t { Agent, Supplier, Demand };

struct Vertex {
  Side side = Side::Agent;
  AgentId id = 0;

  auto operator<=>(const Vertex&) const = default;
};

std::string to_string(const Vertex& v);

/// A matched pair. One-to-one edges are canonical with a < b; many-to-one
/// edges are (supplier, demand).
struct MatchEdge {
  AgentId a = 0;
  AgentId b = 0;

  auto operator<=>(const MatchEdge&) const = default;
};

std::string to_string(const MatchEdge& e);

/// Canonical one-to-one edge: the lower id goes first.
MatchEdge canonical_pair(AgentId x, AgentId y);

struct Matching {
  MatchingMode mode = MatchingMode::OneToOne;
  std::vector<MatchEdge> edges;
  int capacity = 1;  // C0, many-to-one only

  // One-to-one population.
  std::vector<AgentId> agents;
  // Many-to-one population.
  std::vector<AgentId> suppliers;
  std::vector<AgentId> demands;
};

/// Potential outcomes keyed by canonical edge.
struct OutcomeTable {
  std::map<MatchEdge, double> entries;
  std::optional<double> bound;

  void set(const MatchEdge& e, double y);
  std::optional<double> find(const MatchEdge& e) const;
  double at(const MatchEdge& e) const;  // throws MissingOutcome
};

struct DisagreementSet {
  MatchingMode mode = MatchingMode::OneToOne;
  int capacity = 1;
  std::vector<MatchEdge> t_edges;  // sorted
  std::vector<MatchEdge> c_edges;  // sorted

  std::size_t size() const { return t_edges.size() + c_edges.size(); }
  bool empty() const { return t_edges.empty() && c_edges.empty(); }
};

/// Checks feasibility: distinct partners (one-to-one), supplier capacity and
/// demand uniqueness (many-to-one), endpoints within the population.
/// Throws apd::Error on the first violation found in edge order.
void validate_matching(const Matching& m);

/// Set differences mt \ mc and mc \ mt. Inputs are validated first.
DisagreementSet build_disagreement(const Matching& mt, const Matching& mc);

/// Shared pairs mt ∩ mc, sorted.
std::vector<MatchEdge> shared_edges(const Matching& mt, const Matching& mc);

/// Ground-truth difference in average outcomes, divided by `normalizer`
/// (N pairs for one-to-one, C0 * N suppliers or M demands for many-to-one).
double ate_ground_truth(const Matching& mt, const Matching& mc,
                        const OutcomeTable& y, double normalizer);

enum class ManyToOneNormalizer { CapacityTimesSuppliers, Demands };

/// Default normalizer of the estimand for a matching pair.
double default_normalizer(
    const Matching& mt, const Matching& mc,
    ManyToOneNormalizer many_to_one = ManyToOneNormalizer::CapacityTimesSuppliers);

}  // namespace apd
