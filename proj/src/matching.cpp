#include "apdesign/matching.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace apd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicatePartner: return "DuplicatePartner";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::DemandReused: return "DemandReused";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::PopulationMismatch: return "PopulationMismatch";
    case ErrorCode::MissingOutcome: return "MissingOutcome";
    case ErrorCode::OutcomeOutOfRange: return "OutcomeOutOfRange";
    case ErrorCode::DegreeViolation: return "DegreeViolation";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InfeasibleAssignment: return "InfeasibleAssignment";
    case ErrorCode::UnbalancedVertex: return "UnbalancedVertex";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

std::string_view to_string(MatchingMode mode) {
  return mode == MatchingMode::OneToOne ? "one-to-one" : "many-to-one";
}

std::string to_string(const Vertex& v) {
  switch (v.side) {
    case Side::Supplier: return "s" + std::to_string(v.id);
    case Side::Demand: return "d" + std::to_string(v.id);
    case Side::Agent: break;
  }
  return std::to_string(v.id);
}

std::string to_string(const MatchEdge& e) {
  return "(" + std::to_string(e.a) + "," + std::to_string(e.b) + ")";
}

MatchEdge canonical_pair(AgentId x, AgentId y) {
  return x < y ? MatchEdge{x, y} : MatchEdge{y, x};
}

void OutcomeTable::set(const MatchEdge& e, double y) {
  if (bound && (y < 0.0 || y > *bound)) {
    throw Error(ErrorCode::OutcomeOutOfRange,
                "outcome " + std::to_string(y) + " for " + to_string(e) +
                    " outside [0, " + std::to_string(*bound) + "]");
  }
  entries[e] = y;
}

std::optional<double> OutcomeTable::find(const MatchEdge& e) const {
  auto it = entries.find(e);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

double OutcomeTable::at(const MatchEdge& e) const {
  auto it = entries.find(e);
  if (it == entries.end()) {
    throw Error(ErrorCode::MissingOutcome, "missing outcome for " + to_string(e));
  }
  return it->second;
}

namespace {

bool contains_sorted(const std::vector<AgentId>& ids, AgentId id) {
  return std::binary_search(ids.begin(), ids.end(), id);
}

std::vector<AgentId> sorted_copy(std::vector<AgentId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void validate_one_to_one(const Matching& m) {
  const auto population = sorted_copy(m.agents);
  std::unordered_map<AgentId, AgentId> partner;
  for (const auto& e : m.edges) {
    if (e.a == 0 || e.b == 0 || e.a == e.b) {
      throw Error(ErrorCode::InvalidEdge, "invalid edge " + to_string(e));
    }
    for (AgentId id : {e.a, e.b}) {
      if (!population.empty() && !contains_sorted(population, id)) {
        throw Error(ErrorCode::UnknownAgent,
                    "agent " + std::to_string(id) + " is not in the population");
      }
    }
    for (auto [self, other] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      auto [it, inserted] = partner.emplace(self, other);
      if (!inserted) {
        throw Error(ErrorCode::DuplicatePartner,
                    "agent " + std::to_string(self) + " matched to both " +
                        std::to_string(it->second) + " and " + std::to_string(other));
      }
    }
  }
}

void validate_many_to_one(const Matching& m) {
  if (m.capacity < 1) {
    throw Error(ErrorCode::CapacityExceeded, "capacity must be positive");
  }
  const auto suppliers = sorted_copy(m.suppliers);
  const auto demands = sorted_copy(m.demands);
  std::unordered_map<AgentId, int> load;
  std::unordered_map<AgentId, AgentId> served_by;
  std::set<MatchEdge> seen;
  for (const auto& e : m.edges) {
    if (e.a == 0 || e.b == 0) {
      throw Error(ErrorCode::InvalidEdge, "invalid edge " + to_string(e));
    }
    if (!seen.insert(e).second) {
      throw Error(ErrorCode::InvalidEdge, "edge " + to_string(e) + " listed twice");
    }
    if (!suppliers.empty() && !contains_sorted(suppliers, e.a)) {
      throw Error(ErrorCode::UnknownAgent,
                  "supplier " + std::to_string(e.a) + " is not in the population");
    }
    if (!demands.empty() && !contains_sorted(demands, e.b)) {
      throw Error(ErrorCode::UnknownAgent,
                  "demand " + std::to_string(e.b) + " is not in the population");
    }
    if (++load[e.a] > m.capacity) {
      throw Error(ErrorCode::CapacityExceeded,
                  "supplier " + std::to_string(e.a) + " exceeds capacity " +
                      std::to_string(m.capacity));
    }
    auto [it, inserted] = served_by.emplace(e.b, e.a);
    if (!inserted) {
      throw Error(ErrorCode::DemandReused,
                  "demand " + std::to_string(e.b) + " served by both " +
                      std::to_string(it->second) + " and " + std::to_string(e.a));
    }
  }
}

std::vector<MatchEdge> sorted_edges(const Matching& m) {
  std::vector<MatchEdge> edges;
  edges.reserve(m.edges.size());
  for (const auto& e : m.edges) {
    edges.push_back(m.mode == MatchingMode::OneToOne ? canonical_pair(e.a, e.b) : e);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

void validate_matching(const Matching& m) {
  if (m.mode == MatchingMode::OneToOne) {
    validate_one_to_one(m);
  } else {
    validate_many_to_one(m);
  }
}

DisagreementSet build_disagreement(const Matching& mt, const Matching& mc) {
  if (mt.mode != mc.mode) {
    throw Error(ErrorCode::ModeMismatch, "treatment and control use different modes");
  }
  if (mt.mode == MatchingMode::ManyToOne && mt.capacity != mc.capacity) {
    throw Error(ErrorCode::ModeMismatch, "treatment and control capacities differ");
  }
  if (sorted_copy(mt.agents) != sorted_copy(mc.agents) ||
      sorted_copy(mt.suppliers) != sorted_copy(mc.suppliers) ||
      sorted_copy(mt.demands) != sorted_copy(mc.demands)) {
    throw Error(ErrorCode::PopulationMismatch,
                "treatment and control are defined on different populations");
  }
  validate_matching(mt);
  validate_matching(mc);

  const auto t = sorted_edges(mt);
  const auto c = sorted_edges(mc);
  DisagreementSet d;
  d.mode = mt.mode;
  d.capacity = mt.capacity;
  std::set_difference(t.begin(), t.end(), c.begin(), c.end(), std::back_inserter(d.t_edges));
  std::set_difference(c.begin(), c.end(), t.begin(), t.end(), std::back_inserter(d.c_edges));
  return d;
}

std::vector<MatchEdge> shared_edges(const Matching& mt, const Matching& mc) {
  const auto t = sorted_edges(mt);
  const auto c = sorted_edges(mc);
  std::vector<MatchEdge> out;
  std::set_intersection(t.begin(), t.end(), c.begin(), c.end(), std::back_inserter(out));
  return out;
}

double ate_ground_truth(const Matching& mt, const Matching& mc, const OutcomeTable& y,
                        double normalizer) {
  if (!(normalizer > 0.0)) {
    throw Error(ErrorCode::ShapeMismatch, "normalizer must be positive");
  }
  double sum_t = 0.0;
  double sum_c = 0.0;
  for (const auto& e : sorted_edges(mt)) sum_t += y.at(e);
  for (const auto& e : sorted_edges(mc)) sum_c += y.at(e);
  return (sum_t - sum_c) / normalizer;
}

double default_normalizer(const Matching& mt, const Matching& mc,
                          ManyToOneNormalizer many_to_one) {
  if (mt.mode == MatchingMode::OneToOne) {
    if (!mt.agents.empty()) return static_cast<double>(mt.agents.size()) / 2.0;
    return static_cast<double>(std::max(mt.edges.size(), mc.edges.size()));
  }
  if (many_to_one == ManyToOneNormalizer::Demands) {
    if (!mt.demands.empty()) return static_cast<double>(mt.demands.size());
    std::set<AgentId> demands;
    for (const auto& e : mt.edges) demands.insert(e.b);
    for (const auto& e : mc.edges) demands.insert(e.b);
    return static_cast<double>(demands.size());
  }
  std::set<AgentId> suppliers(mt.suppliers.begin(), mt.suppliers.end());
  if (suppliers.empty()) {
    for (const auto& e : mt.edges) suppliers.insert(e.a);
    for (const auto& e : mc.edges) suppliers.insert(e.a);
  }
  return static_cast<double>(mt.capacity) * static_cast<double>(suppliers.size());
}

}  // namespace apd
