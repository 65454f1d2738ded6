#include "apdesign/decomposition.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace apd {

std::string_view to_string(EdgeLabel label) { return label == EdgeLabel::T ? "T" : "C"; }

std::string_view to_string(ComponentKind kind) {
  return kind == ComponentKind::Path ? "path" : "cycle";
}

MatchEdge AlternatingComponent::edge(std::size_t j) const {
  const Vertex& u = vertices.at(j);
  const Vertex& v = vertices.at(j + 1);
  if (u.side == Side::Agent) return canonical_pair(u.id, v.id);
  return u.side == Side::Supplier ? MatchEdge{u.id, v.id} : MatchEdge{v.id, u.id};
}

void check_component_shape(const AlternatingComponent& c) {
  const std::size_t k = c.k();
  if (k == 0 || c.vertices.size() != k + 1) {
    throw Error(ErrorCode::DegreeViolation, "component must have k >= 1 edges and k + 1 vertices");
  }
  for (std::size_t j = 1; j < k; ++j) {
    if (c.labels[j] == c.labels[j - 1]) {
      throw Error(ErrorCode::DegreeViolation,
                  "labels do not alternate at edge " + std::to_string(j + 1));
    }
  }
  const bool closed = c.vertices.front() == c.vertices.back();
  if (c.is_cycle()) {
    if (!closed) throw Error(ErrorCode::DegreeViolation, "cycle is not closed");
    if (k % 2 != 0 || k < 4) {
      throw Error(ErrorCode::DegreeViolation,
                  "cycle length " + std::to_string(k) + " is not an even number >= 4");
    }
  } else if (closed) {
    throw Error(ErrorCode::DegreeViolation, "path starts and ends at the same vertex");
  }
}

namespace {

struct Incidence {
  std::optional<AgentId> t;
  std::optional<AgentId> c;

  int degree() const { return static_cast<int>(t.has_value()) + static_cast<int>(c.has_value()); }
  std::optional<AgentId> via(EdgeLabel l) const { return l == EdgeLabel::T ? t : c; }
};

EdgeLabel other(EdgeLabel l) { return l == EdgeLabel::T ? EdgeLabel::C : EdgeLabel::T; }

void attach(std::map<AgentId, Incidence>& inc, AgentId self, AgentId partner, EdgeLabel l) {
  auto& slot = l == EdgeLabel::T ? inc[self].t : inc[self].c;
  if (slot) {
    throw Error(ErrorCode::DegreeViolation,
                "agent " + std::to_string(self) + " has two " + std::string(to_string(l)) +
                    "-edges");
  }
  slot = partner;
}

AgentId min_agent(const AlternatingComponent& c) {
  AgentId m = c.vertices.front().id;
  for (const auto& v : c.vertices) m = std::min(m, v.id);
  return m;
}

}  // namespace

std::vector<AlternatingComponent> decompose_one_to_one(const DisagreementSet& d) {
  std::map<AgentId, Incidence> inc;
  for (const auto& e : d.t_edges) {
    attach(inc, e.a, e.b, EdgeLabel::T);
    attach(inc, e.b, e.a, EdgeLabel::T);
  }
  for (const auto& e : d.c_edges) {
    attach(inc, e.a, e.b, EdgeLabel::C);
    attach(inc, e.b, e.a, EdgeLabel::C);
  }
  for (const auto& [agent, in] : inc) {
    if (in.t && in.c && *in.t == *in.c) {
      throw Error(ErrorCode::DegreeViolation,
                  "pair (" + std::to_string(agent) + "," + std::to_string(*in.t) +
                      ") is both a t-match and a c-match");
    }
  }

  std::set<AgentId> visited;
  std::vector<AlternatingComponent> out;

  // Walks from `start` leaving along `first`, until the walk stops or closes.
  auto walk = [&](AgentId start, EdgeLabel first) {
    AlternatingComponent comp;
    comp.vertices.push_back({Side::Agent, start});
    visited.insert(start);
    AgentId cur = start;
    EdgeLabel label = first;
    while (auto next = inc.at(cur).via(label)) {
      comp.labels.push_back(label);
      comp.vertices.push_back({Side::Agent, *next});
      if (*next == start) {
        comp.kind = ComponentKind::Cycle;
        break;
      }
      visited.insert(*next);
      cur = *next;
      label = other(label);
    }
    return comp;
  };

  // Paths first: every endpoint has degree one. Ascending iteration means a
  // path is always entered from its smaller endpoint.
  for (const auto& [agent, in] : inc) {
    if (in.degree() == 1 && !visited.contains(agent)) {
      out.push_back(walk(agent, in.t ? EdgeLabel::T : EdgeLabel::C));
    }
  }
  // Remaining unvisited agents all lie on cycles.
  for (const auto& [agent, in] : inc) {
    if (!visited.contains(agent)) {
      out.push_back(walk(agent, EdgeLabel::T));
    }
  }

  for (const auto& c : out) check_component_shape(c);
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return min_agent(x) < min_agent(y);
  });
  return out;
}

}  // namespace apd
