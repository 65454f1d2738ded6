#pragma once

#include <vector>

#include "apdesign/decomposition.hpp"
#include "apdesign/matching.hpp"
#include "apdesign/rng.hpp"

namespace testing_support {

// Alternating component on agents 1..k+1 (cycles close back on agent 1).
inline apd::AlternatingComponent make_component(apd::ComponentKind kind, std::size_t k,
                                                apd::EdgeLabel first = apd::EdgeLabel::T) {
  apd::AlternatingComponent c;
  c.kind = kind;
  for (std::size_t j = 0; j <= k; ++j) {
    const std::size_t id = (kind == apd::ComponentKind::Cycle && j == k) ? 1 : j + 1;
    c.vertices.push_back({apd::Side::Agent, static_cast<apd::AgentId>(id)});
  }
  for (std::size_t j = 0; j < k; ++j) {
    const bool same = j % 2 == 0;
    c.labels.push_back(same ? first : (first == apd::EdgeLabel::T ? apd::EdgeLabel::C
                                                                  : apd::EdgeLabel::T));
  }
  return c;
}

inline apd::Matching one_to_one(std::vector<std::pair<apd::AgentId, apd::AgentId>> pairs,
                                std::vector<apd::AgentId> agents = {}) {
  apd::Matching m;
  m.mode = apd::MatchingMode::OneToOne;
  for (auto [a, b] : pairs) m.edges.push_back(apd::canonical_pair(a, b));
  m.agents = std::move(agents);
  return m;
}

inline apd::Matching many_to_one(std::vector<std::pair<apd::AgentId, apd::AgentId>> pairs,
                                 int capacity) {
  apd::Matching m;
  m.mode = apd::MatchingMode::ManyToOne;
  m.capacity = capacity;
  for (auto [s, d] : pairs) m.edges.push_back({s, d});
  return m;
}

inline apd::Matching ten_agent_treatment() {
  return one_to_one({{1, 6}, {2, 7}, {3, 8}, {4, 9}, {5, 10}},
                    {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
}

inline apd::Matching ten_agent_control() {
  return one_to_one({{1, 7}, {2, 6}, {3, 9}, {4, 8}, {5, 10}},
                    {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
}

// Random perfect matching on agents 1..2n.
inline apd::Matching random_perfect(std::size_t n, apd::rng::Stream& rng) {
  std::vector<apd::AgentId> ids;
  for (apd::AgentId a = 1; a <= 2 * n; ++a) ids.push_back(a);
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
    std::swap(ids[i], ids[std::min(j, i)]);
  }
  apd::Matching m;
  m.mode = apd::MatchingMode::OneToOne;
  m.agents.assign(ids.begin(), ids.end());
  std::sort(m.agents.begin(), m.agents.end());
  for (std::size_t i = 0; i < ids.size(); i += 2) {
    m.edges.push_back(apd::canonical_pair(ids[i], ids[i + 1]));
  }
  return m;
}

// Drops each edge with probability `drop`, leaving a partial matching.
inline apd::Matching thin(apd::Matching m, double drop, apd::rng::Stream& rng) {
  std::vector<apd::MatchEdge> kept;
  for (const auto& e : m.edges) {
    if (!rng.bernoulli(drop)) kept.push_back(e);
  }
  m.edges = std::move(kept);
  return m;
}

}  // namespace testing_support
