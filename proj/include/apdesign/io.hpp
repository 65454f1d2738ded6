#pragma once

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "apdesign/design.hpp"
#include "apdesign/estimation.hpp"
#include "apdesign/many_to_one.hpp"
#include "apdesign/sim.hpp"

namespace apd::io {

using nlohmann::json;

/// Whole file as a string; Parse error if it cannot be read.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

json parse_json(std::string_view text, const std::string& source);
json read_json(const std::string& path);
/// Two-space indented JSON with a trailing newline.
std::string dump_json(const json& j);

std::string_view mode_name(MatchingMode mode);
MatchingMode parse_mode(std::string_view name);  // "one-to-one" | "many-to-one"

// ---------------------------------------------------------------------------
// CSV inputs. Errors carry "source:line:" prefixes.
// ---------------------------------------------------------------------------

/// Header `a,b` (one-to-one) or `supplier,demand` (many-to-one).
Matching parse_matching_csv(std::string_view text, MatchingMode mode, int capacity,
                            const std::string& source);
Matching read_matching_csv(const std::string& path, MatchingMode mode, int capacity);

/// Header `a,b,y`. Many-to-one rows are (supplier, demand, y).
OutcomeTable parse_outcomes_csv(std::string_view text, MatchingMode mode,
                                const std::string& source);
OutcomeTable read_outcomes_csv(const std::string& path, MatchingMode mode);

/// Header `a,b,label` or `supplier,demand,label`; label is t or c.
DisagreementSet parse_disagreement_csv(std::string_view text, int capacity,
                                       const std::string& source);
DisagreementSet read_disagreement_csv(const std::string& path, int capacity);

std::string disagreement_csv(const DisagreementSet& d);

// ---------------------------------------------------------------------------
// Population sidecar: {"mode", "capacity", "agents"} or
// {"mode", "capacity", "suppliers", "demands"}.
// ---------------------------------------------------------------------------

struct Population {
  MatchingMode mode = MatchingMode::OneToOne;
  int capacity = 1;
  std::vector<AgentId> agents;
  std::vector<AgentId> suppliers;
  std::vector<AgentId> demands;
};

Population population_from_json(const json& j);
/// Copies the population lists into `m`; ModeMismatch if mode or capacity differ.
void apply_population(Matching& m, const Population& pop);

// ---------------------------------------------------------------------------
// Pipeline artifacts.
// ---------------------------------------------------------------------------

struct ComponentsFile {
  MatchingMode mode = MatchingMode::OneToOne;
  int capacity = 1;
  std::vector<AlternatingComponent> components;
};

json components_to_json(const ComponentsFile& f);
ComponentsFile components_from_json(const json& j);

json assignment_to_json(const Assignment& a);
Assignment assignment_from_json(const json& j);

/// Per-component p overrides: {"<index>": p, ...}.
std::map<std::size_t, double> p_map_from_json(const json& j);

json report_to_json(const EstimateReport& r);
json validation_to_json(const DecompositionReport& r);

ScenarioSpec scenario_from_json(const json& j, const std::string& base_dir);
json sim_report_to_json(const SimReport& r);
/// `empirical_q,normal_q` rows.
std::string qq_csv(const NormalityResult& r);

}  // namespace apd::io
