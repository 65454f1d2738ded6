#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "apdesign/design_opt.hpp"
#include "apdesign/io.hpp"

namespace {

using namespace apd;

enum Exit : int { kOk = 0, kParse = 2, kFeasibility = 3, kAlignment = 4, kMissing = 5 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicatePartner:
    case ErrorCode::CapacityExceeded:
    case ErrorCode::DemandReused:
    case ErrorCode::UnknownAgent:
    case ErrorCode::InvalidEdge:
    case ErrorCode::ModeMismatch:
    case ErrorCode::PopulationMismatch:
    case ErrorCode::DegreeViolation:
    case ErrorCode::UnbalancedVertex:
      return kFeasibility;
    case ErrorCode::ShapeMismatch:
    case ErrorCode::InfeasibleAssignment:
    case ErrorCode::IndexOutOfRange:
      return kAlignment;
    case ErrorCode::MissingOutcome:
      return kMissing;
    default:
      return kParse;
  }
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    io::write_file(path, content);
  }
}

struct SeedOption {
  std::optional<std::uint64_t> seed;
  bool allow_entropy = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_flag("--allow-entropy", allow_entropy, "Draw a seed from the OS when --seed is absent");
  }

  // Falls back to `fallback` (a seed from a config file), then entropy.
  std::uint64_t resolve(std::optional<std::uint64_t> fallback = std::nullopt) const {
    if (seed) return *seed;
    if (fallback) return *fallback;
    if (!allow_entropy) {
      throw Error(ErrorCode::Parse, "--seed is required (pass --allow-entropy to draw one)");
    }
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed: " << s << "\n";
    return s;
  }
};

struct DecomposeArgs {
  std::string treatment, control, mode = "one-to-one", population, output, disagreement_output;
  int capacity = 1;
};

int run_decompose(const DecomposeArgs& a) {
  const MatchingMode mode = io::parse_mode(a.mode);
  if (a.capacity < 1) throw Error(ErrorCode::Parse, "--capacity must be >= 1");
  const int capacity = mode == MatchingMode::OneToOne ? 1 : a.capacity;
  Matching mt = io::read_matching_csv(a.treatment, mode, capacity);
  Matching mc = io::read_matching_csv(a.control, mode, capacity);
  if (!a.population.empty()) {
    const auto pop = io::population_from_json(io::read_json(a.population));
    io::apply_population(mt, pop);
    io::apply_population(mc, pop);
  }
  const auto d = build_disagreement(mt, mc);
  if (d.empty()) std::cerr << "warning: the two plans agree on every pair; nothing to randomize\n";
  io::ComponentsFile f;
  f.mode = mode;
  f.capacity = capacity;
  f.components = mode == MatchingMode::OneToOne ? decompose_one_to_one(d) : decompose_many_to_one(d);
  if (!a.disagreement_output.empty()) io::write_file(a.disagreement_output, io::disagreement_csv(d));
  emit(a.output, io::dump_json(io::components_to_json(f)));
  return kOk;
}

struct RandomizeArgs {
  std::string components, p_map, output;
  double p = 0.5;
  unsigned threads = 1;
  SeedOption seed;
};

int run_randomize(const RandomizeArgs& a) {
  const auto f = io::components_from_json(io::read_json(a.components));
  DesignParams params;
  params.p = a.p;
  if (!a.p_map.empty()) params.p_overrides = io::p_map_from_json(io::read_json(a.p_map));
  for (const auto& [index, p] : params.p_overrides) {
    if (index >= f.components.size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "p-map names component " + std::to_string(index) + " but there are only " +
                      std::to_string(f.components.size()));
    }
  }
  params.seed = a.seed.resolve();
  const auto assignment = ap_randomize(f.components, params, a.threads);
  emit(a.output, io::dump_json(io::assignment_to_json(assignment)));
  return kOk;
}

struct EstimateArgs {
  std::string components, assignment, outcomes, output = "report.json";
  double alpha = 0.95;
  double n = 0.0;
  unsigned threads = 1;
};

int run_estimate(const EstimateArgs& a) {
  const auto f = io::components_from_json(io::read_json(a.components));
  const auto assignment = io::assignment_from_json(io::read_json(a.assignment));
  const auto y = io::read_outcomes_csv(a.outcomes, f.mode);
  const auto report = estimate(f.components, assignment, y, a.n, a.alpha, a.threads);
  emit(a.output, io::dump_json(io::report_to_json(report)));
  std::printf("tau_hat=%.6f ci=[%.6f,%.6f]\n", report.tau_hat, report.ci_lo, report.ci_hi);
  return kOk;
}

struct OptimizeArgs {
  std::string kind = "path";
  std::size_t length = 0;
  bool table = false;
};

std::string design_row(const OptimalDesign& d) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s,%zu,%.8f,%.8f\n", std::string(to_string(d.kind)).c_str(), d.k,
                d.p_star, d.value_per_edge);
  return buf;
}

int run_optimize(const OptimizeArgs& a) {
  std::string out = "kind,k,p_star,value_per_edge\n";
  if (a.table) {
    for (const auto& row : optimal_design_table()) out += design_row(row);
  } else {
    if (a.length == 0) throw Error(ErrorCode::Parse, "--length is required without --table");
    ComponentKind kind;
    if (a.kind == "path") {
      kind = ComponentKind::Path;
    } else if (a.kind == "cycle") {
      kind = ComponentKind::Cycle;
    } else {
      throw Error(ErrorCode::Parse, "--kind must be path or cycle");
    }
    out += design_row(optimize_p(kind, a.length));
  }
  std::cout << out;
  return kOk;
}

struct SimulateArgs {
  std::string config, output, qq;
  unsigned threads = 1;
  SeedOption seed;
};

int run_simulate(const SimulateArgs& a) {
  const auto j = io::read_json(a.config);
  const auto base = std::filesystem::path(a.config).parent_path().string();
  auto spec = io::scenario_from_json(j, base);
  std::optional<std::uint64_t> config_seed;
  if (j.contains("seed")) config_seed = spec.params.seed;
  spec.params.seed = a.seed.resolve(config_seed);
  const auto report = run_simulation(spec, a.threads);
  if (!a.qq.empty()) {
    if (!report.normality) {
      throw Error(ErrorCode::TooFewSamples, "Q-Q output needs at least 100 replications");
    }
    io::write_file(a.qq, io::qq_csv(*report.normality));
  }
  emit(a.output, io::dump_json(io::sim_report_to_json(report)));
  return kOk;
}

struct ValidateArgs {
  std::string components, disagreement, output;
  int capacity = 1;
};

int run_validate(const ValidateArgs& a) {
  const auto f = io::components_from_json(io::read_json(a.components));
  const auto d = io::read_disagreement_csv(a.disagreement, a.capacity);
  if (d.mode != f.mode) {
    throw Error(ErrorCode::ModeMismatch, "disagreement file and components differ in mode");
  }
  const auto report = validate_decomposition(d, f.components, a.capacity);
  emit(a.output, io::dump_json(io::validation_to_json(report)));
  if (!report.all_pass()) {
    for (const auto& c : report.conditions) {
      for (const auto& w : c.witnesses) std::cerr << "condition " << c.id << ": " << w << "\n";
    }
    return kFeasibility;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Alternating path randomized design for comparing two matching plans"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* cmd_dec = app.add_subcommand("decompose", "Split the disagreement set into components");
  cmd_dec->add_option("--treatment", dec.treatment, "Treatment matching CSV")->required();
  cmd_dec->add_option("--control", dec.control, "Control matching CSV")->required();
  cmd_dec->add_option("--mode", dec.mode, "one-to-one or many-to-one")
      ->check(CLI::IsMember({"one-to-one", "many-to-one"}));
  cmd_dec->add_option("--capacity", dec.capacity, "Supplier capacity C0 (many-to-one)");
  cmd_dec->add_option("--population", dec.population, "Population sidecar JSON");
  cmd_dec->add_option("--disagreement-output", dec.disagreement_output,
                      "Also write the labeled disagreement set as CSV");
  cmd_dec->add_option("-o,--output", dec.output, "Components JSON (default stdout)");

  RandomizeArgs rnd;
  auto* cmd_rnd = app.add_subcommand("randomize", "Draw an assignment");
  cmd_rnd->add_option("--components", rnd.components, "Components JSON")->required();
  cmd_rnd->add_option("--p", rnd.p, "Conditional selection probability in (0, 1]")->required();
  cmd_rnd->add_option("--p-map", rnd.p_map, "JSON object of per-component p overrides");
  cmd_rnd->add_option("--threads", rnd.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_rnd->add_option("-o,--output", rnd.output, "Assignment JSON (default stdout)");
  rnd.seed.attach(cmd_rnd);

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand("estimate", "Point estimate, variance bound and interval");
  cmd_est->add_option("--components", est.components, "Components JSON")->required();
  cmd_est->add_option("--assignment", est.assignment, "Assignment JSON")->required();
  cmd_est->add_option("--outcomes", est.outcomes, "Observed outcomes CSV")->required();
  cmd_est->add_option("--alpha", est.alpha, "Confidence level");
  cmd_est->add_option("--n", est.n, "Estimand normalizer")->required();
  cmd_est->add_option("--threads", est.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_est->add_option("-o,--output", est.output, "Report JSON");

  OptimizeArgs opt;
  auto* cmd_opt = app.add_subcommand("optimize-p", "Minimax conditional probability");
  cmd_opt->add_option("--kind", opt.kind, "path or cycle")
      ->check(CLI::IsMember({"path", "cycle"}));
  cmd_opt->add_option("--length", opt.length, "Number of edges k");
  cmd_opt->add_flag("--table", opt.table, "Emit the standard grid as CSV");

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo study of a scenario");
  cmd_sim->add_option("--config", sim.config, "Scenario JSON")->required();
  cmd_sim->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_sim->add_option("--qq", sim.qq, "Write Q-Q pairs CSV");
  cmd_sim->add_option("-o,--output", sim.output, "Report JSON (default stdout)");
  sim.seed.attach(cmd_sim);

  ValidateArgs val;
  auto* cmd_val = app.add_subcommand("validate", "Check a many-to-one decomposition");
  cmd_val->add_option("--components", val.components, "Components JSON")->required();
  cmd_val->add_option("--disagreement", val.disagreement, "Labeled disagreement CSV")->required();
  cmd_val->add_option("--capacity", val.capacity, "Supplier capacity C0")->required();
  cmd_val->add_option("-o,--output", val.output, "Report JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*cmd_dec) return run_decompose(dec);
    if (*cmd_rnd) return run_randomize(rnd);
    if (*cmd_est) return run_estimate(est);
    if (*cmd_opt) return run_optimize(opt);
    if (*cmd_sim) return run_simulate(sim);
    if (*cmd_val) return run_validate(val);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
