#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apdesign/design.hpp"
#include "apdesign/estimation.hpp"

namespace apd {

// ---------------------------------------------------------------------------
// Exhaustive enumeration of the sequential design.
// ---------------------------------------------------------------------------

struct Realization {
  std::vector<std::uint8_t> w;
  long double probability = 0.0L;
};

/// Every realization with positive probability, in increasing bitmask order
/// (bit j of the mask is W_{j+1}). Built by multiplying the conditional
/// rules directly and shares no code with the sampler. Throws TooLarge for
/// k > 20.
std::vector<Realization> enumerate_oracle(ComponentKind kind, std::size_t k, double p);

// ---------------------------------------------------------------------------
// Scenario generators.
// ---------------------------------------------------------------------------

/// Plans for n workers (1..n) and n jobs (n+1..2n): treatment pairs worker i
/// with job i, control with job i+1 (mod n). The disagreement set is one
/// cycle of length 2n for n >= 2.
std::pair<Matching, Matching> cyclic_shift_plans(std::size_t n);

/// Two independent random many-to-one plans. Each demand is matched with
/// probability `fill` to a uniformly chosen supplier that still has room.
std::pair<Matching, Matching> random_many_to_one_plans(std::size_t suppliers, std::size_t demands,
                                                       int capacity, rng::Stream& rng,
                                                       double fill = 0.9);

/// Random one-to-one disagreement set made of `count` disjoint components.
/// Each is a cycle with probability `cycle_fraction` (length rounded up to an
/// even number >= 4), otherwise a path; lengths are uniform on
/// [min_length, max_length].
std::pair<Matching, Matching> random_one_to_one_plans(std::size_t count, double cycle_fraction,
                                                      std::size_t min_length,
                                                      std::size_t max_length, rng::Stream& rng);

enum class GeneratorKind { FixedComponents, RandomOneToOne, RandomManyToOne, CyclicShift };
enum class OutcomeModel { ConstantB, UniformOnZeroB, TableFromFile };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::CyclicShift;
  std::string components_path;  // FixedComponents
  std::size_t components = 100;  // RandomOneToOne
  double cycle_fraction = 0.0;
  std::size_t min_length = 1;
  std::size_t max_length = 4;
  std::size_t suppliers = 10;  // RandomManyToOne
  std::size_t demands = 30;
  int capacity = 2;
  std::size_t n = 50;  // CyclicShift
};

struct OutcomeSpec {
  OutcomeModel model = OutcomeModel::ConstantB;
  double bound = 1.0;
  std::string path;  // TableFromFile
};

struct ScenarioSpec {
  GeneratorSpec generator;
  OutcomeSpec outcomes;
  DesignParams params;
  std::size_t replications = 1000;
  double alpha = 0.95;
  std::optional<double> normalizer;
};

/// A generated experiment with complete potential outcomes.
struct Instance {
  MatchingMode mode = MatchingMode::OneToOne;
  int capacity = 1;
  std::vector<AlternatingComponent> components;
  OutcomeTable y;
  double n = 1.0;
  double tau = 0.0;
  double ybar_t = 0.0;  // plan totals divided by n
  double ybar_c = 0.0;
};

Instance build_instance(const ScenarioSpec& spec);

/// Instance for a fixed pair of plans under the given outcomes.
Instance instance_from_plans(const Matching& mt, const Matching& mc, const OutcomeTable& y,
                             std::optional<double> normalizer = std::nullopt);

// ---------------------------------------------------------------------------
// Monte Carlo.
// ---------------------------------------------------------------------------

struct NormalityResult {
  std::size_t samples = 0;
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
  std::vector<std::pair<double, double>> qq;  // (empirical, normal) quantiles
};

/// Kolmogorov–Smirnov distance between the standardized samples and N(0, 1);
/// passes iff the distance is below 1.63 / sqrt(n). Throws TooFewSamples for
/// fewer than 100 samples.
NormalityResult normality_check(std::span<const double> samples);

struct SimReport {
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t components = 0;
  std::size_t disagreement_edges = 0;
  double n = 1.0;
  double tau = 0.0;
  double mean_tau_hat = 0.0;
  double bias = 0.0;
  std::optional<double> empirical_variance;  // empty for a single replication
  double mean_sigma2_hat = 0.0;
  double true_variance = 0.0;
  double variance_upper_bound = 0.0;
  double naive_variance = 0.0;
  std::optional<double> naive_empirical_variance;
  double ci_coverage = 0.0;
  std::optional<NormalityResult> normality;
  std::optional<NormalityResult> naive_normality;
  std::string note = "synthetic surrogate";

  std::vector<double> tau_hats;
  std::vector<double> naive_tau_hats;
};

/// Replication r draws its design from substream (seed, r); results are
/// reduced in replication order, so the report does not depend on `threads`.
SimReport run_simulation(const ScenarioSpec& spec, unsigned threads = 1);
SimReport run_simulation(const Instance& instance, const ScenarioSpec& spec,
                         unsigned threads = 1);

}  // namespace apd
