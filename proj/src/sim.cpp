#include "apdesign/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "apdesign/io.hpp"
#include "apdesign/many_to_one.hpp"
#include "apdesign/parallel.hpp"

namespace apd {

namespace {

// Substream indices reserved for instance generation; replication r uses r.
constexpr std::uint64_t kGeneratorStream = (1ULL << 63) + 1;
constexpr std::uint64_t kOutcomeStream = (1ULL << 63) + 2;
constexpr std::uint64_t kNaiveStream = ~0ULL;

std::size_t uniform_index(rng::Stream& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
}

std::vector<AgentId> agents_of(const std::vector<AlternatingComponent>& comps) {
  std::set<AgentId> ids;
  for (const auto& c : comps) {
    for (const auto& v : c.vertices) ids.insert(v.id);
  }
  return {ids.begin(), ids.end()};
}

// Plans whose disagreement set is exactly the given components.
std::pair<Matching, Matching> plans_from_components(const io::ComponentsFile& f) {
  Matching mt;
  mt.mode = f.mode;
  mt.capacity = f.capacity;
  Matching mc = mt;
  std::set<AgentId> suppliers;
  std::set<AgentId> demands;
  for (const auto& c : f.components) {
    for (std::size_t j = 0; j < c.k(); ++j) {
      const MatchEdge e = c.edge(j);
      (c.labels[j] == EdgeLabel::T ? mt : mc).edges.push_back(e);
      suppliers.insert(e.a);
      demands.insert(e.b);
    }
  }
  if (f.mode == MatchingMode::OneToOne) {
    mt.agents = agents_of(f.components);
  } else {
    mt.suppliers.assign(suppliers.begin(), suppliers.end());
    mt.demands.assign(demands.begin(), demands.end());
  }
  mc.agents = mt.agents;
  mc.suppliers = mt.suppliers;
  mc.demands = mt.demands;
  return {mt, mc};
}

Instance make_instance(const Matching& mt, const Matching& mc, const OutcomeTable& y,
                       std::optional<double> normalizer,
                       std::vector<AlternatingComponent> components) {
  Instance inst;
  inst.mode = mt.mode;
  inst.capacity = mt.capacity;
  inst.components = std::move(components);
  inst.y = y;
  inst.n = normalizer ? *normalizer : default_normalizer(mt, mc);
  if (!(inst.n > 0.0)) inst.n = 1.0;
  inst.tau = ate_ground_truth(mt, mc, y, inst.n);
  for (const auto& e : mt.edges) inst.ybar_t += y.at(e);
  for (const auto& e : mc.edges) inst.ybar_c += y.at(e);
  inst.ybar_t /= inst.n;
  inst.ybar_c /= inst.n;
  return inst;
}

OutcomeTable make_outcomes(const OutcomeSpec& spec, MatchingMode mode, const Matching& mt,
                           const Matching& mc, std::uint64_t seed) {
  if (spec.model == OutcomeModel::TableFromFile) return io::read_outcomes_csv(spec.path, mode);
  std::set<MatchEdge> edges(mt.edges.begin(), mt.edges.end());
  edges.insert(mc.edges.begin(), mc.edges.end());
  OutcomeTable y;
  y.bound = spec.bound;
  rng::Stream rng(seed, kOutcomeStream);
  for (const auto& e : edges) {
    y.set(e, spec.model == OutcomeModel::ConstantB ? spec.bound : spec.bound * rng.uniform());
  }
  return y;
}

double sample_variance(const std::vector<double>& x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

std::vector<Realization> enumerate_oracle(ComponentKind kind, std::size_t k, double p) {
  check_p(p);
  if (k > 20) throw Error(ErrorCode::TooLarge, "enumeration limited to k <= 20");
  if (k == 0) throw Error(ErrorCode::InvalidK, "component needs at least one edge");
  if (kind == ComponentKind::Cycle && (k < 4 || k % 2 != 0)) {
    throw Error(ErrorCode::InvalidK, "cycle length must be even and >= 4");
  }
  const long double lp = p;
  std::vector<Realization> out;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    auto bit = [&](std::size_t j) { return (mask >> j) & 1u; };
    long double prob = bit(0) ? lp / (1.0L + lp) : 1.0L / (1.0L + lp);
    const std::size_t last_random = kind == ComponentKind::Cycle ? k - 1 : k;
    for (std::size_t j = 1; j < last_random && prob > 0.0L; ++j) {
      if (bit(j - 1)) {
        prob *= bit(j) ? 0.0L : 1.0L;
      } else {
        prob *= bit(j) ? lp : 1.0L - lp;
      }
    }
    if (kind == ComponentKind::Cycle) {
      const bool forced = !bit(0) && !bit(k - 2);
      if (bit(k - 1) != static_cast<std::uint32_t>(forced)) prob = 0.0L;
    }
    if (prob <= 0.0L) continue;
    Realization r;
    r.probability = prob;
    r.w.resize(k);
    for (std::size_t j = 0; j < k; ++j) r.w[j] = static_cast<std::uint8_t>(bit(j));
    out.push_back(std::move(r));
  }
  return out;
}

std::pair<Matching, Matching> cyclic_shift_plans(std::size_t n) {
  Matching mt;
  mt.mode = MatchingMode::OneToOne;
  for (AgentId i = 1; i <= 2 * n; ++i) mt.agents.push_back(i);
  Matching mc = mt;
  const auto nn = static_cast<AgentId>(n);
  for (AgentId i = 1; i <= nn; ++i) {
    mt.edges.push_back(canonical_pair(i, nn + i));
    mc.edges.push_back(canonical_pair(i, nn + i % nn + 1));
  }
  return {mt, mc};
}

std::pair<Matching, Matching> random_many_to_one_plans(std::size_t suppliers, std::size_t demands,
                                                       int capacity, rng::Stream& rng,
                                                       double fill) {
  Matching base;
  base.mode = MatchingMode::ManyToOne;
  base.capacity = capacity;
  for (AgentId s = 1; s <= suppliers; ++s) base.suppliers.push_back(s);
  for (AgentId d = 1; d <= demands; ++d) base.demands.push_back(d);
  auto draw = [&] {
    Matching m = base;
    std::vector<int> room(suppliers, capacity);
    for (AgentId d = 1; d <= demands; ++d) {
      if (!rng.bernoulli(fill)) continue;
      std::vector<AgentId> open;
      for (std::size_t s = 0; s < suppliers; ++s) {
        if (room[s] > 0) open.push_back(static_cast<AgentId>(s + 1));
      }
      if (open.empty()) break;
      const AgentId s = open[uniform_index(rng, open.size())];
      --room[s - 1];
      m.edges.push_back({s, d});
    }
    return m;
  };
  Matching mt = draw();
  Matching mc = draw();
  return {mt, mc};
}

std::pair<Matching, Matching> random_one_to_one_plans(std::size_t count, double cycle_fraction,
                                                      std::size_t min_length,
                                                      std::size_t max_length, rng::Stream& rng) {
  if (min_length < 1 || max_length < min_length) {
    throw Error(ErrorCode::InvalidK, "component lengths must satisfy 1 <= min <= max");
  }
  Matching mt;
  mt.mode = MatchingMode::OneToOne;
  Matching mc = mt;
  AgentId next = 1;
  for (std::size_t i = 0; i < count; ++i) {
    const bool cycle = rng.bernoulli(cycle_fraction);
    std::size_t k = min_length + uniform_index(rng, max_length - min_length + 1);
    const bool start_t = cycle || rng.bernoulli(0.5);
    if (cycle) k = std::max<std::size_t>(4, k + k % 2);
    const std::size_t vertex_count = cycle ? k : k + 1;
    const AgentId first = next;
    next += static_cast<AgentId>(vertex_count);
    for (std::size_t j = 0; j < k; ++j) {
      const AgentId u = first + static_cast<AgentId>(j);
      const AgentId v = first + static_cast<AgentId>((j + 1) % vertex_count);
      const bool is_t = (j % 2 == 0) == start_t;
      (is_t ? mt : mc).edges.push_back(canonical_pair(u, v));
    }
  }
  for (AgentId a = 1; a < next; ++a) mt.agents.push_back(a);
  mc.agents = mt.agents;
  return {mt, mc};
}

Instance instance_from_plans(const Matching& mt, const Matching& mc, const OutcomeTable& y,
                             std::optional<double> normalizer) {
  const auto d = build_disagreement(mt, mc);
  auto comps = mt.mode == MatchingMode::OneToOne ? decompose_one_to_one(d)
                                                 : decompose_many_to_one(d);
  return make_instance(mt, mc, y, normalizer, std::move(comps));
}

Instance build_instance(const ScenarioSpec& spec) {
  const auto& g = spec.generator;
  const std::uint64_t seed = spec.params.seed;
  rng::Stream rng(seed, kGeneratorStream);
  if (g.kind == GeneratorKind::FixedComponents) {
    const auto file = io::components_from_json(io::read_json(g.components_path));
    const auto [mt, mc] = plans_from_components(file);
    const auto y = make_outcomes(spec.outcomes, file.mode, mt, mc, seed);
    return make_instance(mt, mc, y, spec.normalizer, file.components);
  }
  std::pair<Matching, Matching> plans;
  switch (g.kind) {
    case GeneratorKind::RandomOneToOne:
      plans = random_one_to_one_plans(g.components, g.cycle_fraction, g.min_length, g.max_length,
                                      rng);
      break;
    case GeneratorKind::RandomManyToOne:
      plans = random_many_to_one_plans(g.suppliers, g.demands, g.capacity, rng);
      break;
    default:
      plans = cyclic_shift_plans(g.n);
      break;
  }
  const auto& [mt, mc] = plans;
  const auto y = make_outcomes(spec.outcomes, mt.mode, mt, mc, seed);
  return instance_from_plans(mt, mc, y, spec.normalizer);
}

NormalityResult normality_check(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 100) {
    throw Error(ErrorCode::TooFewSamples,
                "normality check needs at least 100 samples, got " + std::to_string(n));
  }
  NormalityResult r;
  r.samples = n;
  r.critical = 1.63 / std::sqrt(static_cast<double>(n));
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> z(samples.begin(), samples.end());
  std::sort(z.begin(), z.end());
  if (!(sd > 0.0)) {
    // A point mass is as far from normal as it gets.
    r.statistic = 1.0;
    r.pass = false;
    return r;
  }
  const double nd = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = (z[i] - mean) / sd;
    const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
    d = std::max({d, static_cast<double>(i + 1) / nd - cdf, cdf - static_cast<double>(i) / nd});
  }
  r.statistic = d;
  r.pass = d < r.critical;
  r.qq.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.qq.emplace_back(z[i], normal_quantile((static_cast<double>(i) + 0.5) / nd));
  }
  return r;
}

SimReport run_simulation(const ScenarioSpec& spec, unsigned threads) {
  return run_simulation(build_instance(spec), spec, threads);
}

SimReport run_simulation(const Instance& inst, const ScenarioSpec& spec, unsigned threads) {
  spec.params.validate();
  const std::size_t reps = spec.replications;
  if (reps == 0) throw Error(ErrorCode::ShapeMismatch, "replications must be >= 1");

  SimReport r;
  r.replications = reps;
  r.seed = spec.params.seed;
  r.components = inst.components.size();
  r.n = inst.n;
  r.tau = inst.tau;
  for (const auto& c : inst.components) r.disagreement_edges += c.k();

  double exact = 0.0;
  double bound = 0.0;
  for (std::size_t i = 0; i < inst.components.size(); ++i) {
    const auto& c = inst.components[i];
    const auto yi = component_outcomes(c, inst.y);
    const double p = spec.params.p_for(i);
    exact += variance_exact(c, yi, p);
    bound += variance_bound(c, yi, p);
  }
  r.true_variance = exact / (inst.n * inst.n);
  r.variance_upper_bound = bound / (inst.n * inst.n);
  r.naive_variance = naive_variance(inst.ybar_t, inst.ybar_c);

  std::vector<double> tau_hat(reps);
  std::vector<double> sigma2(reps);
  std::vector<std::uint8_t> covered(reps);
  std::vector<double> naive(reps);
  parallel_chunks(reps, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      DesignParams params = spec.params;
      params.seed = rng::substream_seed(spec.params.seed, rep);
      const auto a = ap_randomize(inst.components, params, 1);
      const auto est = estimate(inst.components, a, inst.y, inst.n, spec.alpha);
      tau_hat[rep] = est.tau_hat;
      sigma2[rep] = est.sigma2_hat;
      covered[rep] = est.ci_lo <= inst.tau && inst.tau <= est.ci_hi;
      rng::Stream coin(params.seed, kNaiveStream);
      naive[rep] = naive_estimate(naive_randomize(coin), inst.ybar_t, inst.ybar_c);
    }
  });

  r.mean_tau_hat = mean_of(tau_hat);
  r.bias = r.mean_tau_hat - inst.tau;
  r.mean_sigma2_hat = mean_of(sigma2);
  std::size_t hits = 0;
  for (auto c : covered) hits += c;
  r.ci_coverage = static_cast<double>(hits) / static_cast<double>(reps);
  if (reps > 1) {
    r.empirical_variance = sample_variance(tau_hat, r.mean_tau_hat);
    r.naive_empirical_variance = sample_variance(naive, mean_of(naive));
  }
  if (reps >= 100) {
    r.normality = normality_check(tau_hat);
    r.naive_normality = normality_check(naive);
  }
  r.tau_hats = std::move(tau_hat);
  r.naive_tau_hats = std::move(naive);
  return r;
}

}  // namespace apd
