#include "apdesign/design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apdesign/parallel.hpp"

namespace apd {

void check_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidP, "p must lie in (0, 1], got " + std::to_string(p));
  }
}

double DesignParams::p_for(std::size_t component) const {
  auto it = p_overrides.find(component);
  return it == p_overrides.end() ? p : it->second;
}

void DesignParams::validate() const {
  check_p(p);
  for (const auto& [index, value] : p_overrides) check_p(value);
}

void draw_component(ComponentKind kind, std::span<std::uint8_t> w, double p, rng::Stream& rng) {
  const std::size_t k = w.size();
  if (k == 0) return;
  const std::size_t random_edges = kind == ComponentKind::Cycle ? k - 1 : k;
  w[0] = rng.bernoulli(p / (1.0 + p)) ? 1 : 0;
  for (std::size_t j = 1; j < random_edges; ++j) {
    w[j] = (w[j - 1] == 0 && rng.bernoulli(p)) ? 1 : 0;
  }
  if (kind == ComponentKind::Cycle) {
    w[k - 1] = (w[0] == 0 && w[k - 2] == 0) ? 1 : 0;
  }
}

Assignment ap_randomize(const std::vector<AlternatingComponent>& components,
                        const DesignParams& params, unsigned threads) {
  params.validate();
  Assignment out;
  out.design = DesignKind::AP;
  out.params = params;
  out.w.resize(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) out.w[i].assign(components[i].k(), 0);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      rng::Stream stream(params.seed, i);
      draw_component(components[i].kind, out.w[i], params.p_for(i), stream);
    }
  };

  parallel_chunks(components.size(), threads, work);
  return out;
}

void check_realization(const AlternatingComponent& c, std::span<const std::uint8_t> w) {
  const std::size_t k = c.k();
  if (w.size() != k) {
    throw Error(ErrorCode::InfeasibleAssignment,
                "selection vector has " + std::to_string(w.size()) + " entries, component has " +
                    std::to_string(k) + " edges");
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (w[j] > 1) throw Error(ErrorCode::InfeasibleAssignment, "selection entries must be 0 or 1");
    if (j > 0 && w[j] && w[j - 1]) {
      throw Error(ErrorCode::InfeasibleAssignment,
                  "adjacent edges " + std::to_string(j) + " and " + std::to_string(j + 1) +
                      " both selected");
    }
  }
  if (c.is_cycle()) {
    const std::uint8_t expected = (w[0] == 0 && w[k - 2] == 0) ? 1 : 0;
    if (w[k - 1] != expected) {
      throw Error(ErrorCode::InfeasibleAssignment, "cycle closing edge violates the closure rule");
    }
  }
}

void check_assignment(const std::vector<AlternatingComponent>& components, const Assignment& a) {
  if (a.w.size() != components.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                "assignment has " + std::to_string(a.w.size()) + " components, expected " +
                    std::to_string(components.size()));
  }
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (a.w[i].size() != components[i].k()) {
      throw Error(ErrorCode::ShapeMismatch,
                  "component " + std::to_string(i) + " has k=" +
                      std::to_string(components[i].k()) + " but assignment has " +
                      std::to_string(a.w[i].size()) + " entries");
    }
    check_realization(components[i], a.w[i]);
  }
}

NaivePick naive_randomize(rng::Stream& rng) {
  return rng.bernoulli(0.5) ? NaivePick::T : NaivePick::C;
}

double neg_pow(double p, long n) {
  const double magnitude = std::pow(p, static_cast<double>(n));
  return (n % 2 == 0) ? magnitude : -magnitude;
}

namespace {

void check_index(std::size_t k, std::size_t j) {
  if (j < 1 || j > k) {
    throw Error(ErrorCode::IndexOutOfRange,
                "edge index " + std::to_string(j) + " outside [1, " + std::to_string(k) + "]");
  }
}

}  // namespace

double unconditional_prob(ComponentKind kind, std::size_t k, std::size_t j, double p) {
  check_index(k, j);
  check_p(p);
  const double q = 1.0 + p;
  if (kind == ComponentKind::Cycle && j == k) {
    return (1.0 - neg_pow(p, static_cast<long>(j) - 1)) / (q * q);
  }
  return p / q;
}

double unconditional_prob(const AlternatingComponent& c, std::size_t j, double p) {
  return unconditional_prob(c.kind, c.k(), j, p);
}

double joint_prob(ComponentKind kind, std::size_t k, std::size_t j, std::size_t q, double p) {
  check_index(k, j);
  check_index(k, q);
  if (j >= q) {
    throw Error(ErrorCode::IndexOutOfRange, "joint_prob requires j < q");
  }
  check_p(p);
  const double s = 1.0 + p;
  if (kind == ComponentKind::Cycle && q == k) {
    const long jl = static_cast<long>(j);
    const long kl = static_cast<long>(k);
    return p * (1.0 - neg_pow(p, jl - 1)) * (1.0 - neg_pow(p, kl - 1 - jl)) / (s * s * s);
  }
  return (p * p - neg_pow(p, static_cast<long>(q - j) + 1)) / (s * s);
}

double joint_prob(const AlternatingComponent& c, std::size_t j, std::size_t q, double p) {
  return joint_prob(c.kind, c.k(), j, q, p);
}

}  // namespace apd
