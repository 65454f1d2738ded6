#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "apdesign/decomposition.hpp"
#include "apdesign/rng.hpp"

namespace apd {

/// Conditional randomization probability p (shared or per component) and the
/// master seed. p = 1 is the degenerate alternating design.
struct DesignParams {
  double p = 0.5;
  std::map<std::size_t, double> p_overrides;
  std::uint64_t seed = 0;

  double p_for(std::size_t component) const;
  void validate() const;  // throws InvalidP
};

enum class DesignKind { AP, Naive };

/// One binary selection vector per component, aligned with the component list.
struct Assignment {
  DesignKind design = DesignKind::AP;
  DesignParams params;
  std::vector<std::vector<std::uint8_t>> w;
};

void check_p(double p);

/// Draws W for a single component of length k into `w` (size k).
void draw_component(ComponentKind kind, std::span<std::uint8_t> w, double p, rng::Stream& rng);

/// Independent draw per component; component i uses substream (seed, i), so
/// the result does not depend on `threads`.
Assignment ap_randomize(const std::vector<AlternatingComponent>& components,
                        const DesignParams& params, unsigned threads = 1);

/// Throws InfeasibleAssignment unless `w` has the right shape, no two
/// adjacent selections, and (for cycles) the closing rule holds.
void check_realization(const AlternatingComponent& c, std::span<const std::uint8_t> w);
void check_assignment(const std::vector<AlternatingComponent>& components, const Assignment& a);

enum class NaivePick { T, C };

/// Whole-plan coin flip of the naive baseline.
NaivePick naive_randomize(rng::Stream& rng);

/// Marginal P(W_j = 1) for 1-based j.
double unconditional_prob(ComponentKind kind, std::size_t k, std::size_t j, double p);
double unconditional_prob(const AlternatingComponent& c, std::size_t j, double p);

/// P(W_j = 1, W_q = 1) for 1-based j < q.
double joint_prob(ComponentKind kind, std::size_t k, std::size_t j, std::size_t q, double p);
double joint_prob(const AlternatingComponent& c, std::size_t j, std::size_t q, double p);

/// (-p)^n
double neg_pow(double p, long n);

}  // namespace apd
