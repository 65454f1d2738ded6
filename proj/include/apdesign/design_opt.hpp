#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "apdesign/decomposition.hpp"

namespace apd {

struct OptimalDesign {
  ComponentKind kind = ComponentKind::Path;
  std::size_t k = 0;
  double p_star = 1.0;
  double value_per_edge = 0.0;  // worst-case Var(Γ̂) / k at p_star with B = 1
};

/// Golden-section search for a minimum of f on [lo, hi]; stops once the
/// bracket is narrower than `tol`.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

/// Minimax conditional probability for a component of the given shape. The
/// bound only scales the objective, so the argmin is computed with B = 1.
OptimalDesign optimize_p(ComponentKind kind, std::size_t k);

/// Limit of the optimum for long components: √2 − 1.
double asymptotic_p();

/// Leading per-edge worst-case variance coefficient (1 + p) / (p (1 − p)).
double asymptotic_value_per_edge(double p);

/// Rows of the published grid: paths k ∈ {2,4,5,6,10,50,100,1000} and cycles
/// k ∈ {4,6,10,50,100,1000}.
std::vector<OptimalDesign> optimal_design_table();

}  // namespace apd
