#pragma once

#include <span>
#include <utility>
#include <vector>

#include "apdesign/design.hpp"

namespace apd {

/// +1 for a t-match, -1 for a c-match.
inline double sign_of(EdgeLabel l) { return l == EdgeLabel::T ? 1.0 : -1.0; }

// ---------------------------------------------------------------------------
// Component-level quantities. `y` is aligned with the component's edges. In
// the *_hat functions only entries with w[j] = 1 are read, so unobserved
// outcomes may hold anything (NaN included).
// ---------------------------------------------------------------------------

/// Path-level effect Γ = Σ_T Y − Σ_C Y.
double gamma_true(const AlternatingComponent& c, std::span<const double> y);

/// Horvitz–Thompson estimate Γ̂ of one component.
double gamma_hat(const AlternatingComponent& c, std::span<const std::uint8_t> w,
                 std::span<const double> y, double p);

/// Exact design variance Var(Γ̂) given every potential outcome on the component.
double variance_exact(const AlternatingComponent& c, std::span<const double> y, double p);

/// Conservative, estimable upper bound σ̃² of Var(Γ̂).
double variance_bound(const AlternatingComponent& c, std::span<const double> y, double p);

/// Unbiased estimate σ̂² of variance_bound from observed outcomes only.
double variance_bound_hat(const AlternatingComponent& c, std::span<const std::uint8_t> w,
                          std::span<const double> y, double p);

/// Worst case of Var(Γ̂) over outcomes in [0, B]. At p = 1 returns the limit
/// k²B².
double worst_case_variance(ComponentKind kind, std::size_t k, double p, double bound);

/// Same quantity evaluated as the explicit finite sum at Y ≡ B; used near
/// p = 1 where the closed form cancels catastrophically.
double worst_case_variance_by_sum(ComponentKind kind, std::size_t k, double p, double bound);

// ---------------------------------------------------------------------------
// Instance-level estimation.
// ---------------------------------------------------------------------------

struct ComponentEstimate {
  std::size_t index = 0;
  std::size_t k = 0;
  ComponentKind kind = ComponentKind::Path;
  double gamma_hat = 0.0;
  double sigma2_i_hat = 0.0;
};

struct EstimateReport {
  double tau_hat = 0.0;
  double sigma2_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double alpha = 0.95;
  double n_normalizer = 1.0;
  std::vector<ComponentEstimate> per_component;
};

/// Outcome vector of component `c` from `y`. With `selected` given, only the
/// selected edges must be present (others become NaN); otherwise all must be.
std::vector<double> component_outcomes(const AlternatingComponent& c, const OutcomeTable& y,
                                       std::span<const std::uint8_t> selected = {});

/// τ̂ = Σ Γ̂_i / n, with per-component Γ̂_i. σ² fields are left at zero.
EstimateReport ht_estimate(const std::vector<AlternatingComponent>& components,
                           const Assignment& assignment, const OutcomeTable& y, double n);

/// σ̂² = Σ σ̂²_i / n². Fills `report->per_component[i].sigma2_i_hat` if given.
double variance_bound_estimate(const std::vector<AlternatingComponent>& components,
                               const Assignment& assignment, const OutcomeTable& y, double n,
                               EstimateReport* report = nullptr);

/// Full pipeline: point estimate, variance bound and interval at level alpha.
/// Per-component terms may be computed on several threads; sums are taken in
/// index order.
EstimateReport estimate(const std::vector<AlternatingComponent>& components,
                        const Assignment& assignment, const OutcomeTable& y, double n,
                        double alpha, unsigned threads = 1);

/// τ̂ ± z_{(1+α)/2} √σ̂².
std::pair<double, double> confidence_interval(double tau_hat, double sigma2_hat, double alpha);

/// Standard normal quantile.
double normal_quantile(double u);

// Naive whole-plan design.
double naive_estimate(NaivePick pick, double ybar_t, double ybar_c);
double naive_variance(double ybar_t, double ybar_c);

}  // namespace apd
