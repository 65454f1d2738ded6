#include "apdesign/estimation.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "apdesign/parallel.hpp"

namespace apd {

namespace {

void require_size(const AlternatingComponent& c, std::size_t n, const char* what) {
  if (n != c.k()) {
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " has " + std::to_string(n) +
                                              " entries, component has " +
                                              std::to_string(c.k()) + " edges");
  }
}

struct CrossSums {
  double sum_sq = 0.0;    // Σ Y_j²
  double all = 0.0;       // Σ_{j<q} p^{q-j-1} Y_j Y_q
  double adjacent = 0.0;  // Σ_j Y_j Y_{j+1}
};

// Geometric cross sums over the first m edges in O(m).
CrossSums cross_sums(std::span<const double> y, std::size_t m, double p) {
  CrossSums s;
  double carry = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    s.sum_sq += y[q] * y[q];
    s.all += y[q] * carry;
    carry = p * carry + y[q];
    if (q > 0) s.adjacent += y[q - 1] * y[q];
  }
  return s;
}

// Cycle closing-edge coefficients with 1-based j.
double closing_variance_coeff(std::size_t k, double p) {
  const double pk1 = std::pow(p, static_cast<double>(k - 1));
  return (p * p + 2.0 * p - pk1) / (1.0 + pk1);
}

double closing_cross_coeff(std::size_t k, std::size_t j, double p) {
  const long kl = static_cast<long>(k);
  const long jl = static_cast<long>(j);
  const double ratio = (1.0 - neg_pow(p, kl - 1 - jl)) * (1.0 - neg_pow(p, jl - 1)) /
                       (1.0 + std::pow(p, static_cast<double>(k - 1)));
  const double parity = (j % 2 == 0) ? 1.0 : -1.0;
  return parity * (ratio - 1.0);
}

double variance_exact_impl(ComponentKind kind, std::span<const double> y, double p) {
  const std::size_t k = y.size();
  if (kind == ComponentKind::Path) {
    const auto s = cross_sums(y, k, p);
    return s.sum_sq / p + 2.0 * s.all;
  }
  const auto s = cross_sums(y, k - 1, p);
  const double yk = y[k - 1];
  double v = s.sum_sq / p + 2.0 * s.all + closing_variance_coeff(k, p) * yk * yk;
  for (std::size_t j = 1; j <= k - 1; ++j) {
    v += 2.0 * closing_cross_coeff(k, j, p) * y[j - 1] * yk;
  }
  return v;
}

void check_kind_length(ComponentKind kind, std::size_t k) {
  if (kind == ComponentKind::Path && k < 1) {
    throw Error(ErrorCode::InvalidK, "path length must be >= 1");
  }
  if (kind == ComponentKind::Cycle && (k < 4 || k % 2 != 0)) {
    throw Error(ErrorCode::InvalidK,
                "cycle length must be even and >= 4, got " + std::to_string(k));
  }
}

}  // namespace

double gamma_true(const AlternatingComponent& c, std::span<const double> y) {
  require_size(c, y.size(), "outcome vector");
  double g = 0.0;
  for (std::size_t j = 0; j < c.k(); ++j) g += sign_of(c.labels[j]) * y[j];
  return g;
}

double gamma_hat(const AlternatingComponent& c, std::span<const std::uint8_t> w,
                 std::span<const double> y, double p) {
  require_size(c, w.size(), "selection vector");
  require_size(c, y.size(), "outcome vector");
  double g = 0.0;
  for (std::size_t j = 0; j < c.k(); ++j) {
    if (!w[j]) continue;
    g += sign_of(c.labels[j]) * y[j] / unconditional_prob(c, j + 1, p);
  }
  return g;
}

double variance_exact(const AlternatingComponent& c, std::span<const double> y, double p) {
  require_size(c, y.size(), "outcome vector");
  check_p(p);
  return variance_exact_impl(c.kind, y, p);
}

double variance_bound(const AlternatingComponent& c, std::span<const double> y, double p) {
  require_size(c, y.size(), "outcome vector");
  check_p(p);
  const std::size_t k = c.k();
  if (!c.is_cycle()) {
    const auto s = cross_sums(y, k, p);
    double interior = 0.0;
    for (std::size_t j = 1; j + 1 < k; ++j) interior += y[j] * y[j];
    return (1.0 / p + 1.0) * s.sum_sq + interior + 2.0 * (s.all - s.adjacent);
  }
  const auto s = cross_sums(y, k - 1, p);
  const double yk = y[k - 1];
  double v = (1.0 / p + 2.0) * s.sum_sq + 2.0 * (s.all - s.adjacent) +
             (closing_variance_coeff(k, p) + 2.0) * yk * yk;
  for (std::size_t j = 2; j <= k - 2; ++j) {
    v += 2.0 * closing_cross_coeff(k, j, p) * y[j - 1] * yk;
  }
  return v;
}

double variance_bound_hat(const AlternatingComponent& c, std::span<const std::uint8_t> w,
                          std::span<const double> y, double p) {
  require_size(c, w.size(), "selection vector");
  require_size(c, y.size(), "outcome vector");
  check_p(p);
  const std::size_t k = c.k();
  const bool cycle = c.is_cycle();
  // 1-based indices of selected edges, excluding a cycle's closing edge.
  std::vector<std::size_t> selected;
  const std::size_t body = cycle ? k - 1 : k;
  for (std::size_t j = 1; j <= body; ++j) {
    if (w[j - 1]) selected.push_back(j);
  }

  const double square_weight = cycle ? 1.0 / p + 2.0 : 1.0 / p + 1.0;
  double v = 0.0;
  for (std::size_t j : selected) {
    const double yj = y[j - 1];
    double coeff = square_weight;
    if (!cycle && j >= 2 && j <= k - 1) coeff += 1.0;
    v += coeff * yj * yj / unconditional_prob(c, j, p);
  }
  for (std::size_t a = 0; a < selected.size(); ++a) {
    for (std::size_t b = a + 1; b < selected.size(); ++b) {
      const std::size_t j = selected[a];
      const std::size_t q = selected[b];
      if (q < j + 2) continue;
      const double weight = std::pow(p, static_cast<double>(q - j - 1));
      v += 2.0 * weight * y[j - 1] * y[q - 1] / joint_prob(c, j, q, p);
    }
  }
  if (cycle && w[k - 1]) {
    const double yk = y[k - 1];
    v += (closing_variance_coeff(k, p) + 2.0) * yk * yk / unconditional_prob(c, k, p);
    for (std::size_t j : selected) {
      if (j < 2 || j > k - 2) continue;
      v += 2.0 * closing_cross_coeff(k, j, p) * y[j - 1] * yk / joint_prob(c, j, k, p);
    }
  }
  return v;
}

double worst_case_variance_by_sum(ComponentKind kind, std::size_t k, double p, double bound) {
  check_kind_length(kind, k);
  check_p(p);
  const std::vector<double> y(k, bound);
  return variance_exact_impl(kind, y, p);
}

double worst_case_variance(ComponentKind kind, std::size_t k, double p, double bound) {
  check_kind_length(kind, k);
  check_p(p);
  const double b2 = bound * bound;
  const double kd = static_cast<double>(k);
  if (p == 1.0) return kd * kd * b2;
  if (1.0 - p < 1e-4) return worst_case_variance_by_sum(kind, k, p, bound);

  const double q = 1.0 - p;
  const double lead = 1.0 / p + 2.0 / q;
  if (kind == ComponentKind::Path) {
    return lead * b2 * kd + 2.0 * b2 * (std::pow(p, kd) - 1.0) / (q * q);
  }
  const double pk1 = std::pow(p, kd - 1.0);
  const double pk2 = std::pow(p, kd - 2.0);
  return lead * b2 * (kd - 1.0) + 2.0 * b2 * (pk1 - 1.0) / (q * q) +
         b2 * (4.0 + 2.0 * p - p * p - p * p * p - pk2 * (2.0 + p + p * p)) / (q * (1.0 + pk1));
}

std::vector<double> component_outcomes(const AlternatingComponent& c, const OutcomeTable& y,
                                       std::span<const std::uint8_t> selected) {
  std::vector<double> out(c.k(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 0; j < c.k(); ++j) {
    const bool needed = selected.empty() || selected[j];
    if (needed) {
      out[j] = y.at(c.edge(j));
    } else if (auto v = y.find(c.edge(j))) {
      out[j] = *v;
    }
  }
  return out;
}

EstimateReport ht_estimate(const std::vector<AlternatingComponent>& components,
                           const Assignment& assignment, const OutcomeTable& y, double n) {
  if (!(n > 0.0)) throw Error(ErrorCode::ShapeMismatch, "normalizer n must be positive");
  check_assignment(components, assignment);
  EstimateReport r;
  r.n_normalizer = n;
  double total = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const auto& w = assignment.w[i];
    const auto yi = component_outcomes(c, y, w);
    ComponentEstimate ce;
    ce.index = i;
    ce.k = c.k();
    ce.kind = c.kind;
    ce.gamma_hat = gamma_hat(c, w, yi, assignment.params.p_for(i));
    total += ce.gamma_hat;
    r.per_component.push_back(ce);
  }
  r.tau_hat = total / n;
  return r;
}

double variance_bound_estimate(const std::vector<AlternatingComponent>& components,
                               const Assignment& assignment, const OutcomeTable& y, double n,
                               EstimateReport* report) {
  if (!(n > 0.0)) throw Error(ErrorCode::ShapeMismatch, "normalizer n must be positive");
  check_assignment(components, assignment);
  double total = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const auto& w = assignment.w[i];
    const auto yi = component_outcomes(c, y, w);
    const double s = variance_bound_hat(c, w, yi, assignment.params.p_for(i));
    if (report && i < report->per_component.size()) report->per_component[i].sigma2_i_hat = s;
    total += s;
  }
  return total / (n * n);
}

EstimateReport estimate(const std::vector<AlternatingComponent>& components,
                        const Assignment& assignment, const OutcomeTable& y, double n,
                        double alpha, unsigned threads) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1)");
  }
  if (!(n > 0.0)) throw Error(ErrorCode::ShapeMismatch, "normalizer n must be positive");
  check_assignment(components, assignment);
  EstimateReport r;
  r.n_normalizer = n;
  r.alpha = alpha;
  r.per_component.resize(components.size());
  parallel_chunks(components.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& c = components[i];
      const auto& w = assignment.w[i];
      const auto yi = component_outcomes(c, y, w);
      const double p = assignment.params.p_for(i);
      auto& ce = r.per_component[i];
      ce.index = i;
      ce.k = c.k();
      ce.kind = c.kind;
      ce.gamma_hat = gamma_hat(c, w, yi, p);
      ce.sigma2_i_hat = variance_bound_hat(c, w, yi, p);
    }
  });
  double gamma_total = 0.0;
  double sigma_total = 0.0;
  for (const auto& ce : r.per_component) {
    gamma_total += ce.gamma_hat;
    sigma_total += ce.sigma2_i_hat;
  }
  r.tau_hat = gamma_total / n;
  r.sigma2_hat = sigma_total / (n * n);
  std::tie(r.ci_lo, r.ci_hi) = confidence_interval(r.tau_hat, r.sigma2_hat, alpha);
  return r;
}

double normal_quantile(double u) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

std::pair<double, double> confidence_interval(double tau_hat, double sigma2_hat, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(sigma2_hat >= 0.0)) {
    throw Error(ErrorCode::ShapeMismatch, "variance estimate must be non-negative");
  }
  const double half = normal_quantile((1.0 + alpha) / 2.0) * std::sqrt(sigma2_hat);
  return {tau_hat - half, tau_hat + half};
}

double naive_estimate(NaivePick pick, double ybar_t, double ybar_c) {
  return pick == NaivePick::T ? 2.0 * ybar_t : -2.0 * ybar_c;
}

double naive_variance(double ybar_t, double ybar_c) {
  const double s = ybar_t + ybar_c;
  return s * s;
}

}  // namespace apd
