#include "apdesign/design_opt.hpp"

#include <cmath>

#include "apdesign/estimation.hpp"

namespace apd {

namespace {

constexpr int kScanPoints = 512;
constexpr double kScanLowExponent = -6.0;  // scan covers [1e-6, 1]
constexpr double kTolerance = 1e-7;

double scan_point(int i) {
  if (i == kScanPoints - 1) return 1.0;
  const double t = static_cast<double>(i) / (kScanPoints - 1);
  return std::pow(10.0, kScanLowExponent * (1.0 - t));
}

}  // namespace

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return (lo + hi) / 2.0;
}

OptimalDesign optimize_p(ComponentKind kind, std::size_t k) {
  OptimalDesign out;
  out.kind = kind;
  out.k = k;
  // Validates k as a side effect.
  const double boundary = worst_case_variance(kind, k, 1.0, 1.0);
  const double kd = static_cast<double>(k);
  if (kind == ComponentKind::Path && k == 1) {
    // No interference on a single edge: always realize it.
    out.p_star = 1.0;
    out.value_per_edge = boundary / kd;
    return out;
  }

  auto objective = [&](double p) { return worst_case_variance(kind, k, p, 1.0); };

  int best = 0;
  double best_value = objective(scan_point(0));
  for (int i = 1; i < kScanPoints - 1; ++i) {
    const double v = objective(scan_point(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = scan_point(best == 0 ? 0 : best - 1);
  const double hi = scan_point(best + 1);
  // The bracket may touch p = 1; keep golden-section probes strictly inside.
  const double interior = golden_section_minimize(objective, lo, hi, kTolerance);
  const double interior_value = objective(interior);

  if (boundary <= interior_value) {
    out.p_star = 1.0;
    out.value_per_edge = boundary / kd;
  } else {
    out.p_star = interior;
    out.value_per_edge = interior_value / kd;
  }
  return out;
}

double asymptotic_p() { return std::sqrt(2.0) - 1.0; }

double asymptotic_value_per_edge(double p) { return (1.0 + p) / (p * (1.0 - p)); }

std::vector<OptimalDesign> optimal_design_table() {
  std::vector<OptimalDesign> rows;
  for (std::size_t k : {2, 4, 5, 6, 10, 50, 100, 1000}) {
    rows.push_back(optimize_p(ComponentKind::Path, k));
  }
  for (std::size_t k : {4, 6, 10, 50, 100, 1000}) {
    rows.push_back(optimize_p(ComponentKind::Cycle, k));
  }
  return rows;
}

}  // namespace apd
