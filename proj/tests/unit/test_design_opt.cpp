#include <gtest/gtest.h>

#include <cmath>

#include "apdesign/design_opt.hpp"
#include "apdesign/estimation.hpp"

using namespace apd;

namespace {

struct Cell {
  ComponentKind kind;
  std::size_t k;
  double p_star;
  double value;
};

// Minimizers of the closed-form worst-case variance.
const Cell kCells[] = {
    {ComponentKind::Path, 2, 1.0, 2.0},
    {ComponentKind::Path, 4, 0.754878, 3.864516},
    {ComponentKind::Path, 5, 0.61552, 4.35964},
    {ComponentKind::Path, 6, 0.55263, 4.66204},
    {ComponentKind::Path, 10, 0.47272, 5.18951},
    {ComponentKind::Path, 50, 0.42296, 5.71012},
    {ComponentKind::Path, 100, 0.41847, 5.76972},
    {ComponentKind::Path, 1000, 0.41463, 5.82259},
    {ComponentKind::Cycle, 4, 1.0, 4.0},
    {ComponentKind::Cycle, 6, 0.46505, 5.13646},
    {ComponentKind::Cycle, 10, 0.42952, 5.44095},
    {ComponentKind::Cycle, 50, 0.41658, 5.75173},
    {ComponentKind::Cycle, 100, 0.41537, 5.79011},
    {ComponentKind::Cycle, 1000, 0.41433, 5.82460},
};

}  // namespace

TEST(OptimizeP, KnownMinimizers) {
  for (const auto& cell : kCells) {
    const auto d = optimize_p(cell.kind, cell.k);
    EXPECT_NEAR(d.p_star, cell.p_star, 1e-4) << to_string(cell.kind) << " k=" << cell.k;
    EXPECT_NEAR(d.value_per_edge, cell.value, 1e-4) << to_string(cell.kind) << " k=" << cell.k;
  }
}

TEST(OptimizeP, SingleEdgeAlwaysSelected) {
  const auto d = optimize_p(ComponentKind::Path, 1);
  EXPECT_EQ(d.p_star, 1.0);
  EXPECT_EQ(d.value_per_edge, 1.0);
}

TEST(OptimizeP, InvalidLength) {
  EXPECT_THROW(optimize_p(ComponentKind::Cycle, 5), Error);
  EXPECT_THROW(optimize_p(ComponentKind::Path, 0), Error);
}

TEST(OptimizeP, LocallyOptimal) {
  for (const auto& cell : kCells) {
    const auto d = optimize_p(cell.kind, cell.k);
    const double at = worst_case_variance(cell.kind, cell.k, d.p_star, 1.0);
    EXPECT_NEAR(at / static_cast<double>(cell.k), d.value_per_edge, 1e-12);
    EXPECT_GE(worst_case_variance(cell.kind, cell.k, d.p_star - 1e-3, 1.0), at);
    if (d.p_star + 1e-3 <= 1.0) {
      EXPECT_GE(worst_case_variance(cell.kind, cell.k, d.p_star + 1e-3, 1.0), at);
    }
  }
}

TEST(OptimizeP, PathOptimumDecreasesWithLength) {
  double previous = 1.0;
  for (std::size_t k : {5, 6, 10, 50, 100, 1000}) {
    const double p = optimize_p(ComponentKind::Path, k).p_star;
    EXPECT_LT(p, previous);
    previous = p;
  }
}

TEST(Asymptotics, LimitPoint) {
  EXPECT_DOUBLE_EQ(asymptotic_p(), std::sqrt(2.0) - 1.0);
  EXPECT_NEAR(asymptotic_value_per_edge(asymptotic_p()), 3.0 + 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(optimize_p(ComponentKind::Path, 1000).p_star, asymptotic_p(), 5e-4);
  const double numeric = golden_section_minimize(asymptotic_value_per_edge, 1e-3, 1 - 1e-3, 1e-12);
  EXPECT_NEAR(numeric, asymptotic_p(), 1e-7);
}

TEST(GoldenSection, FindsQuadraticMinimum) {
  const double x = golden_section_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, 0, 1,
                                           1e-10);
  EXPECT_NEAR(x, 0.3, 1e-9);
}

TEST(OptimalDesignTable, RowOrder) {
  const auto rows = optimal_design_table();
  ASSERT_EQ(rows.size(), 14u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].kind, kCells[i].kind);
    EXPECT_EQ(rows[i].k, kCells[i].k);
  }
}
