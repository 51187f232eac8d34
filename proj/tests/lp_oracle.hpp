#pragma once

// Brute-force vertex enumeration for tiny bounded LPs. Test-only: shares no code
// with the simplex implementation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "h2dac/lp.hpp"

namespace h2dac::testing {

struct DenseLp {
  int n = 0;
  std::vector<double> c, lo, up;
  std::vector<std::vector<double>> a;
  std::vector<RowSense> sense;
  std::vector<double> b;

  LpProblem to_lp() const {
    LpProblem lp;
    for (int j = 0; j < n; ++j) lp.add_col("x" + std::to_string(j), c[j], lo[j], up[j]);
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::vector<RowEntry> row;
      for (int j = 0; j < n; ++j)
        if (a[i][j] != 0.0) row.push_back({j, a[i][j]});
      lp.add_row("r" + std::to_string(i), row, sense[i], b[i]);
    }
    return lp;
  }
};

namespace detail {

// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_dense(std::vector<std::vector<double>> m,
                                                      std::vector<double> rhs) {
  const int k = static_cast<int>(rhs.size());
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-10) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = col + 1; r < k; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int cc = col; cc < k; ++cc) m[r][cc] -= f * m[col][cc];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(k);
  for (int r = k - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int cc = r + 1; cc < k; ++cc) s -= m[r][cc] * x[cc];
    x[r] = s / m[r][r];
  }
  return x;
}

}  // namespace detail

/// Minimum objective over all feasible vertices; nullopt when none exists.
inline std::optional<double> vertex_enumeration_optimum(const DenseLp& p, double tol = 1e-9) {
  const int n = p.n;
  const int m = static_cast<int>(p.a.size());
  std::optional<double> best;

  auto feasible = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j)
      if (x[j] < p.lo[j] - tol || x[j] > p.up[j] + tol) return false;
    for (int i = 0; i < m; ++i) {
      double act = 0.0;
      for (int j = 0; j < n; ++j) act += p.a[i][j] * x[j];
      const double scale = 1.0 + std::abs(p.b[i]);
      if (p.sense[i] != RowSense::Ge && act > p.b[i] + tol * scale) return false;
      if (p.sense[i] != RowSense::Le && act < p.b[i] - tol * scale) return false;
    }
    return true;
  };

  for (unsigned rows_mask = 0; rows_mask < (1u << m); ++rows_mask) {
    std::vector<int> active;
    // Equalities need not be in the defining set (they may be dependent); the
    // feasibility check enforces them.
    for (int i = 0; i < m; ++i)
      if (rows_mask & (1u << i)) active.push_back(i);
    const int k = static_cast<int>(active.size());
    if (k > n) continue;
    // Choose the n - k variables pinned at a bound, and which bound.
    for (unsigned pin_mask = 0; pin_mask < (1u << n); ++pin_mask) {
      if (__builtin_popcount(pin_mask) != n - k) continue;
      std::vector<int> free_vars;
      for (int j = 0; j < n; ++j)
        if (!(pin_mask & (1u << j))) free_vars.push_back(j);
      for (unsigned side = 0; side < (1u << (n - k)); ++side) {
        std::vector<double> x(n, 0.0);
        int t = 0;
        for (int j = 0; j < n; ++j)
          if (pin_mask & (1u << j)) x[j] = (side & (1u << t++)) ? p.up[j] : p.lo[j];
        if (k > 0) {
          std::vector<std::vector<double>> mat(k, std::vector<double>(k));
          std::vector<double> rhs(k);
          for (int r = 0; r < k; ++r) {
            const auto& row = p.a[active[r]];
            rhs[r] = p.b[active[r]];
            for (int j = 0; j < n; ++j)
              if (pin_mask & (1u << j)) rhs[r] -= row[j] * x[j];
            for (int cc = 0; cc < k; ++cc) mat[r][cc] = row[free_vars[cc]];
          }
          auto sol = detail::solve_dense(std::move(mat), std::move(rhs));
          if (!sol) continue;
          for (int cc = 0; cc < k; ++cc) x[free_vars[cc]] = (*sol)[cc];
        }
        if (!feasible(x)) continue;
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += p.c[j] * x[j];
        if (!best || obj < *best) best = obj;
      }
    }
  }
  return best;
}

/// Random LP with box bounds and rows built around an interior point, so it is
/// feasible and bounded by construction.
inline DenseLp random_bounded_lp(std::mt19937_64& rng, int max_vars = 8, int max_rows = 8) {
  std::uniform_int_distribution<int> nd(1, max_vars), md(1, max_rows), coin(0, 3);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), unit(0.0, 1.0);
  DenseLp p;
  p.n = nd(rng);
  const int m = md(rng);
  std::vector<double> x0(p.n);
  for (int j = 0; j < p.n; ++j) {
    p.lo.push_back(std::round(coef(rng)));
    p.up.push_back(p.lo[j] + 1.0 + std::round(9.0 * unit(rng)));
    x0[j] = p.lo[j] + unit(rng) * (p.up[j] - p.lo[j]);
    p.c.push_back(std::round(coef(rng) * 4.0) / 4.0);
  }
  int equalities = 0;
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(p.n);
    double act = 0.0;
    for (int j = 0; j < p.n; ++j) {
      row[j] = coin(rng) == 0 ? 0.0 : std::round(coef(rng) * 2.0) / 2.0;
    }
    if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; }))
      row[std::uniform_int_distribution<int>(0, p.n - 1)(rng)] = 1.0;
    for (int j = 0; j < p.n; ++j) act += row[j] * x0[j];
    const int kind = coin(rng);
    if (kind == 0 && equalities < 2) {
      ++equalities;
      p.sense.push_back(RowSense::Eq);
      p.b.push_back(act);
    } else if (kind % 2 == 1) {
      p.sense.push_back(RowSense::Le);
      p.b.push_back(std::ceil(act + unit(rng) * 3.0));
    } else {
      p.sense.push_back(RowSense::Ge);
      p.b.push_back(std::floor(act - unit(rng) * 3.0));
    }
    p.a.push_back(std::move(row));
  }
  return p;
}

/// Beale's classic example on which Dantzig pricing with naive tie-breaking cycles.
inline LpProblem beale_cycling_lp() {
  LpProblem lp;
  lp.name = "beale";
  const int x4 = lp.add_col("x4", -0.75);
  const int x5 = lp.add_col("x5", 150.0);
  const int x6 = lp.add_col("x6", -0.02);
  const int x7 = lp.add_col("x7", 6.0);
  lp.add_row("c1", {{x4, 0.25}, {x5, -60.0}, {x6, -0.04}, {x7, 9.0}}, RowSense::Le, 0.0);
  lp.add_row("c2", {{x4, 0.5}, {x5, -90.0}, {x6, -0.02}, {x7, 3.0}}, RowSense::Le, 0.0);
  lp.add_row("c3", {{x6, 1.0}}, RowSense::Le, 1.0);
  return lp;
}

}  // namespace h2dac::testing
