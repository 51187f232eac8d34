#pragma once

// Independent feasibility audit of a primal point.

#include <algorithm>
#include <cmath>
#include <vector>

#include "h2dac/error.hpp"
#include "h2dac/lp.hpp"

namespace h2dac {

struct RowViolation {
  int row;
  double violation;  // scaled by the row's infinity norm
};

struct AuditReport {
  double max_bound_violation = 0.0;  // absolute
  double max_row_violation = 0.0;    // |activity outside range| / ||a_i||_inf
  std::vector<RowViolation> worst_rows;  // descending, at most `keep`
};

inline AuditReport audit_solution(const LpProblem& lp, const std::vector<double>& primal,
                                  std::size_t keep = 10) {
  if (static_cast<int>(primal.size()) != lp.n_cols())
    throw InputError("audit_solution: primal has " + std::to_string(primal.size()) +
                     " entries, LP has " + std::to_string(lp.n_cols()) + " columns");
  AuditReport rep;
  for (int j = 0; j < lp.n_cols(); ++j) {
    const double v = std::max(lp.col_lower(j) - primal[j], primal[j] - lp.col_upper(j));
    rep.max_bound_violation = std::max(rep.max_bound_violation, std::max(v, 0.0));
  }
  std::vector<RowViolation> rows;
  for (int i = 0; i < lp.n_rows(); ++i) {
    auto [b, e] = lp.row_range(i);
    double act = 0.0, norm = 0.0;
    for (int k = b; k < e; ++k) {
      act += lp.row_values()[k] * primal[lp.row_cols()[k]];
      norm = std::max(norm, std::abs(lp.row_values()[k]));
    }
    double viol = std::max({lp.row_lower(i) - act, act - lp.row_upper(i), 0.0});
    if (viol > 0.0 && norm > 0.0) viol /= norm;
    if (viol > 0.0) rows.push_back({i, viol});
    rep.max_row_violation = std::max(rep.max_row_violation, viol);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RowViolation& a, const RowViolation& b) { return a.violation > b.violation; });
  if (rows.size() > keep) rows.resize(keep);
  rep.worst_rows = std::move(rows);
  return rep;
}

}  // namespace h2dac
