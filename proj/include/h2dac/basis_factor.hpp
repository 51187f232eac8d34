#pragma once

// Sparse LU factorization of a simplex basis with product-form updates.
//
// The basis B is m x m; its columns are "positions" 0..m-1 and its rows are the
// constraint rows. factorize() performs right-looking Gaussian elimination with
// Markowitz pivot selection and threshold partial pivoting. Later column
// replacements are appended as eta matrices (B_new = B E), so
//   B_k^{-1} = E_k^{-1} ... E_1^{-1} U^{-1} L^{-1}.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace h2dac {

class BasisFactor {
 public:
  /// Fills `rows`/`vals` with the nonzeros of basis column `pos`.
  using ColumnSource = std::function<void(int pos, std::vector<int>& rows, std::vector<double>& vals)>;

  struct FactorReport {
    int rank = 0;
    std::vector<int> singular_positions;  // positions that could not be pivoted
    std::vector<int> unpivoted_rows;      // rows left without a pivot
  };

  double threshold = 0.1;          // relative pivot threshold (Markowitz)
  double abs_pivot_tol = 1e-11;    // smaller entries are treated as zero
  int markowitz_search = 4;        // candidate rows/cols inspected per pivot

  int dim() const { return m_; }
  int num_updates() const { return static_cast<int>(eta_r_.size()); }
  std::size_t eta_nonzeros() const { return eta_idx_.size(); }
  std::size_t lu_nonzeros() const { return L_idx_.size() + U_idx_.size() + U_piv_.size(); }

  FactorReport factorize(int m, const ColumnSource& source) {
    m_ = m;
    clear_factors();
    build_active(source);
    FactorReport rep = eliminate();
    release_active();
    return rep;
  }

  /// Solves B x = b. `b` is indexed by row and is overwritten; the result is
  /// indexed by basis position.
  void ftran(std::vector<double>& b, std::vector<double>& x) const {
    x.assign(m_, 0.0);
    for (std::size_t k = 0; k + 1 < L_start_.size(); ++k) {
      const double v = b[L_piv_row_[k]];
      if (v == 0.0) continue;
      for (int e = L_start_[k]; e < L_start_[k + 1]; ++e) b[L_idx_[e]] -= L_val_[e] * v;
    }
    for (int k = static_cast<int>(U_piv_.size()) - 1; k >= 0; --k) {
      double s = b[U_row_[k]];
      for (int e = U_start_[k]; e < U_start_[k + 1]; ++e) s -= U_val_[e] * x[U_idx_[e]];
      x[U_col_[k]] = s / U_piv_[k];
    }
    for (std::size_t t = 0; t < eta_r_.size(); ++t) {
      const int r = eta_r_[t];
      const double xr = x[r] / eta_piv_[t];
      x[r] = xr;
      if (xr == 0.0) continue;
      for (int e = eta_start_[t]; e < eta_start_[t + 1]; ++e) x[eta_idx_[e]] -= eta_val_[e] * xr;
    }
  }

  /// Solves B' y = c. `c` is indexed by basis position and is overwritten; the
  /// result is indexed by row.
  void btran(std::vector<double>& c, std::vector<double>& y) const {
    for (int t = static_cast<int>(eta_r_.size()) - 1; t >= 0; --t) {
      const int r = eta_r_[t];
      double s = c[r];
      for (int e = eta_start_[t]; e < eta_start_[t + 1]; ++e) s -= eta_val_[e] * c[eta_idx_[e]];
      c[r] = s / eta_piv_[t];
    }
    y.assign(m_, 0.0);
    for (std::size_t k = 0; k < U_piv_.size(); ++k) {
      const double z = c[U_col_[k]] / U_piv_[k];
      y[U_row_[k]] = z;
      if (z == 0.0) continue;
      for (int e = U_start_[k]; e < U_start_[k + 1]; ++e) c[U_idx_[e]] -= U_val_[e] * z;
    }
    for (int k = static_cast<int>(L_start_.size()) - 2; k >= 0; --k) {
      double s = 0.0;
      for (int e = L_start_[k]; e < L_start_[k + 1]; ++e) s += L_val_[e] * y[L_idx_[e]];
      y[L_piv_row_[k]] -= s;
    }
  }

  /// Replaces the column at position `r` by a column whose FTRAN image is `alpha`.
  void update(int r, const std::vector<double>& alpha, double drop_tol = 1e-14) {
    eta_r_.push_back(r);
    eta_piv_.push_back(alpha[r]);
    for (int i = 0; i < m_; ++i) {
      if (i == r || std::abs(alpha[i]) <= drop_tol) continue;
      eta_idx_.push_back(i);
      eta_val_.push_back(alpha[i]);
    }
    eta_start_.push_back(static_cast<int>(eta_idx_.size()));
  }

 private:
  int m_ = 0;

  // L as a sequence of column etas in elimination order.
  std::vector<int> L_piv_row_, L_start_{0}, L_idx_;
  std::vector<double> L_val_;
  // U rows in elimination order; U_idx_ holds basis positions.
  std::vector<int> U_row_, U_col_, U_start_{0}, U_idx_;
  std::vector<double> U_piv_, U_val_;
  // Product-form updates.
  std::vector<int> eta_r_, eta_start_{0}, eta_idx_;
  std::vector<double> eta_piv_, eta_val_;

  // Active submatrix during elimination.
  std::vector<std::vector<int>> row_cols_;
  std::vector<std::vector<double>> row_vals_;
  std::vector<std::vector<int>> col_rows_;
  std::vector<int> col_cnt_;
  std::vector<char> row_active_, col_active_;
  // Count buckets (doubly linked lists) for rows and columns.
  std::vector<int> cb_head_, cb_next_, cb_prev_, rb_head_, rb_next_, rb_prev_;
  int cb_min_ = 0, rb_min_ = 0;
  std::vector<int> work_pos_;
  std::vector<double> cmax_;
  std::vector<char> cmax_dirty_;

  void clear_factors() {
    L_piv_row_.clear(); L_start_.assign(1, 0); L_idx_.clear(); L_val_.clear();
    U_row_.clear(); U_col_.clear(); U_start_.assign(1, 0); U_idx_.clear();
    U_piv_.clear(); U_val_.clear();
    eta_r_.clear(); eta_start_.assign(1, 0); eta_idx_.clear(); eta_piv_.clear(); eta_val_.clear();
  }

  // Inner buffers keep their capacity for the next factorization.
  void release_active() {
    for (auto& v : row_cols_) v.clear();
    for (auto& v : row_vals_) v.clear();
    for (auto& v : col_rows_) v.clear();
  }

  // ----- bucket helpers ---------------------------------------------------
  static void bucket_insert(std::vector<int>& head, std::vector<int>& next, std::vector<int>& prev,
                            int& min_cnt, int item, int cnt) {
    prev[item] = -1;
    next[item] = head[cnt];
    if (head[cnt] >= 0) prev[head[cnt]] = item;
    head[cnt] = item;
    if (cnt < min_cnt) min_cnt = cnt;
  }
  static void bucket_remove(std::vector<int>& head, std::vector<int>& next, std::vector<int>& prev,
                            int item, int cnt) {
    if (prev[item] >= 0) next[prev[item]] = next[item];
    else head[cnt] = next[item];
    if (next[item] >= 0) prev[next[item]] = prev[item];
  }
  void col_move(int j, int old_cnt, int new_cnt) {
    bucket_remove(cb_head_, cb_next_, cb_prev_, j, old_cnt);
    bucket_insert(cb_head_, cb_next_, cb_prev_, cb_min_, j, new_cnt);
  }
  void row_move(int i, int old_cnt, int new_cnt) {
    bucket_remove(rb_head_, rb_next_, rb_prev_, i, old_cnt);
    bucket_insert(rb_head_, rb_next_, rb_prev_, rb_min_, i, new_cnt);
  }

  void build_active(const ColumnSource& source) {
    row_cols_.resize(m_);
    row_vals_.resize(m_);
    col_rows_.resize(m_);
    col_cnt_.assign(m_, 0);
    row_active_.assign(m_, 1);
    col_active_.assign(m_, 1);
    std::vector<int> rows;
    std::vector<double> vals;
    for (int j = 0; j < m_; ++j) {
      rows.clear();
      vals.clear();
      source(j, rows, vals);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (vals[k] == 0.0) continue;
        row_cols_[rows[k]].push_back(j);
        row_vals_[rows[k]].push_back(vals[k]);
        col_rows_[j].push_back(rows[k]);
      }
      col_cnt_[j] = static_cast<int>(col_rows_[j].size());
    }
    cb_head_.assign(m_ + 1, -1);
    cb_next_.assign(m_, -1);
    cb_prev_.assign(m_, -1);
    rb_head_.assign(m_ + 1, -1);
    rb_next_.assign(m_, -1);
    rb_prev_.assign(m_, -1);
    cb_min_ = rb_min_ = m_ + 1;
    for (int j = m_ - 1; j >= 0; --j)
      bucket_insert(cb_head_, cb_next_, cb_prev_, cb_min_, j, col_cnt_[j]);
    for (int i = m_ - 1; i >= 0; --i)
      bucket_insert(rb_head_, rb_next_, rb_prev_, rb_min_, i, static_cast<int>(row_cols_[i].size()));
    work_pos_.assign(m_, -1);
    cmax_.assign(m_, 0.0);
    cmax_dirty_.assign(m_, 1);
  }

  double entry(int i, int j) const {
    const auto& cols = row_cols_[i];
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] == j) return row_vals_[i][k];
    return 0.0;
  }

  // Largest active magnitude in column j. Cached until a pivot touches the
  // column; inactive rows are compacted out while scanning.
  double col_max(int j) {
    if (!cmax_dirty_[j]) return cmax_[j];
    double mx = 0.0;
    auto& rows = col_rows_[j];
    std::size_t keep = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const int i = rows[k];
      if (!row_active_[i]) continue;
      rows[keep++] = i;
      mx = std::max(mx, std::abs(entry(i, j)));
    }
    rows.resize(keep);
    cmax_[j] = mx;
    cmax_dirty_[j] = 0;
    return mx;
  }

  // Removes column j from the active matrix without pivoting (numerically zero).
  void drop_column(int j) {
    bucket_remove(cb_head_, cb_next_, cb_prev_, j, col_cnt_[j]);
    col_active_[j] = 0;
    for (int i : col_rows_[j]) {
      if (!row_active_[i]) continue;
      auto& cols = row_cols_[i];
      auto& vals = row_vals_[i];
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] != j) continue;
        const int old = static_cast<int>(cols.size());
        cols[k] = cols.back();
        vals[k] = vals.back();
        cols.pop_back();
        vals.pop_back();
        row_move(i, old, old - 1);
        break;
      }
    }
  }

  struct Pivot {
    int row = -1, col = -1;
    double value = 0.0;
    long long cost = std::numeric_limits<long long>::max();
  };

  FactorReport eliminate() {
    FactorReport rep;
    int remaining = m_;
    std::vector<int> singular;
    while (remaining > 0) {
      Pivot best;
      int searched = 0;
      while (cb_min_ <= m_ && cb_head_[cb_min_] < 0) ++cb_min_;
      while (rb_min_ <= m_ && rb_head_[rb_min_] < 0) ++rb_min_;
      // Empty columns are structurally singular.
      if (cb_min_ == 0) {
        const int j = cb_head_[0];
        drop_column(j);
        singular.push_back(j);
        --remaining;
        continue;
      }
      // Column singletons need no search.
      if (cb_min_ == 1) {
        const int j = cb_head_[1];
        int i = -1;
        for (int r : col_rows_[j])
          if (row_active_[r]) {
            i = r;
            break;
          }
        const double v = entry(i, j);
        if (std::abs(v) <= abs_pivot_tol) {
          drop_column(j);
          singular.push_back(j);
        } else {
          pivot_on(i, j, v);
          ++rep.rank;
        }
        --remaining;
        continue;
      }
      // Row singletons cause no fill and no growth in U.
      if (rb_min_ == 1) {
        const int i = rb_head_[1];
        const int j = row_cols_[i][0];
        const double v = row_vals_[i][0];
        if (std::abs(v) > abs_pivot_tol) {
          pivot_on(i, j, v);
          ++rep.rank;
          --remaining;
          continue;
        }
      }
      bool dropped = false;
      for (int cnt = std::min(cb_min_, std::max(rb_min_, 1)); cnt <= m_; ++cnt) {
        const long long lower = static_cast<long long>(cnt - 1) * (cnt - 1);
        if (best.row >= 0 && best.cost <= lower) break;
        for (int j = cnt >= cb_min_ ? cb_head_[cnt] : -1; j >= 0; j = cb_next_[j]) {
          const double mx = col_max(j);
          if (mx <= abs_pivot_tol) {
            drop_column(j);
            singular.push_back(j);
            --remaining;
            dropped = true;
            break;
          }
          for (int i : col_rows_[j]) {
            if (!row_active_[i]) continue;
            const double v = entry(i, j);
            if (std::abs(v) < threshold * mx || std::abs(v) <= abs_pivot_tol) continue;
            const long long c = static_cast<long long>(row_cols_[i].size() - 1) * (cnt - 1);
            if (c < best.cost || (c == best.cost && std::abs(v) > std::abs(best.value)))
              best = {i, j, v, c};
          }
          if (++searched >= markowitz_search && best.row >= 0) break;
        }
        if (dropped) break;
        if (searched >= markowitz_search && best.row >= 0) break;
        for (int i = cnt >= rb_min_ ? rb_head_[cnt] : -1; i >= 0; i = rb_next_[i]) {
          const auto& cols = row_cols_[i];
          for (std::size_t k = 0; k < cols.size(); ++k) {
            const int j = cols[k];
            const double v = row_vals_[i][k];
            if (std::abs(v) <= abs_pivot_tol) continue;
            const long long c = static_cast<long long>(cnt - 1) * (col_cnt_[j] - 1);
            if (c > best.cost) continue;
            if (std::abs(v) < threshold * col_max(j)) continue;
            if (c < best.cost || std::abs(v) > std::abs(best.value)) best = {i, j, v, c};
          }
          if (++searched >= markowitz_search && best.row >= 0) break;
        }
        if (searched >= markowitz_search && best.row >= 0) break;
      }
      if (dropped) continue;
      if (best.row < 0) {
        // Everything left is numerically zero.
        for (int j = 0; j < m_; ++j)
          if (col_active_[j]) {
            drop_column(j);
            singular.push_back(j);
            --remaining;
          }
        break;
      }
      pivot_on(best.row, best.col, best.value);
      --remaining;
      ++rep.rank;
    }
    rep.singular_positions = std::move(singular);
    for (int i = 0; i < m_; ++i)
      if (row_active_[i]) rep.unpivoted_rows.push_back(i);
    return rep;
  }

  void pivot_on(int p, int q, double piv) {
    auto& pcols = row_cols_[p];
    auto& pvals = row_vals_[p];

    // U row: the rest of the pivot row.
    U_row_.push_back(p);
    U_col_.push_back(q);
    U_piv_.push_back(piv);
    for (std::size_t k = 0; k < pcols.size(); ++k) {
      if (pcols[k] == q) continue;
      U_idx_.push_back(pcols[k]);
      U_val_.push_back(pvals[k]);
    }
    U_start_.push_back(static_cast<int>(U_idx_.size()));

    bucket_remove(rb_head_, rb_next_, rb_prev_, p, static_cast<int>(pcols.size()));
    row_active_[p] = 0;
    bucket_remove(cb_head_, cb_next_, cb_prev_, q, col_cnt_[q]);
    col_active_[q] = 0;
    for (int j : pcols) {
      if (j == q) continue;
      col_move(j, col_cnt_[j], col_cnt_[j] - 1);
      --col_cnt_[j];
      cmax_dirty_[j] = 1;
    }

    // Eliminate column q from the other active rows.
    L_piv_row_.push_back(p);
    for (int i : col_rows_[q]) {
      if (!row_active_[i]) continue;
      auto& cols = row_cols_[i];
      auto& vals = row_vals_[i];
      const int old_len = static_cast<int>(cols.size());
      double a_iq = 0.0;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] == q) {
          a_iq = vals[k];
          cols[k] = cols.back();
          vals[k] = vals.back();
          cols.pop_back();
          vals.pop_back();
          break;
        }
      }
      const double l = a_iq / piv;
      L_idx_.push_back(i);
      L_val_.push_back(l);
      if (l != 0.0 && pcols.size() > 1) {
        for (std::size_t k = 0; k < cols.size(); ++k) work_pos_[cols[k]] = static_cast<int>(k);
        for (std::size_t k = 0; k < pcols.size(); ++k) {
          const int j = pcols[k];
          if (j == q) continue;
          const int at = work_pos_[j];
          if (at >= 0) {
            vals[at] -= l * pvals[k];
          } else {
            work_pos_[j] = static_cast<int>(cols.size());
            cols.push_back(j);
            vals.push_back(-l * pvals[k]);
            col_rows_[j].push_back(i);
            col_move(j, col_cnt_[j], col_cnt_[j] + 1);
            ++col_cnt_[j];
          }
        }
        for (int j : cols) work_pos_[j] = -1;
      }
      row_move(i, old_len, static_cast<int>(cols.size()));
    }
    L_start_.push_back(static_cast<int>(L_idx_.size()));
    pcols.clear();
    pvals.clear();
  }
};

}  // namespace h2dac
