#pragma once

// Sparse linear program in row form with named columns and rows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "h2dac/error.hpp"

namespace h2dac {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { Le, Eq, Ge };

struct RowEntry {
  int col;
  double value;
};

/// minimize c'x subject to rows (a_i x {<=,=,>=} b_i) and lower <= x <= upper.
///
/// Rows are stored in compressed form. `add_row` merges duplicate column
/// references and drops entries that cancel to zero, so every stored row is
/// duplicate-free.
class LpProblem {
 public:
  std::string name = "LP";

  int n_cols() const { return static_cast<int>(obj_.size()); }
  int n_rows() const { return static_cast<int>(sense_.size()); }
  std::size_t n_nonzeros() const { return row_val_.size(); }

  int add_col(std::string col_name, double cost, double lower = 0.0, double upper = kInf) {
    if (!(lower <= upper)) throw InputError("add_col " + col_name + ": lower > upper");
    const int id = n_cols();
    if (!col_index_.emplace(col_name, id).second)
      throw InputError("add_col: duplicate column name " + col_name);
    obj_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    col_names_.push_back(std::move(col_name));
    return id;
  }

  int add_row(std::string row_name, std::vector<RowEntry> entries, RowSense sense, double rhs) {
    std::sort(entries.begin(), entries.end(),
              [](const RowEntry& a, const RowEntry& b) { return a.col < b.col; });
    const int id = n_rows();
    if (!row_index_.emplace(row_name, id).second)
      throw InputError("add_row: duplicate row name " + row_name);
    for (std::size_t k = 0; k < entries.size();) {
      const int c = entries[k].col;
      if (c < 0 || c >= n_cols()) throw InputError("add_row " + row_name + ": invalid column");
      double v = 0.0;
      for (; k < entries.size() && entries[k].col == c; ++k) v += entries[k].value;
      if (v != 0.0) {
        row_col_.push_back(c);
        row_val_.push_back(v);
      }
    }
    row_start_.push_back(static_cast<int>(row_col_.size()));
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    row_names_.push_back(std::move(row_name));
    return id;
  }

  double obj(int j) const { return obj_[j]; }
  double col_lower(int j) const { return lower_[j]; }
  double col_upper(int j) const { return upper_[j]; }
  const std::string& col_name(int j) const { return col_names_[j]; }
  const std::vector<double>& objective() const { return obj_; }
  const std::vector<double>& col_lowers() const { return lower_; }
  const std::vector<double>& col_uppers() const { return upper_; }

  void set_obj(int j, double c) { obj_[j] = c; }
  void set_col_bounds(int j, double lower, double upper) {
    if (!(lower <= upper)) throw InputError("set_col_bounds: lower > upper");
    lower_[j] = lower;
    upper_[j] = upper;
  }
  void set_rhs(int i, double b) { rhs_[i] = b; }

  RowSense sense(int i) const { return sense_[i]; }
  double rhs(int i) const { return rhs_[i]; }
  const std::string& row_name(int i) const { return row_names_[i]; }

  /// Lower/upper activity bounds implied by the sense.
  double row_lower(int i) const {
    return sense_[i] == RowSense::Le ? -kInf : rhs_[i];
  }
  double row_upper(int i) const {
    return sense_[i] == RowSense::Ge ? kInf : rhs_[i];
  }

  /// Half-open range [begin, end) of row i in `row_cols()` / `row_values()`.
  std::pair<int, int> row_range(int i) const { return {row_start_[i], row_start_[i + 1]}; }
  const std::vector<int>& row_cols() const { return row_col_; }
  const std::vector<double>& row_values() const { return row_val_; }

  int col_id(const std::string& n) const {
    auto it = col_index_.find(n);
    return it == col_index_.end() ? -1 : it->second;
  }
  int row_id(const std::string& n) const {
    auto it = row_index_.find(n);
    return it == row_index_.end() ? -1 : it->second;
  }

  double row_activity(int i, const std::vector<double>& x) const {
    double a = 0.0;
    for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) a += row_val_[k] * x[row_col_[k]];
    return a;
  }

  double objective_value(const std::vector<double>& x) const {
    double v = 0.0;
    for (int j = 0; j < n_cols(); ++j) v += obj_[j] * x[j];
    return v;
  }

  /// Throws InputError when an invariant is broken (NaN data, crossed bounds,
  /// references to missing columns, duplicate entries).
  void validate() const {
    for (int j = 0; j < n_cols(); ++j) {
      if (std::isnan(obj_[j]) || std::isinf(obj_[j]))
        throw InputError("column " + col_names_[j] + ": non-finite objective");
      if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
          lower_[j] == kInf || upper_[j] == -kInf)
        throw InputError("column " + col_names_[j] + ": invalid bounds");
    }
    for (int i = 0; i < n_rows(); ++i) {
      if (!std::isfinite(rhs_[i])) throw InputError("row " + row_names_[i] + ": non-finite rhs");
      int prev = -1;
      for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
        if (row_col_[k] <= prev || row_col_[k] >= n_cols())
          throw InputError("row " + row_names_[i] + ": invalid or duplicate column");
        if (!std::isfinite(row_val_[k])) throw InputError("row " + row_names_[i] + ": non-finite coefficient");
        prev = row_col_[k];
      }
    }
  }

 private:
  std::vector<double> obj_, lower_, upper_;
  std::vector<std::string> col_names_;
  std::vector<int> row_start_{0};
  std::vector<int> row_col_;
  std::vector<double> row_val_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
  std::vector<std::string> row_names_;
  std::unordered_map<std::string, int> col_index_, row_index_;
};

}  // namespace h2dac
