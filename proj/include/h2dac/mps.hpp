#pragma once

// Free-format MPS export.

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "h2dac/lp.hpp"

namespace h2dac {

namespace detail {

inline std::string mps_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Rows and columns appear in insertion order; the objective row is named OBJ.
/// Numbers carry 17 significant digits so the text round-trips exactly.
inline std::string export_mps(const LpProblem& lp) {
  lp.validate();
  using detail::mps_number;
  std::ostringstream out;
  out << "NAME " << lp.name << '\n';
  out << "ROWS\n";
  out << " N OBJ\n";
  for (int i = 0; i < lp.n_rows(); ++i) {
    const char s = lp.sense(i) == RowSense::Le ? 'L' : lp.sense(i) == RowSense::Ge ? 'G' : 'E';
    out << ' ' << s << ' ' << lp.row_name(i) << '\n';
  }

  // Column-major view of the rows.
  std::vector<std::vector<std::pair<int, double>>> cols(lp.n_cols());
  for (int i = 0; i < lp.n_rows(); ++i) {
    auto [b, e] = lp.row_range(i);
    for (int k = b; k < e; ++k) cols[lp.row_cols()[k]].emplace_back(i, lp.row_values()[k]);
  }
  out << "COLUMNS\n";
  for (int j = 0; j < lp.n_cols(); ++j) {
    // A column with no entries at all still needs one line so readers see it.
    if (lp.obj(j) != 0.0 || cols[j].empty())
      out << ' ' << lp.col_name(j) << " OBJ " << mps_number(lp.obj(j)) << '\n';
    for (auto [i, v] : cols[j]) out << ' ' << lp.col_name(j) << ' ' << lp.row_name(i) << ' ' << mps_number(v) << '\n';
  }
  out << "RHS\n";
  for (int i = 0; i < lp.n_rows(); ++i)
    if (lp.rhs(i) != 0.0) out << " RHS " << lp.row_name(i) << ' ' << mps_number(lp.rhs(i)) << '\n';
  out << "RANGES\n";
  out << "BOUNDS\n";
  for (int j = 0; j < lp.n_cols(); ++j) {
    const double lo = lp.col_lower(j), up = lp.col_upper(j);
    const std::string& nm = lp.col_name(j);
    if (lo == up) {
      out << " FX BND " << nm << ' ' << mps_number(lo) << '\n';
      continue;
    }
    if (std::isinf(lo) && std::isinf(up)) {
      out << " FR BND " << nm << '\n';
      continue;
    }
    if (std::isinf(lo)) out << " MI BND " << nm << '\n';
    else if (lo != 0.0) out << " LO BND " << nm << ' ' << mps_number(lo) << '\n';
    if (!std::isinf(up)) out << " UP BND " << nm << ' ' << mps_number(up) << '\n';
  }
  out << "ENDATA\n";
  return out.str();
}

}  // namespace h2dac
