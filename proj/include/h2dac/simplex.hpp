#pragma once

// Bounded-variable revised simplex over a sparse LpProblem.
//
// Every row i gets a logical variable r_i = a_i x with bounds derived from the
// row sense, so the working system is A x - r = 0 with box bounds on all
// variables. When the slack basis can be made dual feasible by placing each
// nonbasic at the bound its cost prefers (always true for nonnegative costs on
// variables with a lower bound), a dual simplex with steepest-edge row pricing
// runs first. The primal simplex then finishes: phase 1 minimizes the sum of
// basic bound violations plus a shrinking multiple of the cost, phase 2 the
// objective. Primal pricing is Devex (default) or Dantzig with an optional
// partial-pricing window; a run of degenerate pivots switches to Bland's rule
// until progress resumes. Ratio tests use the Harris two-pass rule. Rows and
// columns are equilibrated by powers of two.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "h2dac/basis_factor.hpp"
#include "h2dac/error.hpp"
#include "h2dac/lp.hpp"

namespace h2dac {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

constexpr std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

enum class Pricing { Devex, Dantzig };
// Dual: run the dual simplex when the slack basis can be made dual feasible
// by bound placement, then finish with primal iterations. Primal: primal only.
enum class Algorithm { Dual, Primal };

struct SolveOptions {
  double feasibility_tol = 1e-7;  // on the scaled problem
  double optimality_tol = 1e-8;   // relative reduced-cost tolerance
  long iteration_limit = 2'000'000;
  bool bland_after_stall = true;
  int stall_length = 1000;        // consecutive degenerate pivots before Bland's rule
  bool scaling = true;
  int refactor_interval = 100;
  int pricing_window = 0;         // 0 = full pricing
  Pricing pricing = Pricing::Devex;
  Algorithm algorithm = Algorithm::Dual;
  // Phase 1 minimizes infeasibility plus this multiple of the (normalized)
  // true cost; the weight is cut by 10x whenever phase 1 stalls infeasible.
  double phase1_cost_weight = 0.01;
  std::ostream* log = nullptr;    // iteration log sink (e.g. &std::cerr)
  int log_every = 1000;
};

struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  std::vector<double> primal;       // per column
  std::vector<double> dual;         // per row (sign: d objective / d rhs)
  std::vector<double> reduced_cost; // per column
  std::vector<double> row_activity;
  double objective = 0.0;
  double dual_objective = 0.0;
  long iterations = 0;
  double phase1_objective = 0.0;    // sum of infeasibilities when Infeasible
  double max_primal_residual = 0.0; // bound + row violations (unscaled, absolute)
  double max_dual_residual = 0.0;   // dual infeasibility (unscaled)
  double complementarity = 0.0;     // sum |d_j| * distance of x_j to its active bound
  std::vector<double> unbounded_ray;  // column direction when Unbounded
  double seconds = 0.0;
};

namespace detail {

inline double pow2_round(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
  return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(s))));
}

class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& lp, const SolveOptions& opts) : lp_(lp), opt_(opts) {}

  SolveResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    setup();
    SolveResult res;
    res.status = SolveStatus::Optimal;
    if (opt_.algorithm == Algorithm::Dual && make_dual_feasible()) {
      const std::vector<double> cost = cost_;
      res.status = iterate_dual();
      cost_ = cost;
    }
    if (res.status != SolveStatus::IterationLimit) {
      phase_ = 1;
      duals_current_ = false;
      res.status = iterate();
    }
    res.iterations = iterations_;
    finish(res);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

 private:
  enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Zero };

  const LpProblem& lp_;
  SolveOptions opt_;
  int n_ = 0, m_ = 0, N_ = 0;

  // Scaled structural columns (CSC).
  std::vector<int> cstart_, cidx_;
  std::vector<double> cval_;
  std::vector<double> row_scale_, col_scale_;
  double obj_scale_ = 1.0;
  double omega_ = 0.0;   // cost weight inside the phase-1 objective
  double omega0_ = 0.0;

  std::vector<double> cost_, lo_, up_, x_;
  std::vector<VarState> state_;
  std::vector<int> head_, where_;

  BasisFactor factor_;
  long iterations_ = 0;
  int phase_ = 1;
  bool duals_current_ = false;
  double harris_tol_ = 1e-9;
  double pivot_tol_ = 1e-9;

  // Work vectors.
  std::vector<double> y_, d_, alpha_, work_, cb_, rho_, tau_;
  std::vector<double> dual_tol_;  // phase-2 reduced-cost tolerance per variable
  std::vector<double> weight_;    // Devex reference weights
  // Scaled rows (CSR) for pivot-row computation.
  std::vector<int> rstart_, rcol_;
  std::vector<double> rval_;
  std::vector<double> pivot_row_;
  std::vector<int> touched_;
  struct Candidate {
    int pos;
    double exact;
    bool to_upper;
  };
  mutable std::vector<Candidate> cands_, breaks_;

  void setup() {
    lp_.validate();
    n_ = lp_.n_cols();
    m_ = lp_.n_rows();
    N_ = n_ + m_;

    // Column-wise copy of A.
    std::vector<int> count(n_ + 1, 0);
    for (int c : lp_.row_cols()) ++count[c + 1];
    cstart_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) cstart_[j + 1] = cstart_[j] + count[j + 1];
    cidx_.assign(lp_.n_nonzeros(), 0);
    cval_.assign(lp_.n_nonzeros(), 0.0);
    std::vector<int> fill(cstart_.begin(), cstart_.end() - 1);
    for (int i = 0; i < m_; ++i) {
      auto [b, e] = lp_.row_range(i);
      for (int k = b; k < e; ++k) {
        const int j = lp_.row_cols()[k];
        cidx_[fill[j]] = i;
        cval_[fill[j]++] = lp_.row_values()[k];
      }
    }

    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    if (opt_.scaling) compute_scaling();
    for (int j = 0; j < n_; ++j)
      for (int k = cstart_[j]; k < cstart_[j + 1]; ++k)
        cval_[k] *= row_scale_[cidx_[k]] * col_scale_[j];

    cost_.assign(N_, 0.0);
    lo_.assign(N_, 0.0);
    up_.assign(N_, 0.0);
    double cmax = 0.0;
    for (int j = 0; j < n_; ++j) {
      cost_[j] = lp_.obj(j) * col_scale_[j];
      cmax = std::max(cmax, std::abs(cost_[j]));
      lo_[j] = lp_.col_lower(j) / col_scale_[j];
      up_[j] = lp_.col_upper(j) / col_scale_[j];
    }
    obj_scale_ = (opt_.scaling && cmax > 0.0) ? pow2_round(1.0 / cmax) : 1.0;
    for (int j = 0; j < n_; ++j) cost_[j] *= obj_scale_;
    const double cmax_scaled = cmax * obj_scale_;
    omega0_ = cmax_scaled > 0.0 ? std::max(0.0, opt_.phase1_cost_weight) / cmax_scaled : 0.0;
    omega_ = omega0_;
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = lp_.row_lower(i) * row_scale_[i];
      up_[n_ + i] = lp_.row_upper(i) * row_scale_[i];
    }

    x_.assign(N_, 0.0);
    state_.assign(N_, VarState::Zero);
    where_.assign(N_, -1);
    head_.assign(m_, 0);
    for (int j = 0; j < n_; ++j) set_nonbasic_default(j);
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      where_[n_ + i] = i;
      state_[n_ + i] = VarState::Basic;
    }
    harris_tol_ = std::min(1e-9, opt_.feasibility_tol);

    // A scaled reduced cost d' maps back to d'/(col_scale*obj_scale) for a
    // structural and d'*row_scale/obj_scale for a logical. Tighten the test
    // where that factor magnifies, so optimality holds in original units too.
    dual_tol_.assign(N_, opt_.optimality_tol);
    for (int j = 0; j < n_; ++j)
      dual_tol_[j] = std::max(1e-12, opt_.optimality_tol * std::min(1.0, col_scale_[j] * obj_scale_));
    for (int i = 0; i < m_; ++i)
      dual_tol_[n_ + i] =
          std::max(1e-12, opt_.optimality_tol * std::min(1.0, obj_scale_ / row_scale_[i]));
    weight_.assign(N_, 1.0);

    rstart_.assign(m_ + 1, 0);
    for (int k = 0; k < static_cast<int>(cidx_.size()); ++k) ++rstart_[cidx_[k] + 1];
    for (int i = 0; i < m_; ++i) rstart_[i + 1] += rstart_[i];
    rcol_.assign(cidx_.size(), 0);
    rval_.assign(cidx_.size(), 0.0);
    {
      std::vector<int> at(rstart_.begin(), rstart_.end() - 1);
      for (int j = 0; j < n_; ++j)
        for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) {
          rcol_[at[cidx_[k]]] = j;
          rval_[at[cidx_[k]]++] = cval_[k];
        }
    }
    pivot_row_.assign(N_, 0.0);
    refactor();
  }

  static constexpr double kMaxScale = 1024.0;

  // Geometric-mean equilibration, a few sweeps, rounded to powers of two.
  void compute_scaling() {
    std::vector<double> rs(m_, 1.0), cs(n_, 1.0);
    for (int pass = 0; pass < 6; ++pass) {
      std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
      for (int j = 0; j < n_; ++j)
        for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) {
          const double v = std::abs(cval_[k]) * cs[j];
          if (v == 0.0) continue;
          rmin[cidx_[k]] = std::min(rmin[cidx_[k]], v);
          rmax[cidx_[k]] = std::max(rmax[cidx_[k]], v);
        }
      for (int i = 0; i < m_; ++i)
        if (rmax[i] > 0.0) rs[i] = 1.0 / std::sqrt(rmin[i] * rmax[i]);
      for (int j = 0; j < n_; ++j) {
        double mn = kInf, mx = 0.0;
        for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) {
          const double v = std::abs(cval_[k]) * rs[cidx_[k]];
          if (v == 0.0) continue;
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
        if (mx > 0.0) cs[j] = 1.0 / std::sqrt(mn * mx);
      }
    }
    // Clamp so a few tiny entries cannot push one column far from the rest,
    // which would shrink the objective scale and hide real reduced costs.
    auto clamp = [](double v) { return std::clamp(v, 1.0 / kMaxScale, kMaxScale); };
    for (int i = 0; i < m_; ++i) row_scale_[i] = pow2_round(clamp(rs[i]));
    for (int j = 0; j < n_; ++j) col_scale_[j] = pow2_round(clamp(cs[j]));
  }

  void set_nonbasic_default(int j) {
    where_[j] = -1;
    if (std::isfinite(lo_[j])) {
      state_[j] = VarState::AtLower;
      x_[j] = lo_[j];
    } else if (std::isfinite(up_[j])) {
      state_[j] = VarState::AtUpper;
      x_[j] = up_[j];
    } else {
      state_[j] = VarState::Zero;
      x_[j] = 0.0;
    }
  }

  // Basis column of variable `var` (structural or logical) into rows/vals.
  void column_of(int var, std::vector<int>& rows, std::vector<double>& vals) const {
    if (var < n_) {
      for (int k = cstart_[var]; k < cstart_[var + 1]; ++k) {
        rows.push_back(cidx_[k]);
        vals.push_back(cval_[k]);
      }
    } else {
      rows.push_back(var - n_);
      vals.push_back(-1.0);
    }
  }

  void refactor() {
    duals_current_ = false;
    for (int attempt = 0; attempt < 3; ++attempt) {
      auto rep = factor_.factorize(m_, [this](int pos, std::vector<int>& r, std::vector<double>& v) {
        column_of(head_[pos], r, v);
      });
      if (rep.singular_positions.empty()) break;
      // Swap singular columns for the logicals of the unpivoted rows.
      for (std::size_t k = 0; k < rep.singular_positions.size(); ++k) {
        const int pos = rep.singular_positions[k];
        const int out = head_[pos];
        const int row = rep.unpivoted_rows[k];
        const int in = n_ + row;
        set_nonbasic_default(out);
        if (state_[out] == VarState::Zero) x_[out] = 0.0;
        head_[pos] = in;
        where_[in] = pos;
        state_[in] = VarState::Basic;
      }
    }
    compute_basic_values();
  }

  // x_B = -B^{-1} N x_N
  void compute_basic_values() {
    work_.assign(m_, 0.0);
    for (int j = 0; j < N_; ++j) {
      if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
      if (j < n_) {
        for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) work_[cidx_[k]] -= cval_[k] * x_[j];
      } else {
        work_[j - n_] += x_[j];
      }
    }
    factor_.ftran(work_, alpha_);
    for (int i = 0; i < m_; ++i) x_[head_[i]] = alpha_[i];
  }

  double infeasibility(int var) const {
    const double v = x_[var];
    if (v < lo_[var] - opt_.feasibility_tol) return lo_[var] - v;
    if (v > up_[var] + opt_.feasibility_tol) return v - up_[var];
    return 0.0;
  }

  double sum_infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) s += infeasibility(head_[i]);
    return s;
  }

  double phase_cost(int var) const {
    if (phase_ == 2) return cost_[var];
    const double c = omega_ * cost_[var];
    if (state_[var] != VarState::Basic) return c;
    const double v = x_[var];
    if (v < lo_[var] - opt_.feasibility_tol) return c - 1.0;
    if (v > up_[var] + opt_.feasibility_tol) return c + 1.0;
    return c;
  }

  void compute_duals() {
    cb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) cb_[i] = phase_cost(head_[i]);
    factor_.btran(cb_, y_);
    d_.assign(N_, 0.0);
    for (int j = 0; j < N_; ++j)
      if (state_[j] != VarState::Basic) d_[j] = reduced_cost(j);
  }

  double reduced_cost(int j) const {
    if (j < n_) {
      double d = phase_cost(j);
      for (int k = cstart_[j]; k < cstart_[j + 1]; ++k) d -= y_[cidx_[k]] * cval_[k];
      return d;
    }
    return phase_cost(j) + y_[j - n_];
  }

  // Attractiveness of nonbasic j given its reduced cost; 0 when not a candidate.
  double score(int j, double d) const {
    const double tol = phase_ == 2 ? dual_tol_[j] : opt_.optimality_tol;
    double gain = 0.0;
    switch (state_[j]) {
      case VarState::AtLower:
        gain = (d < -tol && up_[j] > lo_[j]) ? -d : 0.0;
        break;
      case VarState::AtUpper:
        gain = (d > tol && up_[j] > lo_[j]) ? d : 0.0;
        break;
      case VarState::Zero:
        gain = std::abs(d) > tol ? std::abs(d) : 0.0;
        break;
      default:
        return 0.0;
    }
    if (gain == 0.0 || opt_.pricing == Pricing::Dantzig) return gain;
    return gain * gain / weight_[j];
  }

  int price(bool bland, double& d_enter) {
    if (bland) {
      for (int j = 0; j < N_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        const double d = d_[j];
        if (score(j, d) > 0.0) {
          d_enter = d;
          return j;
        }
      }
      return -1;
    }
    const int window = opt_.pricing_window > 0 ? opt_.pricing_window : N_;
    int best = -1;
    double best_score = 0.0;
    int scanned = 0;
    for (int step = 0; step < N_; ++step) {
      const int j = (price_start_ + step) % N_;
      if (state_[j] != VarState::Basic) {
        const double d = d_[j];
        const double sc = score(j, d);
        if (sc > best_score) {
          best_score = sc;
          best = j;
          d_enter = d;
        }
      }
      if (++scanned >= window && best >= 0) {
        price_start_ = (j + 1) % N_;
        break;
      }
    }
    return best;
  }
  int price_start_ = 0;

  void ftran_column(int var) {
    work_.assign(m_, 0.0);
    if (var < n_) {
      for (int k = cstart_[var]; k < cstart_[var + 1]; ++k) work_[cidx_[k]] = cval_[k];
    } else {
      work_[var - n_] = -1.0;
    }
    factor_.ftran(work_, alpha_);
  }

  struct Ratio {
    int leave_pos = -1;     // -1: bound flip or unbounded
    double theta = kInf;
    bool to_upper = false;  // bound the leaving variable lands on
  };

  // Block on basic position i for a rate of change `rate` (dx_B[i] / dtheta).
  // Returns false when position i does not block. `relaxed` gets the Harris
  // bound, `exact` the true step, `to_upper` the target bound.
  bool block(int i, double rate, double& relaxed, double& exact, bool& to_upper) const {
    const int v = head_[i];
    const double xv = x_[v];
    const double tol = harris_tol_;
    if (phase_ == 1) {
      if (xv < lo_[v] - opt_.feasibility_tol) {
        if (rate <= 0.0) return false;
        exact = (lo_[v] - xv) / rate;
        relaxed = (lo_[v] - xv + tol) / rate;
        to_upper = false;
        return true;
      }
      if (xv > up_[v] + opt_.feasibility_tol) {
        if (rate >= 0.0) return false;
        exact = (xv - up_[v]) / -rate;
        relaxed = (xv - up_[v] + tol) / -rate;
        to_upper = true;
        return true;
      }
    }
    if (rate < 0.0) {
      if (!std::isfinite(lo_[v])) return false;
      exact = (xv - lo_[v]) / -rate;
      relaxed = (xv - lo_[v] + tol) / -rate;
      to_upper = false;
      return true;
    }
    if (!std::isfinite(up_[v])) return false;
    exact = (up_[v] - xv) / rate;
    relaxed = (up_[v] - xv + tol) / rate;
    to_upper = true;
    return true;
  }

  // Phase-1 long step: infeasible basics that reach their violated bound are
  // breakpoints of the piecewise-linear infeasibility sum. Pass them while its
  // slope stays negative; feasible basics block as in phase 2.
  Ratio ratio_test_phase1(int dir, double d_enter) const {
    Ratio r;
    double theta_max = kInf;
    cands_.clear();
    breaks_.clear();
    for (int i = 0; i < m_; ++i) {
      const double a = alpha_[i];
      if (std::abs(a) < pivot_tol_) continue;
      const double rate = -dir * a;
      const int v = head_[i];
      const double xv = x_[v];
      const bool below = xv < lo_[v] - opt_.feasibility_tol;
      const bool above = xv > up_[v] + opt_.feasibility_tol;
      if (below || above) {
        if (below ? rate <= 0.0 : rate >= 0.0) continue;  // moving away: no breakpoint
        const double to_bound = below ? (lo_[v] - xv) / rate : (xv - up_[v]) / -rate;
        breaks_.push_back({i, to_bound, !below});
        // Past that bound it is feasible and blocks at the opposite one.
        const double far = below ? up_[v] : lo_[v];
        if (!std::isfinite(far)) continue;
        const double exact = below ? (far - xv) / rate : (xv - far) / -rate;
        const double relaxed = below ? (far - xv + harris_tol_) / rate : (xv - far + harris_tol_) / -rate;
        if (exact > theta_max) continue;
        theta_max = std::min(theta_max, relaxed);
        cands_.push_back({i, exact, below});
        continue;
      }
      double relaxed, exact;
      bool to_upper;
      if (!block(i, rate, relaxed, exact, to_upper)) continue;
      if (exact > theta_max) continue;
      theta_max = std::min(theta_max, relaxed);
      cands_.push_back({i, exact, to_upper});
    }
    std::sort(breaks_.begin(), breaks_.end(), [this](const Candidate& a, const Candidate& b) {
      if (a.exact != b.exact) return a.exact < b.exact;
      return std::abs(alpha_[a.pos]) > std::abs(alpha_[b.pos]);
    });
    double slope = -std::abs(d_enter);
    for (const auto& b : breaks_) {
      if (b.exact > theta_max) break;
      slope += std::abs(alpha_[b.pos]);
      if (slope >= 0.0) {
        r.leave_pos = b.pos;
        r.theta = std::max(b.exact, 0.0);
        r.to_upper = b.to_upper;
        return r;
      }
    }
    if (std::isfinite(theta_max)) {
      double best_alpha = 0.0;
      for (const auto& c : cands_) {
        if (c.exact > theta_max) continue;
        const double a = std::abs(alpha_[c.pos]);
        if (a > best_alpha) {
          best_alpha = a;
          r.leave_pos = c.pos;
          r.theta = std::max(c.exact, 0.0);
          r.to_upper = c.to_upper;
        }
      }
      return r;
    }
    if (!breaks_.empty()) {
      const auto& b = breaks_.back();
      r.leave_pos = b.pos;
      r.theta = std::max(b.exact, 0.0);
      r.to_upper = b.to_upper;
    }
    return r;
  }

  Ratio ratio_test(int dir, bool bland) const {
    Ratio r;
    if (bland) {
      double best = kInf;
      int best_var = -1;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha_[i];
        if (std::abs(a) < pivot_tol_) continue;
        double relaxed, exact;
        bool to_upper;
        if (!block(i, -dir * a, relaxed, exact, to_upper)) continue;
        exact = std::max(exact, 0.0);
        if (exact < best - 1e-12 ||
            (exact <= best + 1e-12 && head_[i] < best_var)) {
          best = exact;
          best_var = head_[i];
          r.leave_pos = i;
          r.theta = exact;
          r.to_upper = to_upper;
        }
      }
      return r;
    }
    // Pass 1 finds the Harris bound and keeps the positions that might still
    // qualify; pass 2 picks the largest pivot among them.
    double theta_max = kInf;
    cands_.clear();
    for (int i = 0; i < m_; ++i) {
      const double a = alpha_[i];
      if (std::abs(a) < pivot_tol_) continue;
      double relaxed, exact;
      bool to_upper;
      if (!block(i, -dir * a, relaxed, exact, to_upper)) continue;
      if (exact > theta_max) continue;
      theta_max = std::min(theta_max, relaxed);
      cands_.push_back({i, exact, to_upper});
    }
    if (!std::isfinite(theta_max)) return r;
    double best_alpha = 0.0;
    for (const auto& c : cands_) {
      if (c.exact > theta_max) continue;
      const double a = std::abs(alpha_[c.pos]);
      if (a > best_alpha) {
        best_alpha = a;
        r.leave_pos = c.pos;
        r.theta = std::max(c.exact, 0.0);
        r.to_upper = c.to_upper;
      }
    }
    return r;
  }

  void log_line(const char* what) {
    if (!opt_.log) return;
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
    *opt_.log << "simplex " << what << " iter " << iterations_ << " phase " << phase_
              << " obj " << obj / obj_scale_ << " infeas " << sum_infeasibility() << '\n';
  }

  SolveStatus iterate() {
    int degenerate_run = 0;
    bool bland = false;
    bool fresh = true;  // factor has no updates since the last refactor
    int numeric_retries = 0;
    while (true) {
      if (iterations_ >= opt_.iteration_limit) return SolveStatus::IterationLimit;
      if (factor_.num_updates() >= opt_.refactor_interval ||
          factor_.eta_nonzeros() > 3 * (factor_.lu_nonzeros() + static_cast<std::size_t>(m_))) {
        refactor();
        fresh = true;
      }
      const int phase = sum_infeasibility() > 0.0 ? 1 : 2;
      // Phase-2 duals are carried across pivots by update_weights(); phase-1
      // costs move with the infeasibilities, so those are recomputed.
      const bool recompute = phase != 2 || phase_ != 2 || !duals_current_;
      phase_ = phase;
      if (recompute) compute_duals();
      duals_current_ = phase_ == 2 && opt_.pricing == Pricing::Devex;
      double d_enter = 0.0;
      const int q = price(bland, d_enter);
      if (q < 0) {
        if (!fresh) {
          refactor();
          fresh = true;
          continue;
        }
        if (phase_ == 1 && omega_ > 0.0) {
          omega_ = omega_ > 1e-4 * omega0_ ? omega_ * 0.1 : 0.0;
          continue;
        }
        return phase_ == 1 ? SolveStatus::Infeasible : SolveStatus::Optimal;
      }
      ftran_column(q);
      const int dir = d_enter < 0.0 ? 1 : -1;
      Ratio r = (phase_ == 1 && !bland) ? ratio_test_phase1(dir, d_enter) : ratio_test(dir, bland);
      const double range = up_[q] - lo_[q];
      if (r.leave_pos < 0 && !std::isfinite(range)) {
        if (!fresh && numeric_retries < 2) {
          ++numeric_retries;
          refactor();
          fresh = true;
          continue;
        }
        if (phase_ == 2) {
          unbounded_var_ = q;
          unbounded_dir_ = dir;
          return SolveStatus::Unbounded;
        }
        if (omega_ > 0.0) {
          omega_ = 0.0;  // the cost term made phase 1 unbounded
          continue;
        }
        // Phase 1 cannot be unbounded; drop to Bland's rule to escape.
        bland = true;
        continue;
      }
      numeric_retries = 0;
      ++iterations_;
      if (opt_.log && opt_.log_every > 0 && iterations_ % opt_.log_every == 0) log_line("progress");

      if (std::isfinite(range) && range <= r.theta) {
        // Bound flip, no basis change.
        const double step = dir * range;
        x_[q] += step;
        state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
        x_[q] = dir > 0 ? up_[q] : lo_[q];
        for (int i = 0; i < m_; ++i)
          if (alpha_[i] != 0.0) x_[head_[i]] -= step * alpha_[i];
        degenerate_run = 0;
        bland = false;
        continue;
      }

      const double theta = r.theta;
      if (theta * std::abs(d_enter) <= 1e-12) {
        if (++degenerate_run >= opt_.stall_length && opt_.bland_after_stall) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      const double step = dir * theta;
      x_[q] += step;
      for (int i = 0; i < m_; ++i)
        if (alpha_[i] != 0.0) x_[head_[i]] -= step * alpha_[i];

      const int leave = head_[r.leave_pos];
      if (opt_.pricing == Pricing::Devex) update_weights(q, leave, r.leave_pos);
      state_[leave] = r.to_upper ? VarState::AtUpper : VarState::AtLower;
      x_[leave] = r.to_upper ? up_[leave] : lo_[leave];
      where_[leave] = -1;
      head_[r.leave_pos] = q;
      where_[q] = r.leave_pos;
      state_[q] = VarState::Basic;
      factor_.update(r.leave_pos, alpha_);
      fresh = false;
    }
  }
  // rho = row r of B^{-1}; pivot_row_[j] = row r of B^{-1} [A -I] for the
  // entries listed in touched_. Callers reset pivot_row_ afterwards.
  void compute_pivot_row(int r) {
    cb_.assign(m_, 0.0);
    cb_[r] = 1.0;
    factor_.btran(cb_, rho_);
    touched_.clear();
    for (int i = 0; i < m_; ++i) {
      const double v = rho_[i];
      if (v == 0.0) continue;
      for (int k = rstart_[i]; k < rstart_[i + 1]; ++k) {
        const int j = rcol_[k];
        if (pivot_row_[j] == 0.0) touched_.push_back(j);
        pivot_row_[j] += v * rval_[k];
        if (pivot_row_[j] == 0.0) pivot_row_[j] = 1e-300;
      }
      const int lj = n_ + i;
      if (pivot_row_[lj] == 0.0) touched_.push_back(lj);
      pivot_row_[lj] -= v;
      if (pivot_row_[lj] == 0.0) pivot_row_[lj] = 1e-300;
    }
  }

  // Moves each nonbasic to the bound its cost sign prefers. False when some
  // variable cannot be placed (free with a cost, or missing the needed bound).
  bool make_dual_feasible() {
    phase_ = 2;
    compute_duals();
    for (int j = 0; j < N_; ++j) {
      if (state_[j] == VarState::Basic) continue;
      const double d = d_[j];
      const double tol = dual_tol_[j];
      if (d < -tol) {
        if (!std::isfinite(up_[j])) return false;
        state_[j] = VarState::AtUpper;
        x_[j] = up_[j];
      } else if (d > tol) {
        if (!std::isfinite(lo_[j])) return false;
        state_[j] = VarState::AtLower;
        x_[j] = lo_[j];
      } else if (state_[j] == VarState::Zero && d != 0.0) {
        return false;
      }
    }
    compute_basic_values();
    return true;
  }

  // Restores dual feasibility lost to round-off after a refactor: boxed
  // variables flip bounds, the others get their cost shifted so d_j = 0.
  // Shifts are dropped when the dual loop ends.
  void repair_duals() {
    bool flipped = false;
    for (int j = 0; j < N_; ++j) {
      const double d = d_[j];
      const bool boxed = std::isfinite(lo_[j]) && std::isfinite(up_[j]);
      bool bad = false;
      switch (state_[j]) {
        case VarState::AtLower: bad = d < -dual_tol_[j] && up_[j] > lo_[j]; break;
        case VarState::AtUpper: bad = d > dual_tol_[j] && up_[j] > lo_[j]; break;
        case VarState::Zero: bad = std::abs(d) > dual_tol_[j]; break;
        default: break;
      }
      if (!bad) continue;
      if (boxed && state_[j] != VarState::Zero) {
        const bool up = state_[j] == VarState::AtLower;
        state_[j] = up ? VarState::AtUpper : VarState::AtLower;
        x_[j] = up ? up_[j] : lo_[j];
        flipped = true;
      } else {
        cost_[j] -= d;
        d_[j] = 0.0;
      }
    }
    if (flipped) compute_basic_values();
  }

  // Dual simplex with dual steepest-edge row weights (exact for the slack
  // start) and a two-pass Harris ratio test.
  // Returns Optimal when primal feasibility is reached, Infeasible when a row
  // has no entering candidate (the primal loop then certifies), and
  // IterationLimit. Loss of dual feasibility after a refactor hands over to
  // the primal loop as well.
  SolveStatus iterate_dual() {
    std::vector<double> dw(m_, 1.0);
    bool fresh = true;
    while (true) {
      if (iterations_ >= opt_.iteration_limit) return SolveStatus::IterationLimit;
      if (factor_.num_updates() >= opt_.refactor_interval ||
          factor_.eta_nonzeros() > 3 * (factor_.lu_nonzeros() + static_cast<std::size_t>(m_))) {
        const std::vector<int> before = head_;
        refactor();
        if (head_ != before) std::fill(dw.begin(), dw.end(), 1.0);
        compute_basic_values();
        compute_duals();
        repair_duals();
        fresh = true;
      }
      // Leaving row: largest squared infeasibility over its weight.
      int r = -1;
      double best = 0.0, delta = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int v = head_[i];
        const double xv = x_[v];
        double viol;
        if (xv < lo_[v] - opt_.feasibility_tol) viol = xv - lo_[v];
        else if (xv > up_[v] + opt_.feasibility_tol) viol = xv - up_[v];
        else continue;
        const double sc = viol * viol / dw[i];
        if (sc > best) {
          best = sc;
          r = i;
          delta = viol;
        }
      }
      if (r < 0) {
        if (!fresh) {
          refactor();
          compute_basic_values();
          compute_duals();
          repair_duals();
          fresh = true;
          continue;
        }
        return SolveStatus::Optimal;
      }
      const int sgn = delta < 0.0 ? 1 : -1;  // direction the leaving variable must move
      compute_pivot_row(r);

      // Eligible j: moving j off its bound pushes x_p toward feasibility,
      // i.e. -alpha_rj * dz_j has sign sgn.
      double theta_max = kInf;
      cands_.clear();
      for (int j : touched_) {
        const double a = pivot_row_[j];
        if (state_[j] == VarState::Basic || std::abs(a) < pivot_tol_) continue;
        const double sa = sgn * a;
        bool ok = false;
        switch (state_[j]) {
          case VarState::AtLower: ok = sa < 0.0 && up_[j] > lo_[j]; break;
          case VarState::AtUpper: ok = sa > 0.0 && up_[j] > lo_[j]; break;
          case VarState::Zero: ok = true; break;
          default: break;
        }
        if (!ok) continue;
        const double dj = std::abs(d_[j]);
        const double exact = dj / std::abs(a);
        if (exact > theta_max) continue;
        theta_max = std::min(theta_max, (dj + dual_tol_[j]) / std::abs(a));
        cands_.push_back({j, exact, false});
      }
      int q = -1;
      double best_a = 0.0;
      for (const auto& c : cands_) {
        if (c.exact > theta_max) continue;
        const double a = std::abs(pivot_row_[c.pos]);
        if (a > best_a) {
          best_a = a;
          q = c.pos;
        }
      }
      if (q < 0) {
        for (int j : touched_) pivot_row_[j] = 0.0;
        if (!fresh) {
          refactor();
          compute_basic_values();
          compute_duals();
          repair_duals();
          fresh = true;
          continue;
        }
        return SolveStatus::Infeasible;
      }
      const double arq_row = pivot_row_[q];
      ftran_column(q);
      const double arq = alpha_[r];
      if (std::abs(arq - arq_row) > 1e-7 * (1.0 + std::abs(arq)) || std::abs(arq) < pivot_tol_) {
        for (int j : touched_) pivot_row_[j] = 0.0;
        if (fresh) return SolveStatus::Infeasible;
        refactor();
        compute_basic_values();
        compute_duals();
        repair_duals();
        fresh = true;
        continue;
      }
      ++iterations_;
      if (opt_.log && opt_.log_every > 0 && iterations_ % opt_.log_every == 0) log_line("dual");

      // Dual update: d_q becomes zero, the leaving variable takes -step.
      const int leave = head_[r];
      const double step = d_[q] / arq;
      for (int i = 0; i < m_; ++i) y_[i] += step * rho_[i];
      for (int j : touched_) {
        const double a = pivot_row_[j];
        pivot_row_[j] = 0.0;
        if (state_[j] != VarState::Basic) d_[j] -= step * a;
      }
      d_[leave] = -step;
      d_[q] = 0.0;

      // Primal update: the leaving variable lands on its violated bound.
      const double target = sgn > 0 ? lo_[leave] : up_[leave];
      const double t = (x_[leave] - target) / arq;
      x_[q] += t;
      for (int i = 0; i < m_; ++i)
        if (alpha_[i] != 0.0) x_[head_[i]] -= t * alpha_[i];

      // Steepest-edge weights ||e_i^T B^{-1}||^2, updated with tau = B^{-1} rho.
      double wr = 0.0;
      for (int i = 0; i < m_; ++i) wr += rho_[i] * rho_[i];
      factor_.ftran(rho_, tau_);
      for (int i = 0; i < m_; ++i) {
        if (i == r || alpha_[i] == 0.0) continue;
        const double k = alpha_[i] / arq;
        dw[i] = std::max(dw[i] + k * (k * wr - 2.0 * tau_[i]), 1e-4);
      }
      dw[r] = std::max(wr / (arq * arq), 1e-4);

      state_[leave] = sgn > 0 ? VarState::AtLower : VarState::AtUpper;
      x_[leave] = target;
      where_[leave] = -1;
      head_[r] = q;
      where_[q] = r;
      state_[q] = VarState::Basic;
      factor_.update(r, alpha_);
      fresh = false;
    }
  }

  // Devex reference-weight update for entering q and leaving basic variable
  // `leave` at position r; needs row r of B^{-1} [A -I].
  void update_weights(int q, int leave, int r) {
    compute_pivot_row(r);
    const double arq = alpha_[r];
    const bool carry = phase_ == 2 && duals_current_;
    const double step = carry ? d_[q] / arq : 0.0;
    if (carry)
      for (int i = 0; i < m_; ++i) y_[i] += step * rho_[i];
    const double wq = weight_[q];
    double wmax = 0.0;
    for (int j : touched_) {
      const double a = pivot_row_[j];
      pivot_row_[j] = 0.0;
      if (j == q || state_[j] == VarState::Basic) continue;
      if (carry) d_[j] -= step * a;
      const double ratio = a / arq;
      weight_[j] = std::max(weight_[j], ratio * ratio * wq);
      wmax = std::max(wmax, weight_[j]);
    }
    if (carry) {
      d_[leave] = -step;
      d_[q] = 0.0;
    }
    weight_[leave] = std::max(wq / (arq * arq), 1.0);
    wmax = std::max(wmax, weight_[leave]);
    if (wmax > 1e7) std::fill(weight_.begin(), weight_.end(), 1.0);
  }

  int unbounded_var_ = -1;
  int unbounded_dir_ = 1;

  void finish(SolveResult& res) {
    // Unscale primal values.
    res.primal.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) res.primal[j] = x_[j] * col_scale_[j];
    res.row_activity.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) res.row_activity[i] = lp_.row_activity(i, res.primal);
    res.objective = lp_.objective_value(res.primal);

    if (res.status == SolveStatus::Infeasible) {
      res.phase1_objective = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int v = head_[i];
        const double scale = v < n_ ? col_scale_[v] : 1.0 / row_scale_[v - n_];
        res.phase1_objective += infeasibility(v) * scale;
      }
    }
    if (res.status == SolveStatus::Unbounded) {
      res.unbounded_ray.assign(n_, 0.0);
      if (unbounded_var_ < n_) res.unbounded_ray[unbounded_var_] = unbounded_dir_ * col_scale_[unbounded_var_];
      for (int i = 0; i < m_; ++i) {
        const int v = head_[i];
        if (v < n_) res.unbounded_ray[v] = -unbounded_dir_ * alpha_[i] * col_scale_[v];
      }
    }

    // Duals and reduced costs of the final basis (phase 2 costs).
    phase_ = 2;
    compute_duals();
    res.dual.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) res.dual[i] = y_[i] * row_scale_[i] / obj_scale_;
    res.reduced_cost.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      double d = lp_.obj(j);
      auto c = j;
      for (int k = cstart_[c]; k < cstart_[c + 1]; ++k) {
        const int i = cidx_[k];
        d -= res.dual[i] * cval_[k] / (row_scale_[i] * col_scale_[j]);
      }
      res.reduced_cost[j] = d;
    }

    // Residuals in original units.
    double primal_res = 0.0;
    for (int j = 0; j < n_; ++j) {
      primal_res = std::max(primal_res, lp_.col_lower(j) - res.primal[j]);
      primal_res = std::max(primal_res, res.primal[j] - lp_.col_upper(j));
    }
    for (int i = 0; i < m_; ++i) {
      primal_res = std::max(primal_res, lp_.row_lower(i) - res.row_activity[i]);
      primal_res = std::max(primal_res, res.row_activity[i] - lp_.row_upper(i));
    }
    res.max_primal_residual = primal_res;

    // Dual feasibility and the dual objective. A variable's reduced cost must be
    // >= 0 when it rests at its lower bound, <= 0 at its upper bound and 0 when
    // basic or free. The same applies to row logicals whose reduced cost is y_i.
    double dual_res = 0.0, dual_obj = 0.0, comp = 0.0;
    auto account = [&](double d, double lo, double up, double val) {
      const bool lo_fin = std::isfinite(lo), up_fin = std::isfinite(up);
      if (d > 0.0) {
        if (lo_fin) {
          dual_obj += d * lo;
          comp += d * std::abs(val - lo);
        } else {
          dual_res = std::max(dual_res, d);
        }
      } else if (d < 0.0) {
        if (up_fin) {
          dual_obj += d * up;
          comp += -d * std::abs(up - val);
        } else {
          dual_res = std::max(dual_res, -d);
        }
      }
    };
    for (int j = 0; j < n_; ++j)
      account(res.reduced_cost[j], lp_.col_lower(j), lp_.col_upper(j), res.primal[j]);
    for (int i = 0; i < m_; ++i)
      account(res.dual[i], lp_.row_lower(i), lp_.row_upper(i), res.row_activity[i]);
    res.max_dual_residual = dual_res;
    res.dual_objective = dual_obj;
    res.complementarity = comp;
  }
};

}  // namespace detail

/// Solves `lp` to optimality (or certifies infeasibility / unboundedness).
/// Deterministic: identical inputs produce identical outputs.
inline SolveResult solve(const LpProblem& lp, const SolveOptions& opts = {}) {
  if (!(opts.feasibility_tol > 0.0) || !(opts.optimality_tol > 0.0))
    throw InputError("solve: tolerances must be positive");
  return detail::RevisedSimplex(lp, opts).run();
}

}  // namespace h2dac
