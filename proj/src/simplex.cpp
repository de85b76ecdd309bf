#include "wsc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "wsc/error.hpp"

namespace wsc::lp {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration-limit";
  }
  return "unknown";
}

namespace {
constexpr double kEps = 1e-9;
constexpr double kPivotEps = 1e-9;
// Degenerate steps tolerated before switching to Bland's rule for good.
constexpr long long kStallLimit = 2000;
}  // namespace

int DenseSimplex::add_var(double cost) {
  if (!std::isfinite(cost)) throw PreconditionError("simplex: non-finite cost");
  costs_.push_back(cost);
  return static_cast<int>(costs_.size()) - 1;
}

void DenseSimplex::add_eq_row(std::vector<Entry> entries, double rhs, int basic_hint) {
  Row r;
  r.entries = std::move(entries);
  r.rhs = rhs;
  r.is_eq = true;
  r.hint = basic_hint;
  for (const auto& [v, c] : r.entries) {
    if (v < 0 || v >= static_cast<int>(costs_.size()))
      throw PreconditionError("simplex: row references unknown variable");
    if (!std::isfinite(c)) throw PreconditionError("simplex: non-finite coefficient");
  }
  if (!std::isfinite(rhs)) throw PreconditionError("simplex: non-finite rhs");
  rows_.push_back(std::move(r));
}

void DenseSimplex::add_ge_row(std::vector<Entry> entries, double rhs) {
  Row r;
  r.entries = std::move(entries);
  r.rhs = rhs;
  r.is_eq = false;
  for (const auto& [v, c] : r.entries) {
    if (v < 0 || v >= static_cast<int>(costs_.size()))
      throw PreconditionError("simplex: row references unknown variable");
    if (!std::isfinite(c)) throw PreconditionError("simplex: non-finite coefficient");
  }
  if (!std::isfinite(rhs)) throw PreconditionError("simplex: non-finite rhs");
  rows_.push_back(std::move(r));
}

// Artificial variables are kept implicit: while one is basic its tableau
// column is exactly the identity column of its row (no other pivot can touch
// it), and once it leaves the basis it is never allowed back in, so the
// column is never read again. Only real variables and slacks are stored.
Solution DenseSimplex::solve(long long max_iters) {
  const int nv = static_cast<int>(costs_.size());
  const int m = static_cast<int>(rows_.size());
  Solution sol;
  if (m == 0) {
    sol.status = SolveStatus::optimal;
    sol.x.assign(nv, 0.0);
    return sol;
  }

  int nslack = 0;
  std::vector<int> slack_of(m, -1);
  for (int r = 0; r < m; ++r)
    if (!rows_[r].is_eq) slack_of[r] = nv + nslack++;
  const int ncols = nv + nslack;
  const int art_base = ncols;  // basis ids >= art_base are artificials

  std::vector<double> tab(static_cast<size_t>(m) * ncols, 0.0);
  std::vector<double> rhs(m);
  auto at = [&](int r, int c) -> double& { return tab[static_cast<size_t>(r) * ncols + c]; };
  for (int r = 0; r < m; ++r) {
    for (const auto& [v, c] : rows_[r].entries) at(r, v) += c;
    if (slack_of[r] >= 0) at(r, slack_of[r]) = -1.0;  // a.x - s = rhs
    rhs[r] = rows_[r].rhs;
  }

  // Crash basis: pivot every hinted equality row out of the rest. The pivot
  // row is collected sparsely first, so each elimination costs its fill, not
  // a full row sweep.
  std::vector<int> basis(m, -1);
  std::vector<char> hint_used(nv, 0);
  std::vector<Entry> prow_sparse;
  for (int r = 0; r < m; ++r) {
    const int h = rows_[r].hint;
    if (h < 0) continue;
    if (!rows_[r].is_eq || h >= nv || hint_used[h])
      throw PreconditionError("simplex: invalid basis hint");
    const double hc = at(r, h);
    if (std::abs(hc) < 1e-9) throw PreconditionError("simplex: basis hint has zero coefficient");
    if (hc != 1.0) {
      const double inv = 1.0 / hc;
      double* row = &tab[static_cast<size_t>(r) * ncols];
      for (int c = 0; c < ncols; ++c) row[c] *= inv;
      rhs[r] *= inv;
    }
    at(r, h) = 1.0;
    hint_used[h] = 1;
    basis[r] = h;
    prow_sparse.clear();
    {
      const double* row = &tab[static_cast<size_t>(r) * ncols];
      for (int c = 0; c < ncols; ++c)
        if (row[c] != 0.0) prow_sparse.emplace_back(c, row[c]);
    }
    for (int r2 = 0; r2 < m; ++r2) {
      if (r2 == r) continue;
      const double f = at(r2, h);
      if (f == 0.0) continue;
      double* row2 = &tab[static_cast<size_t>(r2) * ncols];
      for (const auto& [c, pc] : prow_sparse) row2[c] -= f * pc;
      row2[h] = 0.0;
      rhs[r2] -= f * rhs[r];
    }
  }
  // A hinted basis value may end up negative through later eliminations; such
  // a row falls back to an artificial below.
  for (int r = 0; r < m; ++r)
    if (basis[r] >= 0 && rhs[r] < -kEps) basis[r] = -1;

  // Remaining rows: orient for nonnegative rhs. A >= row is held as
  // a.x - s = rhs, so its slack is basic exactly when the post-elimination
  // rhs is nonpositive (the flip gives the slack coefficient +1); everything
  // else gets an implicit artificial.
  int nart = 0;
  for (int r = 0; r < m; ++r) {
    if (basis[r] >= 0) continue;
    const bool flip = rows_[r].is_eq ? rhs[r] < 0 : rhs[r] <= kEps;
    if (flip) {
      double* row = &tab[static_cast<size_t>(r) * ncols];
      for (int c = 0; c < ncols; ++c) row[c] = -row[c];
      rhs[r] = -rhs[r];
    }
    if (slack_of[r] >= 0 && flip) {
      basis[r] = slack_of[r];
    } else {
      basis[r] = art_base + r;
      ++nart;
    }
    if (rhs[r] < 0) rhs[r] = 0;  // tiny drift from elimination
  }

  std::vector<double> obj(ncols, 0.0);
  double obj_rhs = 0;

  auto canonicalize = [&](bool phase1) {
    if (phase1)
      std::fill(obj.begin(), obj.end(), 0.0);
    else {
      std::copy(costs_.begin(), costs_.end(), obj.begin());
      std::fill(obj.begin() + nv, obj.end(), 0.0);
    }
    obj_rhs = 0;
    for (int r = 0; r < m; ++r) {
      const double cb = basis[r] >= art_base ? (phase1 ? 1.0 : 0.0) : obj[basis[r]];
      if (cb == 0.0) continue;
      const double* row = &tab[static_cast<size_t>(r) * ncols];
      for (int c = 0; c < ncols; ++c) obj[c] -= cb * row[c];
      obj_rhs -= cb * rhs[r];
    }
    for (int r = 0; r < m; ++r)
      if (basis[r] < art_base) obj[basis[r]] = 0.0;
  };

  auto pivot = [&](int leave, int enter) {
    double* prow = &tab[static_cast<size_t>(leave) * ncols];
    const double inv = 1.0 / prow[enter];
    for (int c = 0; c < ncols; ++c) prow[c] *= inv;
    rhs[leave] *= inv;
    prow[enter] = 1.0;
    for (int r = 0; r < m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      double* row = &tab[static_cast<size_t>(r) * ncols];
      for (int c = 0; c < ncols; ++c) row[c] -= f * prow[c];
      row[enter] = 0.0;
      rhs[r] -= f * rhs[leave];
      if (rhs[r] < 0 && rhs[r] > -1e-9) rhs[r] = 0;
    }
    const double f = obj[enter];
    if (f != 0.0) {
      for (int c = 0; c < ncols; ++c) obj[c] -= f * prow[c];
      obj[enter] = 0.0;
      obj_rhs -= f * rhs[leave];
    }
    basis[leave] = enter;
  };

  long long iters_left = max_iters;
  bool bland = false;

  auto run = [&]() -> SolveStatus {
    long long stall = 0;
    double last_obj = -obj_rhs;
    while (true) {
      int enter = -1;
      if (bland) {
        for (int c = 0; c < ncols; ++c)
          if (obj[c] < -kEps) {
            enter = c;
            break;
          }
      } else {
        double best = -kEps;
        for (int c = 0; c < ncols; ++c)
          if (obj[c] < best) {
            best = obj[c];
            enter = c;
          }
      }
      if (enter < 0) return SolveStatus::optimal;
      if (iters_left-- <= 0) return SolveStatus::iteration_limit;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotEps) continue;
        const double ratio = rhs[r] / a;
        if (ratio < best_ratio - kEps ||
            (ratio < best_ratio + kEps && (leave < 0 || basis[r] < basis[leave]))) {
          if (ratio < best_ratio) best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return SolveStatus::unbounded;
      pivot(leave, enter);

      const double cur = -obj_rhs;
      if (cur < last_obj - 1e-12) {
        last_obj = cur;
        stall = 0;
      } else if (++stall > kStallLimit) {
        bland = true;
      }
    }
  };

  if (nart > 0) {
    canonicalize(/*phase1=*/true);
    const SolveStatus st = run();
    if (st == SolveStatus::iteration_limit) {
      sol.status = st;
      return sol;
    }
    double resid = 0;
    for (int r = 0; r < m; ++r)
      if (basis[r] >= art_base) resid += rhs[r];
    if (resid > 1e-7) {
      sol.status = SolveStatus::infeasible;
      sol.infeasibility = resid;
      return sol;
    }
    // Degenerate artificials are pivoted out on the strongest real column so
    // later pivots can never lift them off zero; all-zero rows stay inert.
    for (int r = 0; r < m; ++r) {
      if (basis[r] < art_base) continue;
      int c_sel = -1;
      double best = 1e-7;
      for (int c = 0; c < ncols; ++c) {
        const double a = std::abs(at(r, c));
        if (a > best) {
          best = a;
          c_sel = c;
        }
      }
      if (c_sel >= 0) pivot(r, c_sel);
    }
  }

  canonicalize(/*phase1=*/false);
  bland = false;
  const SolveStatus st = run();
  if (st != SolveStatus::optimal) {
    sol.status = st;
    return sol;
  }

  sol.status = SolveStatus::optimal;
  sol.x.assign(nv, 0.0);
  for (int r = 0; r < m; ++r)
    if (basis[r] < nv) sol.x[basis[r]] = std::max(0.0, rhs[r]);
  double z = 0;
  for (int v = 0; v < nv; ++v) z += costs_[v] * sol.x[v];
  sol.objective = z;
  return sol;
}

}  // namespace wsc::lp
