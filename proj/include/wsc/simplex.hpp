#pragma once

#include <utility>
#include <vector>

namespace wsc::lp {

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

const char* status_name(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0;
  std::vector<double> x;
  double infeasibility = 0;  // phase-1 residual when status == infeasible
};

// Dense two-phase primal simplex (minimization, all variables >= 0).
//
// Sized for the evaluation problems in this repo: up to roughly 1e5 variables
// with few thousand rows. Equality rows may carry a crash-basis hint (a
// variable with coefficient 1 that appears in no other equality row), which
// skips phase 1 for the bulk of the rows; artificials are then only needed
// for the inequality rows the crash point violates.
class DenseSimplex {
 public:
  using Entry = std::pair<int, double>;

  int add_var(double cost);
  void add_eq_row(std::vector<Entry> entries, double rhs, int basic_hint = -1);
  void add_ge_row(std::vector<Entry> entries, double rhs);

  Solution solve(long long max_iters = 500000);

 private:
  struct Row {
    std::vector<Entry> entries;
    double rhs = 0;
    bool is_eq = true;
    int hint = -1;
  };
  std::vector<double> costs_;
  std::vector<Row> rows_;
};

}  // namespace wsc::lp
