#pragma once

#include "vardom/common.hpp"

namespace vardom::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double objective = 0.0;
  Vec x;  // primal point when status == Optimal
};

// minimize c'x  subject to  A x = b, x >= 0.
// Two-phase dense simplex with Bland's rule; sized for desk-scale problems.
Result solve_standard(const Mat& A, const Vec& b, const Vec& c);

// minimize c'x  subject to  a_ub x <= b_ub, a_eq x = b_eq, x free.
struct Problem {
  int n = 0;
  Vec c;     // empty means pure feasibility
  Mat a_ub;  // may have zero rows
  Vec b_ub;
  Mat a_eq;
  Vec b_eq;

  explicit Problem(int nvars) : n(nvars) {}
  void add_ub(const Vec& row, double rhs);
  void add_eq(const Vec& row, double rhs);
};

Result solve(const Problem& p);
bool feasible(const Problem& p);

}  // namespace vardom::lp
