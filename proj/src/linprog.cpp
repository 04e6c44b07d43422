#include "vardom/linprog.hpp"

#include <algorithm>

namespace vardom::lp {

namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kFeasEps = 1e-8;
constexpr int kMaxIters = 20000;

// Primal simplex on a dense tableau. T is (m+1) x (n+1): constraint rows,
// then the reduced-cost row; last column is the rhs. basis[i] is the column
// basic in row i. Bland's rule for anti-cycling.
Status run_simplex(Mat& T, std::vector<int>& basis) {
  const int m = static_cast<int>(T.rows()) - 1;
  const int n = static_cast<int>(T.cols()) - 1;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    int enter = -1;
    for (int j = 0; j < n; ++j) {
      if (T(m, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return Status::Optimal;

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) > kPivotEps) {
        double ratio = T(i, n) / T(i, enter);
        if (leave < 0 || ratio < best_ratio - kPivotEps ||
            (ratio < best_ratio + kPivotEps && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return Status::Unbounded;

    double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    basis[leave] = enter;
  }
  throw Error("simplex iteration cap exceeded");
}

}  // namespace

Result solve_standard(const Mat& A_in, const Vec& b_in, const Vec& c) {
  const int m = static_cast<int>(A_in.rows());
  const int n = static_cast<int>(A_in.cols());
  if (b_in.size() != m || c.size() != n) throw DimMismatch("solve_standard: shape mismatch");

  Mat A = A_in;
  Vec b = b_in;
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      A.row(i) = -A.row(i);
      b[i] = -b[i];
    }
  }

  // Phase 1: artificials form the initial basis.
  Mat T(m + 1, n + m + 1);
  T.setZero();
  T.block(0, 0, m, n) = A;
  T.block(0, n, m, m) = Mat::Identity(m, m);
  T.col(n + m).head(m) = b;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;
  // reduced costs for cost = sum of artificials
  for (int j = 0; j < n; ++j) T(m, j) = -A.col(j).sum();
  T(m, n + m) = -b.sum();

  Status s1 = run_simplex(T, basis);
  if (s1 != Status::Optimal) throw Error("phase-1 simplex anomaly");
  double phase1 = -T(m, n + m);
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (phase1 > kFeasEps * scale) return {Status::Infeasible, 0.0, Vec()};

  // Drive artificials out of the basis where possible; redundant rows get a
  // harmless artificial at level ~0.
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n) {
      int enter = -1;
      for (int j = 0; j < n; ++j) {
        if (std::abs(T(i, j)) > 1e-7) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) {
        double piv = T(i, enter);
        T.row(i) /= piv;
        for (int r = 0; r <= m; ++r) {
          if (r == i) continue;
          double f = T(r, enter);
          if (f != 0.0) T.row(r) -= f * T.row(i);
        }
        basis[i] = enter;
      }
    }
  }

  // Phase 2 tableau: original columns + rhs, recomputed reduced costs.
  Mat T2(m + 1, n + 1);
  T2.setZero();
  T2.block(0, 0, m, n) = T.block(0, 0, m, n);
  T2.col(n).head(m) = T.col(n + m).head(m);
  Vec cb(m);
  for (int i = 0; i < m; ++i) cb[i] = (basis[i] < n) ? c[basis[i]] : 0.0;
  for (int j = 0; j < n; ++j) T2(m, j) = c[j] - cb.dot(T2.col(j).head(m));
  T2(m, n) = -cb.dot(T2.col(n).head(m));
  // Lingering artificial columns are gone; forbid re-entry by construction.

  Status s2 = run_simplex(T2, basis);
  if (s2 == Status::Unbounded) return {Status::Unbounded, -kInf, Vec()};

  Vec x = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) x[basis[i]] = T2(i, n);
  }
  return {Status::Optimal, c.dot(x), x};
}

void Problem::add_ub(const Vec& row, double rhs) {
  if (row.size() != n) throw DimMismatch("add_ub row size");
  a_ub.conservativeResize(a_ub.rows() + 1, n);
  a_ub.row(a_ub.rows() - 1) = row;
  b_ub.conservativeResize(b_ub.size() + 1);
  b_ub[b_ub.size() - 1] = rhs;
}

void Problem::add_eq(const Vec& row, double rhs) {
  if (row.size() != n) throw DimMismatch("add_eq row size");
  a_eq.conservativeResize(a_eq.rows() + 1, n);
  a_eq.row(a_eq.rows() - 1) = row;
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq[b_eq.size() - 1] = rhs;
}

Result solve(const Problem& p) {
  const int n = p.n;
  const int mu = static_cast<int>(p.a_ub.rows());
  const int me = static_cast<int>(p.a_eq.rows());
  // free x split as u - v, slack s for the <= rows
  const int cols = 2 * n + mu;
  Mat A(mu + me, cols);
  A.setZero();
  Vec b(mu + me);
  if (mu > 0) {
    A.block(0, 0, mu, n) = p.a_ub;
    A.block(0, n, mu, n) = -p.a_ub;
    A.block(0, 2 * n, mu, mu) = Mat::Identity(mu, mu);
    b.head(mu) = p.b_ub;
  }
  if (me > 0) {
    A.block(mu, 0, me, n) = p.a_eq;
    A.block(mu, n, me, n) = -p.a_eq;
    b.tail(me) = p.b_eq;
  }
  Vec c = Vec::Zero(cols);
  if (p.c.size() == n) {
    c.head(n) = p.c;
    c.segment(n, n) = -p.c;
  }
  Result r = solve_standard(A, b, c);
  if (r.status == Status::Optimal) {
    Vec x = r.x.head(n) - r.x.segment(n, n);
    r.x = x;
  }
  return r;
}

bool feasible(const Problem& p) {
  Problem q = p;
  q.c = Vec();
  return solve(q).status == Status::Optimal;
}

}  // namespace vardom::lp
