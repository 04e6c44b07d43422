#pragma once

#include "vardom/common.hpp"

namespace vardom::constants {

// phi(x) = (1/4)(sqrt(1+x)-1)(1/sqrt(x+1) - 1/(x+1)); increasing bijection
// from [0,inf) onto [0,1/4).
double phi(double x);

// psi(x) = (1/4)(1/sqrt(x+1) - 1/(x+1)); unimodal, peak 1/16 at x = 3.
double psi(double x);

// inverse of phi by bisection; |phi(phi_inv(d)) - d| <= 1e-12.
double phi_inv(double d);

double a_bar(double c);             // sqrt(1+c) - 1
double m_a(double c, double a);     // min{c, (1/4)(c/(c+1)-a/(a+1)), (c/2a)(c/(c+1)+a/(a+1))}
double m_a_bar(double c);           // value of m at a = a_bar; equals psi(c)

// Upper bound for the openness radius parameter:
// min{r, (1/4)(c/(c+1)-a/(a+1)), (r/2a)(c/(c+1)+a/(a+1))}.
double theta_bound(double r, double c, double a);

// The three inequalities behind theta_bound, with b = (1/2)(c/(c+1)+a/(a+1)).
bool theta_bullets_ok(double r, double c, double a, double theta);

enum class Regime { BI, BII, Infeasible };
Regime classify(double eps, double delta);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;  // +inf for an unbounded interval
};

// {c > 0 : delta < phi(c) and psi(c) < eps} as a union of open intervals
// with endpoints resolved to 1e-9. eps may be +inf.
std::vector<Interval> solve_constants_system(double eps, double delta);

}  // namespace vardom::constants
