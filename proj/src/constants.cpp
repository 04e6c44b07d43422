#include "vardom/constants.hpp"

#include <cmath>

namespace vardom::constants {

double phi(double x) {
  if (x < 0) throw Error("phi: negative input");
  double s = std::sqrt(1.0 + x);
  return 0.25 * (s - 1.0) * (1.0 / s - 1.0 / (1.0 + x));
}

double psi(double x) {
  if (x < 0) throw Error("psi: negative input");
  double s = std::sqrt(1.0 + x);
  return 0.25 * (1.0 / s - 1.0 / (1.0 + x));
}

double phi_inv(double d) {
  if (d < 0 || d >= 0.25) throw Error("phi_inv: input outside [0, 1/4)");
  if (d == 0.0) return 0.0;
  double hi = 1.0;
  while (phi(hi) <= d) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    if (phi(mid) <= d)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double a_bar(double c) {
  if (c <= 0) throw Error("a_bar: c must be positive");
  return std::sqrt(1.0 + c) - 1.0;
}

double m_a(double c, double a) {
  if (!(0 < a && a < c)) throw Error("m_a: requires 0 < a < c");
  double fc = c / (c + 1.0), fa = a / (a + 1.0);
  return std::min({c, 0.25 * (fc - fa), (c / (2.0 * a)) * (fc + fa)});
}

double m_a_bar(double c) { return m_a(c, a_bar(c)); }

double theta_bound(double r, double c, double a) {
  if (!(0 < a && a < c) || r <= 0) throw Error("theta_bound: requires 0 < a < c, r > 0");
  double fc = c / (c + 1.0), fa = a / (a + 1.0);
  return std::min({r, 0.25 * (fc - fa), (r / (2.0 * a)) * (fc + fa)});
}

bool theta_bullets_ok(double r, double c, double a, double theta) {
  double fc = c / (c + 1.0), fa = a / (a + 1.0);
  double b = 0.5 * (fc + fa);
  return a * theta / b < r && theta < r && fa < b + 2 * theta && b + 2 * theta < fc;
}

Regime classify(double eps, double delta) {
  if (eps > 1.0 / 16.0 && delta > 0 && delta < 0.25) return Regime::BI;
  if (delta < eps && std::sqrt(delta) - delta < eps) return Regime::BII;
  return Regime::Infeasible;
}

std::vector<Interval> solve_constants_system(double eps, double delta) {
  if (!(eps > 0) || !(delta > 0)) throw Error("solve_constants_system: eps, delta > 0");
  std::vector<Interval> out;
  if (delta >= 0.25) return out;  // phi < 1/4 everywhere
  double c_lo = phi_inv(delta);   // delta < phi(c) iff c > c_lo

  const double peak = 1.0 / 16.0;
  if (eps > peak) {
    out.push_back({c_lo, kInf});
    return out;
  }
  // psi(c) < eps fails exactly on [c1, c2] around the peak at c = 3
  auto bisect = [&](double lo, double hi, bool rising) {
    for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
      double mid = 0.5 * (lo + hi);
      bool below = psi(mid) < eps;
      if (rising == below)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  double c1 = bisect(0.0, 3.0, true);
  double hi = 6.0;
  while (psi(hi) >= eps) hi *= 2.0;
  double c2 = bisect(3.0, hi, false);
  // here bisect(3, hi, false): psi decreasing, find the crossing back below eps
  if (c_lo < c1 - 1e-9) out.push_back({c_lo, c1});
  double lo2 = std::max(c_lo, c2);
  out.push_back({lo2, kInf});
  return out;
}

}  // namespace vardom::constants
