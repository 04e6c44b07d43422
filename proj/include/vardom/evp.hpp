#pragma once

#include "vardom/instance.hpp"
#include "vardom/scalarize.hpp"

#include <functional>

namespace vardom {

// Finite metric space over listed points; the metric defaults to the chosen
// norm but can be replaced (e.g. by a scaled sum metric).
struct FiniteMetricSpace {
  std::vector<Vec> points;
  Norm norm = Norm::Euclidean;
  std::function<double(const Vec&, const Vec&)> metric;  // optional override

  double dist(const Vec& a, const Vec& b) const {
    return metric ? metric(a, b) : norm_of(Vec(a - b), norm);
  }
};

// Spot-check of the metric axioms on random triples.
bool metric_axioms_ok(const FiniteMetricSpace& m, SplitRng& rng, int triples = 200,
                      double tol = 1e-9);

struct EvpResult {
  int index = -1;  // position of x_bar in the space
  Vec x_bar;
  bool decrease_ok = false;    // f(x_bar) + lambda d(x_bar, x_tilde) <= f(x_tilde)
  bool locality_ok = false;    // d(x_bar, x_tilde) <= eps / lambda
  bool strict_min_ok = false;  // f(x) + lambda d(x, x_bar) > f(x_bar) for x != x_bar
  double decrease_residual = 0.0;
  double locality_residual = 0.0;
  double strict_min_margin = 0.0;  // min over x != x_bar of the perturbed gap
  int iterations = 0;
};

// Constructive EVP on a finite space: descend through argmin of
// f + lambda d(., current) until no weak improver remains. Requires
// f(x_tilde) <= min f + eps.
EvpResult evp_finite(const FiniteMetricSpace& m, const std::vector<double>& f_values,
                     int start_index, double eps, double lambda, double tol = kTol);

struct EvpVdsResult {
  EvpResult evp;
  std::vector<double> scalarization;  // g on the local grid
  std::vector<Vec> grid;
  double g_at_start = 0.0;
  double min_g = 0.0;
  bool lower_bound_ok = false;  // g >= -delta on the grid
  bool start_zero_ok = false;   // g(x_tilde) = 0
  // localized conclusions re-verified with residuals
  bool conclusion_i = false, conclusion_ii = false, conclusion_iii = false;
  double residual_i = 0.0, residual_ii = 0.0, residual_iii = 0.0;
};

// Full pipeline: certifies hypotheses, builds g = s^f_{k, f(x_tilde)-K} on
// the grid ball, runs the EVP with eps := delta, lambda := sqrt(delta), and
// re-verifies the three conclusions.
EvpVdsResult evp_vds(const Instance& inst, const Vec& x_tilde, double eps_prime,
                     bool check_hypotheses = true);

}  // namespace vardom
