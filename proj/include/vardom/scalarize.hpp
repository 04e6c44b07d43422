#pragma once

#include "vardom/cone_field.hpp"
#include "vardom/graph_map.hpp"

namespace vardom {

// Extended reals follow the convention inf(empty) = +inf.
enum class GwStatus {
  Finite,
  PlusInf,            // genuinely empty feasible set
  MinusInf,           // feasible for every bracketed t
  BracketExhausted,   // bracket ran out while the recession condition fails
};

struct GwResult {
  double value = 0.0;
  GwStatus status = GwStatus::Finite;
  bool closed_form = false;
};

struct GwOptions {
  double t_max = 1e6;
  double tol = 1e-10;
  int max_iter = 200;
};

// s_{k,R}(y) = inf{t : y in t k - R} for a polyhedral cone R.
GwResult gerstewitz(const Vec& k, const PolyCone& r, const Vec& y, GwOptions opt = {});
// Same for a polyhedron R (always the bisection path).
GwResult gerstewitz(const Vec& k, const Polyhedron& r, const Vec& y, GwOptions opt = {});

// s^f_{k,a-K}(x) = inf{t : f(x) in a + t k - K(x)} for single-valued f.
GwResult s_vds(const GraphMap& f, const ConeField& kf, const Vec& a, const Vec& k,
               const Vec& x, GwOptions opt = {});

// Minimal time inf{t >= 0 : x + t u in A}.
double t_min(const Vec& u, const Vec& x, const std::vector<Vec>& pts,
             double parallel_tol = 1e-9);
double t_min(const Vec& u, const Vec& x, const Polyhedron& a, double tol = kTol);

}  // namespace vardom
