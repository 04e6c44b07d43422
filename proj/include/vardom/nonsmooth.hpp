#pragma once

#include "vardom/evp.hpp"
#include "vardom/instance.hpp"

namespace vardom {

enum class NormalKind { Frechet, Limiting };

// Union of polyhedral cones; the Frechet cone is a single entry. `defined`
// is false when the base point lies outside the set (the cone is empty, not
// {0}).
struct NormalConeResult {
  bool defined = true;
  std::vector<PolyCone> cones;
};

NormalConeResult normal_cone(const std::vector<Polyhedron>& pieces, const Vec& p,
                             NormalKind kind, double tol = kTol);

bool normal_union_contains(const NormalConeResult& n, const Vec& v, double tol = kTol);

// Normal-cone branches of a graph at (x, y), split into X and Y blocks, as
// the carrier of coderivative slices D*F(x,y)(y*) = {x* : (x*,-y*) in N}.
struct CoderivBranches {
  int dim_x = 0;
  int dim_y = 0;
  bool defined = true;
  std::vector<PolyCone> cones;  // in X* x Y*
};

CoderivBranches graph_coderiv_branches(const GraphMap& g, const Vec& x, const Vec& y,
                                       NormalKind kind, double tol = kTol);

bool coderiv_nonempty(const CoderivBranches& b, const Vec& y_star, double tol = kTol);
bool coderiv_contains(const CoderivBranches& b, const Vec& y_star, const Vec& x_star,
                      double tol = kTol);
// D*G(x,y)(0) = {0}: the Mordukhovich criterion test.
bool coderiv_zero_slice_trivial(const CoderivBranches& b, double tol = kTol);
// Is there a nonzero x* in D*G(x,y)(0) with x* also in cone(other_gens)?
bool coderiv_zero_slice_meets_cone(const CoderivBranches& b,
                                   const std::vector<Vec>& other_gens, double tol = kTol);

// Generators of the (convex) subdifferential of T_u(., A) at x outside A:
// active lower-bound rows scaled to pair -1 with u.
std::vector<Vec> t_min_subdiff_gens(const Polyhedron& a, const Vec& u, const Vec& x,
                                    double tol = 1e-7);

// Scalar piecewise-affine function data.
struct ScalarPwa {
  struct Cell {
    Polyhedron region;
    Vec grad;
    double offset = 0.0;
  };
  std::vector<Cell> cells;
  double value(const Vec& x, double tol = kTol) const;
};

struct SubdiffResult {
  std::vector<Vec> hull_gens;  // subdifferential = conv(hull_gens) when exact
  Evidence evidence = Evidence::Exact;
};

// Convex hull of active gradients for convex g; sampled Frechet fallback
// otherwise (evidence = Sampled).
SubdiffResult subdiff_pa(const ScalarPwa& g, const Vec& x, SplitRng& rng, double tol = kTol);

// Limiting subdifferential of x -> s^f_{k, f(x_tilde) - K}(x) at x_bar for
// piecewise-affine f and piecewise-constant K, as a union of convex branch
// hulls. In one input dimension the one-sided slopes give the set exactly
// (interval at a convex kink, slope pair at a concave one); in higher
// dimensions a sampled convexity check selects hull vs. per-gradient
// branches and the evidence is downgraded accordingly.
struct SubdiffBranch {
  std::vector<Vec> hull;
  std::vector<Vec> rays;  // recession directions (domain-boundary sides)
};

struct SubdiffBranches {
  std::vector<SubdiffBranch> branches;
  Evidence evidence = Evidence::Exact;
};

SubdiffBranches subdiff_s_vds(const Instance& inst, const Vec& x_tilde, const Vec& x_bar,
                              SplitRng& rng);

struct ConvexityReport {
  bool holds = true;
  bool exact = false;
  long checked = 0;
  std::string witness;
};

ConvexityReport convexity_wrt(const GraphMap& g, const PolyCone& r, SplitRng& rng,
                              int samples = 1000);

struct FirstOrderResidualReport {
  bool ok = false;
  bool case_i = false;           // sqrt(delta) >= epsilon branch with the extra cone term
  bool hypothesis_ok = true;     // case (i) requires x_bar - x_tilde not in -N(Omega, x_bar)
  double residual = 0.0;         // dist(0, subdiff + N(Omega,x_bar) [+ cone{x_bar-x_tilde}])
  double bound = 0.0;            // sqrt(delta) + tolerance
  Evidence evidence = Evidence::Exact;
};

FirstOrderResidualReport first_order_residual_check(const Instance& inst, const Vec& x_tilde,
                              const EvpVdsResult& evp_out, SplitRng& rng);

struct DecomposeResult {
  bool found = false;
  Vec y_star;       // in P+ with <y*, k> = 1
  Vec combination;  // convex weights over the active pieces certifying x*
};

// Split x* in subdiff s at x_bar into y* in the dual
// base with x* in subdiff(y* o (f - f(x_bar)))(x_bar).
DecomposeResult decompose_subdiff(const Instance& inst, const Vec& x_bar, const Vec& x_star);

}  // namespace vardom
