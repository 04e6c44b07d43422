#pragma once

#include "vardom/common.hpp"

#include <optional>

namespace vardom {

// <normal, x> <= offset
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

struct Polyhedron {
  int dim = 0;
  std::vector<Halfspace> halfspaces;       // empty list = whole space
  std::vector<Vec> vertex_cache;           // optional, validated on demand

  Polyhedron() = default;
  explicit Polyhedron(int d) : dim(d) {}

  void add(const Vec& normal, double offset);
  void add_eq(const Vec& normal, double offset);  // two opposing halfspaces

  bool contains(const Vec& x, double tol = kTol) const;
  double max_violation(const Vec& x) const;

  static Polyhedron whole_space(int d) { return Polyhedron(d); }
  static Polyhedron box(const Vec& lo, const Vec& hi);
  static Polyhedron singleton(const Vec& p);
  // Closed norm ball as a polyhedron; Euclidean is rejected (not polyhedral).
  static Polyhedron ball(const Vec& center, double radius, Norm n);
  // Cartesian product: this in the first block, q in the second.
  Polyhedron product(const Polyhedron& q) const;
};

bool polyhedron_nonempty(const Polyhedron& p);

// Indices of constraints active at x within tol.
std::vector<int> active_indices(const Polyhedron& p, const Vec& x, double tol = kTol);
std::vector<Vec> active_normals(const Polyhedron& p, const Vec& x, double tol = kTol);

// Vertex enumeration for bounded polyhedra in small dimension.
std::vector<Vec> polyhedron_vertices(const Polyhedron& p, double tol = kTol);

// A present vertex cache must reproduce the halfspace description of a
// bounded polyhedron: cached points are the enumerated vertices.
bool vertex_cache_consistent(const Polyhedron& p, double tol = 1e-7);

// Polyhedral convex cone with both generator representations.
// primal: conic generators of the cone itself.
// dual:   generators of the positive dual cone {d : <d,y> >= 0 for all y in C}.
struct PolyCone {
  int dim = 0;
  std::vector<Vec> primal;
  std::vector<Vec> dual;

  PolyCone() = default;
  PolyCone(int d, std::vector<Vec> p, std::vector<Vec> du)
      : dim(d), primal(std::move(p)), dual(std::move(du)) {}

  static PolyCone orthant(int d);
  static PolyCone zero(int d);                  // degenerate {0}
  static PolyCone from_primal(std::vector<Vec> gens, int d);  // dual via DD, d <= 4
  static PolyCone from_dual(std::vector<Vec> duals, int d);   // primal via DD, d <= 4

  bool is_zero(double tol = kTol) const;
};

struct ConeFlags {
  bool pairing_ok = true;    // <d,g> >= -tol for all pairs
  bool duality_ok = true;    // primal/dual membership agreement on probes
  bool pointed = true;
  bool proper = true;        // not {0} and not the whole space
};

// Membership via both representations; disagreement is an internal error.
bool cone_contains(const PolyCone& c, const Vec& y, double tol = kTol);
// Dual-generator test only (used in hot loops after the cone is validated).
bool cone_contains_dual(const PolyCone& c, const Vec& y, double tol = kTol);

// Generators of {d : <g,d> >= 0 for all g in gens} via double description.
std::vector<Vec> dd_dual(const std::vector<Vec>& gens, int d);

// Minimal conic generating subset (LP-based redundancy removal).
std::vector<Vec> prune_generators(const std::vector<Vec>& gens, int d);

// Dual cone; internal DD only for dim <= 4 per the desk-scale contract.
PolyCone dual_cone(const PolyCone& c);

PolyCone intersect_cones(const std::vector<PolyCone>& cones);

bool cone_pointed(const PolyCone& c, double tol = kTol);
ConeFlags validate_cone(const PolyCone& c, SplitRng& rng, int probes = 1000, double tol = kTol);

// Smallest t >= 0 with x + t u in p, or +inf. u need not be unit.
double ray_hit(const Polyhedron& p, const Vec& x, const Vec& u, double tol = kTol);

double distance_to_points(const Vec& y, const std::vector<Vec>& pts, Norm n);
double distance_to_polyhedron(const Vec& y, const Polyhedron& p, Norm n);

// Euclidean projection of y onto p (active-set enumeration, exact KKT).
Vec project_onto_polyhedron(const Vec& y, const Polyhedron& p);

struct MinNormResult {
  double dist = 0.0;
  Vec point;
};

// Min-norm point of conv(hull_pts) + cone(cone_gens); hull may be empty
// (then the set is the cone and the answer is 0).
MinNormResult min_norm_point(const std::vector<Vec>& hull_pts,
                             const std::vector<Vec>& cone_gens, int d);

}  // namespace vardom
