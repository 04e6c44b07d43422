#pragma once

#include "vardom/openness.hpp"

namespace vardom {

// Q-instance lifted to a K-instance on X x Y: the objective graph becomes
// {((x,y), y) : y in F(x)}, the domination field K(x,y) := Q(y), and omega
// becomes Omega x Y truncated to a data box (the +inf radius component).
struct LiftedInstance {
  Instance inst;  // K-instance over the product space
  int orig_dim_x = 0;
  int orig_dim_y = 0;
  Vec y_box_lo, y_box_hi;
  Vec lifted_x_bar;  // (x_bar, y_bar)

  bool truncation_witnessed(const Witness& w, double tol = 1e-7) const;
};

LiftedInstance lift(const Instance& q_inst, const Vec& x_bar, const Vec& y_bar);

// Graph of the lifted objective for a polyhedral original: pieces
// {((x,y),z) : (x,y) in piece, z = y}.
GraphMap lift_objective_graph(const GraphMap& f);
// Graph of K~ over X x Y from the Q field: X x Gr Q.
GraphMap lift_vds_graph(const ConeField& q_field, int dim_x);

struct IdentityCheckReport {
  long probes = 0;
  long mismatches = 0;
  bool ok() const { return mismatches == 0; }
};

// Coderivative identities between the lifted maps and the originals,
// exercised on sampled dual probes with exact LP membership on both sides.
IdentityCheckReport coderivative_identities_check(const GraphMap& f, const ConeField& q_field,
                                                  const Vec& x, const Vec& y, SplitRng& rng,
                                                  int probes = 20);

struct AlliednessBridgeReport {
  bool q_cond = false;  // D*Q(y_bar, 0)(0) = {0}
  bool f_cond = false;  // D*F(x_bar,y_bar)(0) meets -N(Omega,x_bar) only at 0
  bool ok() const { return q_cond && f_cond; }
  std::string alliedness = "derived";  // of the lifted product sets
};

AlliednessBridgeReport lifted_sets_alliedness_bridge(const GraphMap& f,
                                                     const ConeField& q_field,
                                                     const Polyhedron& omega, const Vec& x_bar,
                                                     const Vec& y_bar);

// Openness harness in lifted coordinates: H(x,y) = {y} + Q(y) on Omega x Y,
// with the injectivity condition read on the lifted dual pairs.
OpennessHarnessReport lifted_openness_harness(const Instance& q_inst, const Vec& x_bar, const Vec& y_bar,
                                 double r, double a_frac, int rho_count = 4);

}  // namespace vardom
