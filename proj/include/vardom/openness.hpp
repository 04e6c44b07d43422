#pragma once

#include "vardom/constants.hpp"
#include "vardom/nonsmooth.hpp"
#include "vardom/solutions.hpp"

namespace vardom {

// A cone field as a set-valued map x -> K(x): graph pieces region x cone.
GraphMap cone_field_to_graph(const ConeField& f, int dim_x);
// Indicator map Delta_Omega: {0} on Omega, empty outside.
GraphMap indicator_graph(const Polyhedron& omega, int dim_y);

// H(x) = sum of parts(x); empty when any part is empty.
struct SumMap {
  int dim_x = 0;
  int dim_y = 0;
  std::vector<GraphMap> parts;
};

struct OpennessQuery {
  SumMap map;
  Vec x_bar;
  Vec y_bar;                 // sum of the part centers
  Vec u;                     // unit direction
  double modulus = 1.0;      // a in B(y_bar, a rho)
  std::vector<double> rho_grid;
  std::optional<double> x_radius_fixed;  // Prop 4.1 form: x-ball radius fixed
  int t_samples = 64;
  Norm norm = Norm::Max;
  bool continuum_x = true;             // LP over the x-ball (max norm exact)
  std::vector<Vec> x_candidates;       // grid witnesses when continuum_x = false
};

struct CoverageReport {
  bool certified = true;
  long probes = 0;
  double failed_rho = 0.0;
  std::optional<Vec> uncovered_probe;
};

// Probe the segment {y_bar - t u : 0 <= t < a rho} for coverage by
// H(B(x_bar, rho)); per-probe membership is an exact LP over the parts.
CoverageReport check_directional_openness(const OpennessQuery& q);

struct IncompatReport {
  bool hypothesis_ok = false;  // k in (common cone over the ball) \ {0}
  bool nondominated = false;
  std::vector<double> delta_primes;
  std::vector<bool> coverage_refuted;
  bool contradiction = false;  // nondominated yet covered at delta' > delta
};

// Openness/optimality incompatibility: a certified (eps,delta,k)-nondominated
// point cannot be covered at any delta' > delta.
IncompatReport incompatibility_check(const Instance& inst, const Vec& x_bar, const Vec& y_bar);

// Membership probe in (F + K + Delta_Omega)(candidates): the fast scan used
// by the incompatibility battery (no sum-map construction).
bool h_sum_covers_probe(const Instance& inst, const std::vector<Vec>& x_candidates,
                        const Vec& probe);

struct InjectivityQuery {
  std::vector<GraphMap> parts;  // p <= 3
  Vec x_bar;
  std::vector<Vec> y_centers;   // per-part value centers
  double r = 1.0;
  Vec u;
  int uncoupled_part = 0;                 // receives y* without the z shift
  std::optional<PolyCone> y_star_cone;    // restrict y* to P+ (cone of its primal gens)
  double c_cap = 10.0;
  Norm norm = Norm::Max;
};

struct InjectivityResult {
  double c = 0.0;
  bool converged = false;
  int iterations = 0;
  long branches = 0;
};

// Lower-bounds inf ||sum_i x_i*|| over the coderivative tuples admissible at
// radius r, with the z-ball 2c coupling resolved by damped fixed-point
// iteration on c.
InjectivityResult injectivity_constant(const InjectivityQuery& q);

struct TransversalityReport {
  bool vds_cond = false;  // D*K(x_bar, 0)(0) = {0}  (or Q at (y_bar, 0))
  bool f_cond = false;    // D*F(x_bar, y_bar)(0) meets -N(Omega, x_bar) only at 0
  bool ok() const { return vds_cond && f_cond; }
  // alliedness of the product sets follows from these conditions and is
  // recorded as derived, never checked by sequences
  std::string alliedness = "derived";
};

TransversalityReport transversality_check(const GraphMap& f, const ConeField& vds_field,
                                          const Polyhedron& omega, const Vec& x_bar,
                                          const Vec& y_bar, VdsKind kind);

// Mordukhovich criterion: D*G(x,y)(0) = {0}.
bool aubin_check(const GraphMap& g, const Vec& x, const Vec& y);

struct OpennessHarnessReport {
  bool hypotheses_ok = false;
  std::string failure;
  double c = 0.0;
  double theta = 0.0;
  std::vector<double> rho_grid;
  std::vector<bool> covered;
  bool all_covered = false;
};

// Full sufficient-condition harness: transversality + injectivity + theta
// bound, then coverage at every rho in (0, theta).
OpennessHarnessReport sum_openness_harness(const Instance& inst, const Vec& x_bar, const Vec& y_bar,
                                double r, double a_frac, int rho_count = 5);

struct NcWitness {
  Vec y_star;
  Vec z_star;
  Vec x1, y1, x2, y2, x3;
  Vec xs1, xs2, xs3;  // coderivative elements and the omega normal
  Vec y1_star;        // Q-form only
  Vec residual;       // the ball element closing the inclusion to 0
};

struct NcReport {
  bool hypotheses_ok = false;
  std::vector<std::string> failures;
  bool found = false;
  NcWitness witness;
  long combos_tried = 0;
  bool revalidated = false;
};

// Witness search for the K-form necessary condition (interior direction,
// Aubin maps, constants regime, certified approximate solution).
NcReport necessary_cond_K(const Instance& inst, const Vec& x_bar, const Vec& y_bar);
// Lifted/Q-form variant.
NcReport necessary_cond_Q(const Instance& inst, const Vec& x_bar, const Vec& y_bar);

}  // namespace vardom
