#pragma once

#include "vardom/geometry.hpp"

namespace vardom {

// Region-indexed assignment of cones, realizing K: X =) Y or Q: Y =) Y as a
// piecewise-constant field over polyhedral cells.
struct ConeCell {
  Polyhedron region;
  PolyCone cone;
};

struct ConeField {
  int domain_dim = 0;
  int value_dim = 0;
  std::vector<ConeCell> cells;
  std::optional<PolyCone> default_cone;

  static ConeField constant(const PolyCone& c, int domain_dim) {
    ConeField f;
    f.domain_dim = domain_dim;
    f.value_dim = c.dim;
    f.cells.push_back({Polyhedron::whole_space(domain_dim), c});
    return f;
  }
};

// Cones agree as sets (cross-containment of generators).
bool cones_equal(const PolyCone& a, const PolyCone& b, double tol = kTol);

const PolyCone& cone_at(const ConeField& f, const Vec& p, double tol = kTol);

// Load-time validation: overlapping regions must carry identical cones and
// every cone must pass its own invariants.
void validate_field(const ConeField& f, SplitRng& rng, bool require_pointed = true);

// Indices of cells whose region meets the closed ball; used by every
// ball-quantified condition below.
std::vector<int> cells_meeting_ball(const ConeField& f, const Vec& center, double radius,
                                    Norm n);

struct CommonConeResult {
  PolyCone cone;
  bool trivial = false;  // intersection collapsed to {0}
  std::vector<int> contributing_cells;
};

CommonConeResult common_cone(const ConeField& f, const Vec& center, double radius, Norm n);

struct ScalarizationReport {
  bool holds = false;
  // exact sufficient test (direction lies in every cone) vs. generator probes
  bool sufficient = false;
  std::string detail;
};

ScalarizationReport scalarization_condition(const ConeField& f, const Vec& center,
                                            double radius, const Vec& k, Norm n);

struct InteriorityReport {
  bool holds = false;
  double margin = 0.0;  // min <d,k> over unit dual generators; witnesses the
                        // boundedness of the dual base {y* in P+ : <y*,k> = 1}
  bool degenerate = false;
};

InteriorityReport interiority(const Vec& k, const PolyCone& p);

}  // namespace vardom
