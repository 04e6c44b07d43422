#pragma once

#include "vardom/cone_field.hpp"
#include "vardom/graph_map.hpp"

namespace vardom {

enum class VdsKind { K, Q };

// A full problem datum: feasible grid inside a polyhedron, objective map,
// domination structure, direction k and the (epsilon, delta) pair.
struct Instance {
  int dim_x = 0;
  int dim_y = 0;
  Norm norm = Norm::Euclidean;
  Polyhedron omega;
  std::vector<Vec> omega_grid;  // listed grid, filtered by omega at load
  GraphMap objective;
  VdsKind vds_kind = VdsKind::K;
  ConeField cone_field;  // over X for K, over Y for Q
  Vec k;
  double epsilon = 1.0;  // +inf allowed
  double delta = 0.1;
  double tol = kTol;

  void check_basic() const;
};

enum class Verdict { Certified, Refuted };
enum class Evidence { Exact, Sampled };

struct Witness {
  Vec x;
  Vec y;
  Vec cone_element;
};

struct Certificate {
  Verdict verdict = Verdict::Certified;
  std::optional<Witness> witness;
  long checked_count = 0;
  Evidence evidence = Evidence::Exact;
};

}  // namespace vardom
