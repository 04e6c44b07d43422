#pragma once

#include "vardom/geometry.hpp"

namespace vardom {

enum class GraphKind { FiniteGraph, PolyGraph, SingleValued, PwAffine };

struct FiniteGraphNode {
  Vec x;
  std::vector<Vec> values;
};

// f(x) = a x + b on region; single-valued piecewise-affine data
struct AffineCell {
  Polyhedron region;
  Mat a;
  Vec b;
};

// A set-valued map given as a finite graph, a union of convex polyhedra in
// X x Y, or single-valued data (tabulated or piecewise-affine).
struct GraphMap {
  GraphKind kind = GraphKind::FiniteGraph;
  int dim_x = 0;
  int dim_y = 0;
  std::vector<FiniteGraphNode> nodes;    // FiniteGraph / SingleValued
  std::vector<Polyhedron> pieces;        // PolyGraph
  std::vector<AffineCell> affine_cells;  // PwAffine

  bool single_valued() const {
    return kind == GraphKind::SingleValued || kind == GraphKind::PwAffine;
  }

  const std::vector<Vec>& values_at(const Vec& x, double tol = kTol) const;
  Vec value(const Vec& x, double tol = kTol) const;  // single-valued kinds
  bool on_graph(const Vec& x, const Vec& y, double tol = kTol) const;

  // Whole graph as polyhedra in X x Y. Finite nodes become singletons,
  // affine cells become graph slabs (y = a x + b over the region).
  std::vector<Polyhedron> graph_pieces() const;

  static GraphMap finite(std::vector<FiniteGraphNode> nodes, int dim_x, int dim_y,
                         bool single_valued = false);
  static GraphMap poly(std::vector<Polyhedron> pieces, int dim_x, int dim_y);
  static GraphMap affine(const Mat& a, const Vec& b, const Polyhedron& region);
  static GraphMap pw_affine(std::vector<AffineCell> cells);
  static GraphMap identity(const Polyhedron& region);
};

}  // namespace vardom
