#include "vardom/graph_map.hpp"

namespace vardom {

const std::vector<Vec>& GraphMap::values_at(const Vec& x, double tol) const {
  if (kind != GraphKind::FiniteGraph && kind != GraphKind::SingleValued)
    throw Error("values_at requires finite-graph data");
  for (const auto& node : nodes) {
    if ((node.x - x).cwiseAbs().maxCoeff() <= tol) return node.values;
  }
  throw Error("point not in the tabulated domain");
}

Vec GraphMap::value(const Vec& x, double tol) const {
  if (kind == GraphKind::SingleValued) {
    const auto& vals = values_at(x, tol);
    if (vals.size() != 1) throw InvariantError("single-valued node with multiple values");
    return vals.front();
  }
  if (kind == GraphKind::PwAffine) {
    for (const auto& cell : affine_cells) {
      if (cell.region.contains(x, tol)) return cell.a * x + cell.b;
    }
    throw Error("point not covered by affine cells");
  }
  throw Error("value() requires single-valued data");
}

bool GraphMap::on_graph(const Vec& x, const Vec& y, double tol) const {
  switch (kind) {
    case GraphKind::FiniteGraph:
    case GraphKind::SingleValued: {
      for (const auto& node : nodes) {
        if ((node.x - x).cwiseAbs().maxCoeff() > tol) continue;
        for (const Vec& v : node.values) {
          if ((v - y).cwiseAbs().maxCoeff() <= tol) return true;
        }
      }
      return false;
    }
    case GraphKind::PwAffine: {
      for (const auto& cell : affine_cells) {
        if (cell.region.contains(x, tol) &&
            (cell.a * x + cell.b - y).cwiseAbs().maxCoeff() <= tol)
          return true;
      }
      return false;
    }
    case GraphKind::PolyGraph: {
      Vec xy(dim_x + dim_y);
      xy.head(dim_x) = x;
      xy.tail(dim_y) = y;
      for (const auto& p : pieces) {
        if (p.contains(xy, tol)) return true;
      }
      return false;
    }
  }
  return false;
}

std::vector<Polyhedron> GraphMap::graph_pieces() const {
  std::vector<Polyhedron> out;
  switch (kind) {
    case GraphKind::PolyGraph: return pieces;
    case GraphKind::PwAffine: {
      for (const auto& cell : affine_cells) {
        Polyhedron p(dim_x + dim_y);
        for (const auto& h : cell.region.halfspaces) {
          Vec n = Vec::Zero(p.dim);
          n.head(dim_x) = h.normal;
          p.add(n, h.offset);
        }
        // y - a x = b
        for (int r = 0; r < dim_y; ++r) {
          Vec n = Vec::Zero(p.dim);
          n.head(dim_x) = -cell.a.row(r);
          n[dim_x + r] = 1.0;
          p.add_eq(n, cell.b[r]);
        }
        out.push_back(p);
      }
      return out;
    }
    case GraphKind::FiniteGraph:
    case GraphKind::SingleValued: {
      for (const auto& node : nodes) {
        for (const Vec& v : node.values) {
          Vec xy(dim_x + dim_y);
          xy.head(dim_x) = node.x;
          xy.tail(dim_y) = v;
          out.push_back(Polyhedron::singleton(xy));
        }
      }
      return out;
    }
  }
  return out;
}

GraphMap GraphMap::finite(std::vector<FiniteGraphNode> nodes, int dim_x, int dim_y,
                          bool single_valued) {
  GraphMap g;
  g.kind = single_valued ? GraphKind::SingleValued : GraphKind::FiniteGraph;
  g.dim_x = dim_x;
  g.dim_y = dim_y;
  g.nodes = std::move(nodes);
  for (const auto& n : g.nodes) {
    if (n.values.empty()) throw InvariantError("finite graph node with empty value set");
    if (single_valued && n.values.size() != 1)
      throw InvariantError("single-valued graph with non-singleton values");
  }
  return g;
}

GraphMap GraphMap::poly(std::vector<Polyhedron> pieces, int dim_x, int dim_y) {
  GraphMap g;
  g.kind = GraphKind::PolyGraph;
  g.dim_x = dim_x;
  g.dim_y = dim_y;
  for (const auto& p : pieces) {
    if (p.dim != dim_x + dim_y) throw DimMismatch("poly graph piece dimension");
  }
  g.pieces = std::move(pieces);
  return g;
}

GraphMap GraphMap::affine(const Mat& a, const Vec& b, const Polyhedron& region) {
  GraphMap g;
  g.kind = GraphKind::PwAffine;
  g.dim_x = static_cast<int>(a.cols());
  g.dim_y = static_cast<int>(a.rows());
  g.affine_cells.push_back({region, a, b});
  return g;
}

GraphMap GraphMap::pw_affine(std::vector<AffineCell> cells) {
  if (cells.empty()) throw Error("pw_affine: no cells");
  GraphMap g;
  g.kind = GraphKind::PwAffine;
  g.dim_x = static_cast<int>(cells.front().a.cols());
  g.dim_y = static_cast<int>(cells.front().a.rows());
  g.affine_cells = std::move(cells);
  return g;
}

GraphMap GraphMap::identity(const Polyhedron& region) {
  int d = region.dim;
  return affine(Mat::Identity(d, d), Vec::Zero(d), region);
}

}  // namespace vardom
