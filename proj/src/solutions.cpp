#include "vardom/solutions.hpp"

#include "vardom/linprog.hpp"

#include <algorithm>
#include <functional>

namespace vardom {

void Instance::check_basic() const {
  if (k.size() != dim_y) throw DimMismatch("instance: k dimension");
  if (!is_unit(k, norm, 1e-9)) throw InvariantError("instance: k must be unit");
  if (epsilon <= 0 || delta < 0) throw InvariantError("instance: epsilon/delta signs");
  if (objective.dim_x != dim_x || objective.dim_y != dim_y)
    throw DimMismatch("instance: objective dims");
  int expected = vds_kind == VdsKind::K ? dim_x : dim_y;
  if (cone_field.domain_dim != expected || cone_field.value_dim != dim_y)
    throw DimMismatch("instance: cone field dims");
}

std::vector<Vec> ball_grid(const Instance& inst, const Vec& center, double radius) {
  std::vector<Vec> pts;
  for (const Vec& g : inst.omega_grid) {
    if (!inst.omega.contains(g, inst.tol)) continue;
    if (radius < kInf && norm_of(Vec(g - center), inst.norm) >= radius - inst.tol) continue;
    pts.push_back(g);
  }
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) { return lex_less(a, b); });
  return pts;
}

bool instance_on_graph(const Instance& inst, const Vec& x, const Vec& y) {
  return inst.omega.contains(x, inst.tol) && inst.objective.on_graph(x, y, 1e-7);
}

namespace {

// Search the polyhedral y-slice {y : (x,y) in piece} for a value with
// v = y - y_bar + delta k nonzero and -v in the cone. Returns the witness y.
std::optional<Vec> poly_slice_refuter(const Polyhedron& piece, const Vec& x,
                                      const PolyCone& cone, const Vec& y_bar,
                                      const Vec& shift, double tol) {
  const int dx = static_cast<int>(x.size());
  const int dy = static_cast<int>(y_bar.size());
  lp::Problem base(dy);
  for (const auto& h : piece.halfspaces) {
    Vec ny = h.normal.tail(dy);
    double rhs = h.offset - h.normal.head(dx).dot(x);
    base.add_ub(ny, rhs);
  }
  // -(y - y_bar + shift) in cone: <d, y> <= <d, y_bar - shift>
  for (const Vec& d : cone.dual) {
    base.add_ub(d, d.dot(y_bar - shift));
  }
  // big-M box keeps every probe LP bounded; data is O(1)-scaled
  for (int i = 0; i < dy; ++i) {
    Vec e = Vec::Zero(dy);
    e[i] = 1.0;
    base.add_ub(e, 1e6);
    base.add_ub(Vec(-e), 1e6);
  }
  if (!lp::feasible(base)) return std::nullopt;
  // hunt for a nonzero v coordinate
  for (int i = 0; i < dy; ++i) {
    for (double sign : {1.0, -1.0}) {
      lp::Problem p = base;
      Vec c = Vec::Zero(dy);
      c[i] = -sign;  // maximize sign * y_i
      p.c = c;
      auto r = lp::solve(p);
      if (r.status != lp::Status::Optimal) continue;
      Vec y = r.x;
      double vi = y[i] - y_bar[i] + shift[i];
      if (std::abs(vi) > 10 * tol) return y;
    }
  }
  return std::nullopt;
}

using ConeSelector = std::function<const PolyCone&(const Vec& x, const Vec& y)>;

Certificate scan_K_style(const Instance& inst, const Vec& x_bar, const Vec& y_bar,
                         const ConeSelector& cone_for) {
  inst.check_basic();
  if (!instance_on_graph(inst, x_bar, y_bar))
    throw Error("candidate point is not a feasible graph point");
  Certificate cert;
  Vec shift = inst.delta * inst.k;
  for (const Vec& x : ball_grid(inst, x_bar, inst.epsilon)) {
    if (inst.objective.kind == GraphKind::PolyGraph) {
      for (const auto& piece : inst.objective.pieces) {
        ++cert.checked_count;
        const PolyCone& cone = cone_for(x, y_bar);
        auto y = poly_slice_refuter(piece, x, cone, y_bar, shift, inst.tol);
        if (y) {
          Vec v = *y - y_bar + shift;
          cert.verdict = Verdict::Refuted;
          cert.witness = Witness{x, *y, Vec(-v)};
          return cert;
        }
      }
    } else {
      std::vector<Vec> vals;
      if (inst.objective.kind == GraphKind::PwAffine) {
        vals.push_back(inst.objective.value(x));
      } else {
        vals = inst.objective.values_at(x, inst.tol);
        std::sort(vals.begin(), vals.end(),
                  [](const Vec& a, const Vec& b) { return lex_less(a, b); });
      }
      for (const Vec& y : vals) {
        ++cert.checked_count;
        Vec v = y - y_bar + shift;
        if (v.cwiseAbs().maxCoeff() <= inst.tol) continue;
        const PolyCone& cone = cone_for(x, y);
        if (cone_contains_dual(cone, Vec(-v), inst.tol)) {
          cert.verdict = Verdict::Refuted;
          cert.witness = Witness{x, y, Vec(-v)};
          return cert;
        }
      }
    }
  }
  return cert;
}

}  // namespace

Certificate certify_nondominated_K(const Instance& inst, const Vec& x_bar, const Vec& y_bar) {
  if (inst.vds_kind != VdsKind::K) throw Error("instance is not a K-instance");
  return scan_K_style(inst, x_bar, y_bar,
                      [&](const Vec& x, const Vec&) -> const PolyCone& {
                        return cone_at(inst.cone_field, x, inst.tol);
                      });
}

Certificate certify_nondominated_Q(const Instance& inst, const Vec& x_bar, const Vec& y_bar,
                                   CertifyOptions opt) {
  if (inst.vds_kind != VdsKind::Q) throw Error("instance is not a Q-instance");
  inst.check_basic();
  if (!instance_on_graph(inst, x_bar, y_bar))
    throw Error("candidate point is not a feasible graph point");
  Certificate cert;
  Vec target = y_bar - inst.delta * inst.k;
  if (inst.objective.kind == GraphKind::PolyGraph)
    throw Error("Q-certifier requires a tabulated objective");
  for (const Vec& x : ball_grid(inst, x_bar, inst.epsilon)) {
    std::vector<Vec> vals;
    if (inst.objective.kind == GraphKind::PwAffine) {
      vals.push_back(inst.objective.value(x));
    } else {
      vals = inst.objective.values_at(x, inst.tol);
      std::sort(vals.begin(), vals.end(),
                [](const Vec& a, const Vec& b) { return lex_less(a, b); });
    }
    for (const Vec& y : vals) {
      if ((y - y_bar).cwiseAbs().maxCoeff() <= inst.tol) continue;  // y != y_bar
      ++cert.checked_count;
      Vec w = target - y;
      const PolyCone& qy = cone_at(inst.cone_field, y, inst.tol);
      bool member = cone_contains_dual(qy, w, inst.tol);
      bool nonzero = w.cwiseAbs().maxCoeff() > inst.tol;
      if (member && (nonzero || !opt.q_exclude_zero)) {
        cert.verdict = Verdict::Refuted;
        cert.witness = Witness{x, y, w};
        return cert;
      }
    }
  }
  return cert;
}

Certificate certify_efficient(const Instance& inst, const Vec& x_bar, const Vec& y_bar) {
  const PolyCone& fixed = inst.vds_kind == VdsKind::K ? cone_at(inst.cone_field, x_bar, inst.tol)
                                                      : cone_at(inst.cone_field, y_bar, inst.tol);
  return scan_K_style(inst, x_bar, y_bar,
                      [&](const Vec&, const Vec&) -> const PolyCone& { return fixed; });
}

Certificate certify_pareto(const Instance& inst, const PolyCone& cone, const Vec& x_bar,
                           const Vec& y_bar) {
  return scan_K_style(inst, x_bar, y_bar,
                      [&](const Vec&, const Vec&) -> const PolyCone& { return cone; });
}

bool revalidate_witness(const Instance& inst, const Vec& x_bar, const Vec& y_bar,
                        const Witness& w) {
  if (!inst.omega.contains(w.x, 1e-7)) return false;
  if (!inst.objective.on_graph(w.x, w.y, 1e-6)) return false;
  if (inst.epsilon < kInf && norm_of(Vec(w.x - x_bar), inst.norm) >= inst.epsilon) return false;
  if (inst.vds_kind == VdsKind::K) {
    Vec expect = -(w.y - y_bar + inst.delta * inst.k);
    if ((expect - w.cone_element).cwiseAbs().maxCoeff() > 1e-7) return false;
    return cone_contains(cone_at(inst.cone_field, w.x, inst.tol), w.cone_element, 1e-7) &&
           w.cone_element.cwiseAbs().maxCoeff() > inst.tol / 2;
  }
  Vec expect = y_bar - inst.delta * inst.k - w.y;
  if ((expect - w.cone_element).cwiseAbs().maxCoeff() > 1e-7) return false;
  return cone_contains(cone_at(inst.cone_field, w.y, inst.tol), w.cone_element, 1e-7);
}

}  // namespace vardom
