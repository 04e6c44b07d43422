#include "vardom/cone_field.hpp"

namespace vardom {

bool cones_equal(const PolyCone& a, const PolyCone& b, double tol) {
  if (a.dim != b.dim) return false;
  for (const Vec& g : a.primal) {
    if (!cone_contains_dual(b, g, tol)) return false;
  }
  for (const Vec& g : b.primal) {
    if (!cone_contains_dual(a, g, tol)) return false;
  }
  if (a.primal.empty() != b.primal.empty()) {
    // {0} against something nontrivial
    const PolyCone& nonzero = a.primal.empty() ? b : a;
    for (const Vec& g : nonzero.primal) {
      if (g.norm() > tol) return false;
    }
  }
  return true;
}

const PolyCone& cone_at(const ConeField& f, const Vec& p, double tol) {
  if (p.size() != f.domain_dim) throw DimMismatch("cone_at: point dim");
  for (const auto& cell : f.cells) {
    if (cell.region.contains(p, tol)) return cell.cone;
  }
  if (f.default_cone) return *f.default_cone;
  throw Error("cone field undefined at queried point");
}

void validate_field(const ConeField& f, SplitRng& rng, bool require_pointed) {
  for (std::size_t i = 0; i < f.cells.size(); ++i) {
    ConeFlags flags = validate_cone(f.cells[i].cone, rng);
    if (!flags.pairing_ok || !flags.duality_ok)
      throw InvariantError("cone field cell has inconsistent cone representations");
    if (require_pointed && !flags.pointed)
      throw InvariantError("cone field cell cone is not pointed");
    for (std::size_t j = i + 1; j < f.cells.size(); ++j) {
      // overlap check: both regions satisfiable simultaneously
      Polyhedron both = f.cells[i].region;
      for (const auto& h : f.cells[j].region.halfspaces) both.add(h.normal, h.offset);
      if (polyhedron_nonempty(both) && !cones_equal(f.cells[i].cone, f.cells[j].cone))
        throw InvariantError("overlapping cone field cells carry different cones");
    }
  }
}

std::vector<int> cells_meeting_ball(const ConeField& f, const Vec& center, double radius,
                                    Norm n) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(f.cells.size()); ++i) {
    const Polyhedron& r = f.cells[i].region;
    if (r.halfspaces.empty()) {
      idx.push_back(i);
      continue;
    }
    if (!polyhedron_nonempty(r)) continue;
    if (distance_to_polyhedron(center, r, n) <= radius + kTol) idx.push_back(i);
  }
  return idx;
}

CommonConeResult common_cone(const ConeField& f, const Vec& center, double radius, Norm n) {
  CommonConeResult out;
  out.contributing_cells = cells_meeting_ball(f, center, radius, n);
  std::vector<PolyCone> cones;
  for (int i : out.contributing_cells) cones.push_back(f.cells[i].cone);
  if (f.default_cone) cones.push_back(*f.default_cone);
  if (cones.empty()) throw Error("common_cone: ball meets no covered region");
  out.cone = cones.size() == 1 ? cones.front() : intersect_cones(cones);
  out.trivial = out.cone.is_zero();
  return out;
}

ScalarizationReport scalarization_condition(const ConeField& f, const Vec& center,
                                            double radius, const Vec& k, Norm n) {
  ScalarizationReport rep;
  if (norm_of(k, n) < kTol) throw Error("scalarization_condition: k must be nonzero");
  const double probe_ts[3] = {1e-3, 1.0, 1e3};
  bool probes_ok = true;
  bool sufficient_ok = true;
  auto cells = cells_meeting_ball(f, center, radius, n);
  std::vector<const PolyCone*> cones;
  for (int i : cells) cones.push_back(&f.cells[i].cone);
  if (f.default_cone) cones.push_back(&*f.default_cone);
  for (const PolyCone* cp : cones) {
    const PolyCone& c = *cp;
    bool in = cone_contains_dual(c, k, kTol);
    bool neg_in = cone_contains_dual(c, Vec(-k), kTol);
    if (!in || neg_in) sufficient_ok = false;
    std::vector<Vec> gens = c.primal;
    gens.push_back(Vec::Zero(c.dim));  // 0 lies in every cone
    for (const Vec& g : gens) {
      for (double t : probe_ts) {
        Vec p = g + t * k;
        if (!cone_contains_dual(c, p, kTol * std::max(1.0, t)) || p.norm() <= kTol) {
          probes_ok = false;
          rep.detail = "generator probe escaped the cone";
        }
      }
    }
  }
  rep.holds = probes_ok;
  rep.sufficient = sufficient_ok && probes_ok;
  return rep;
}

InteriorityReport interiority(const Vec& k, const PolyCone& p) {
  InteriorityReport rep;
  if (p.is_zero()) {
    rep.degenerate = true;
    return rep;
  }
  double margin = kInf;
  for (const Vec& d : p.dual) {
    double nd = d.norm();
    if (nd < kTol) continue;
    margin = std::min(margin, d.dot(k) / nd);
  }
  if (margin == kInf) margin = 0.0;  // no dual constraints: whole space, no interior test
  rep.margin = margin;
  rep.holds = margin >= kTol;
  return rep;
}

}  // namespace vardom
