#include "vardom/nonsmooth.hpp"

#include "vardom/linprog.hpp"

#include <algorithm>
#include <numeric>

namespace vardom {

namespace {

constexpr std::size_t kBranchCap = 10000;

std::vector<int> pieces_containing(const std::vector<Polyhedron>& pieces, const Vec& p,
                                   double tol) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
    if (pieces[i].contains(p, tol)) out.push_back(i);
  }
  return out;
}

PolyCone cone_from_normals(const std::vector<Vec>& normals, int d) {
  if (normals.empty()) return PolyCone::from_primal({}, d);
  return PolyCone::from_primal(normals, d);
}

// Is there a direction h (a nearby-point displacement) realizing the given
// joint activity pattern? Tight rows stay tight, slack rows move strictly
// off, violated pieces have one strictly violated row.
bool pattern_realizable(const std::vector<Polyhedron>& pieces, const Vec& p, int dim,
                        const std::vector<int>& members,
                        const std::vector<std::vector<int>>& tight_rows,
                        const std::vector<std::vector<int>>& slack_rows,
                        const std::vector<std::pair<int, int>>& violated_rows, double tol) {
  bool any_strict = false;
  for (const auto& s : slack_rows) any_strict = any_strict || !s.empty();
  any_strict = any_strict || !violated_rows.empty();
  if (!any_strict) return true;  // h = 0 works

  // maximize m subject to the strict rows holding with margin m, |h| <= 1
  lp::Problem prob(dim + 1);
  Vec c = Vec::Zero(dim + 1);
  c[dim] = -1.0;
  prob.c = c;
  for (std::size_t mi = 0; mi < members.size(); ++mi) {
    const Polyhedron& piece = pieces[members[mi]];
    for (int r : tight_rows[mi]) {
      Vec row = Vec::Zero(dim + 1);
      row.head(dim) = piece.halfspaces[r].normal;
      prob.add_eq(row, 0.0);
    }
    for (int r : slack_rows[mi]) {
      Vec row = Vec::Zero(dim + 1);
      row.head(dim) = piece.halfspaces[r].normal;
      row[dim] = 1.0;  // <a,h> + m <= 0
      prob.add_ub(row, 0.0);
    }
  }
  for (const auto& [pi, r] : violated_rows) {
    Vec row = Vec::Zero(dim + 1);
    row.head(dim) = -pieces[pi].halfspaces[r].normal;
    row[dim] = 1.0;  // <a,h> >= m
    prob.add_ub(row, 0.0);
  }
  for (int j = 0; j < dim; ++j) {
    Vec e = Vec::Zero(dim + 1);
    e[j] = 1.0;
    prob.add_ub(e, 1.0);
    prob.add_ub(Vec(-e), 1.0);
  }
  Vec em = Vec::Zero(dim + 1);
  em[dim] = 1.0;
  prob.add_ub(em, 1.0);
  prob.add_ub(Vec(-em), 0.0);  // m >= 0
  auto r = lp::solve(prob);
  (void)tol;
  return r.status == lp::Status::Optimal && -r.objective > 1e-7;
}

bool cone_subset(const PolyCone& a, const PolyCone& b, double tol) {
  for (const Vec& g : a.primal) {
    if (!cone_contains_dual(b, g, tol)) return false;
  }
  return true;
}

void dedupe_cone_union(std::vector<PolyCone>& cones, double tol) {
  std::vector<PolyCone> out;
  for (std::size_t i = 0; i < cones.size(); ++i) {
    bool covered = false;
    for (std::size_t j = 0; j < cones.size() && !covered; ++j) {
      if (i == j) continue;
      if (cone_subset(cones[i], cones[j], tol)) {
        // strict containment or an identical earlier cone wins
        if (!cone_subset(cones[j], cones[i], tol) || j < i) covered = true;
      }
    }
    if (!covered) out.push_back(cones[i]);
  }
  cones = std::move(out);
}

std::vector<std::vector<int>> all_subsets(const std::vector<int>& items) {
  std::vector<std::vector<int>> out;
  const std::size_t n = items.size();
  if (n > 16) throw CapExceeded("activity pattern enumeration too large");
  for (std::size_t mask = 0; mask < (1ULL << n); ++mask) {
    std::vector<int> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ULL << i)) s.push_back(items[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

NormalConeResult normal_cone(const std::vector<Polyhedron>& pieces, const Vec& p,
                             NormalKind kind, double tol) {
  NormalConeResult res;
  auto at = pieces_containing(pieces, p, tol);
  if (at.empty()) {
    res.defined = false;
    return res;
  }
  const int dim = pieces[at.front()].dim;

  if (kind == NormalKind::Frechet) {
    std::vector<PolyCone> per_piece;
    for (int i : at) per_piece.push_back(cone_from_normals(active_normals(pieces[i], p, tol), dim));
    res.cones.push_back(per_piece.size() == 1 ? per_piece.front() : intersect_cones(per_piece));
    return res;
  }

  // Limiting cone: union over realizable joint activity patterns near p of
  // the intersected tight-row normal cones. Polyhedral data collapses the
  // sequential definition to finitely many strata.
  std::vector<std::vector<int>> act(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) act[i] = active_indices(pieces[at[i]], p, tol);

  std::size_t budget = kBranchCap;
  for (std::size_t jmask = 1; jmask < (1ULL << at.size()); ++jmask) {
    std::vector<int> members;
    std::vector<int> outsiders;
    for (std::size_t i = 0; i < at.size(); ++i) {
      if (jmask & (1ULL << i))
        members.push_back(static_cast<int>(i));
      else
        outsiders.push_back(static_cast<int>(i));
    }
    // per-member tight subsets
    std::vector<std::vector<std::vector<int>>> tight_choices;
    for (int mi : members) tight_choices.push_back(all_subsets(act[mi]));
    // violated-row choices for outsiders
    std::vector<std::vector<int>> violated_choices;
    for (int oi : outsiders) {
      if (act[oi].empty()) {
        violated_choices.clear();
        break;  // a piece active-free at p cannot be escaped locally
      }
      violated_choices.push_back(act[oi]);
    }
    if (!outsiders.empty() && violated_choices.empty()) continue;

    std::vector<std::size_t> tix(members.size(), 0);
    for (;;) {
      std::vector<std::size_t> vix(outsiders.size(), 0);
      for (;;) {
        if (budget-- == 0) throw CapExceeded("limiting normal cone branch cap");
        std::vector<std::vector<int>> tight(members.size()), slack(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
          tight[i] = tight_choices[i][tix[i]];
          for (int r : act[members[i]]) {
            if (std::find(tight[i].begin(), tight[i].end(), r) == tight[i].end())
              slack[i].push_back(r);
          }
        }
        std::vector<std::pair<int, int>> violated;
        for (std::size_t i = 0; i < outsiders.size(); ++i)
          violated.push_back({at[outsiders[i]], violated_choices[i][vix[i]]});
        std::vector<int> member_ids;
        for (int mi : members) member_ids.push_back(at[mi]);
        if (pattern_realizable(pieces, p, dim, member_ids, tight, slack, violated, tol)) {
          std::vector<PolyCone> per;
          for (std::size_t i = 0; i < members.size(); ++i) {
            std::vector<Vec> normals;
            for (int r : tight[i]) normals.push_back(pieces[member_ids[i]].halfspaces[r].normal);
            per.push_back(cone_from_normals(normals, dim));
          }
          res.cones.push_back(per.size() == 1 ? per.front() : intersect_cones(per));
        }
        // advance violated indices
        std::size_t k = 0;
        for (; k < vix.size(); ++k) {
          if (++vix[k] < violated_choices[k].size()) break;
          vix[k] = 0;
        }
        if (k == vix.size()) break;
        if (vix.empty()) break;
      }
      std::size_t k = 0;
      for (; k < tix.size(); ++k) {
        if (++tix[k] < tight_choices[k].size()) break;
        tix[k] = 0;
      }
      if (k == tix.size()) break;
      if (tix.empty()) break;
    }
  }
  dedupe_cone_union(res.cones, tol);
  return res;
}

bool normal_union_contains(const NormalConeResult& n, const Vec& v, double tol) {
  if (!n.defined) return false;
  for (const auto& c : n.cones) {
    if (cone_contains_dual(c, v, tol)) return true;
  }
  return false;
}

CoderivBranches graph_coderiv_branches(const GraphMap& g, const Vec& x, const Vec& y,
                                       NormalKind kind, double tol) {
  CoderivBranches out;
  out.dim_x = g.dim_x;
  out.dim_y = g.dim_y;
  Vec xy(g.dim_x + g.dim_y);
  xy.head(g.dim_x) = x;
  xy.tail(g.dim_y) = y;
  auto nc = normal_cone(g.graph_pieces(), xy, kind, tol);
  out.defined = nc.defined;
  out.cones = std::move(nc.cones);
  return out;
}

namespace {

// Feasibility of R lambda = target over lambda >= 0 for a branch cone.
bool branch_hits(const PolyCone& branch, const Vec& target, double tol) {
  const int m = static_cast<int>(branch.primal.size());
  const int d = branch.dim;
  if (m == 0) return target.cwiseAbs().maxCoeff() <= tol;
  lp::Problem prob(m);
  for (int r = 0; r < d; ++r) {
    Vec row(m);
    for (int j = 0; j < m; ++j) row[j] = branch.primal[j][r];
    prob.add_eq(row, target[r]);
  }
  for (int j = 0; j < m; ++j) {
    Vec e = Vec::Zero(m);
    e[j] = -1.0;
    prob.add_ub(e, 0.0);  // lambda >= 0
  }
  (void)tol;
  return lp::feasible(prob);
}

}  // namespace

bool coderiv_nonempty(const CoderivBranches& b, const Vec& y_star, double tol) {
  if (!b.defined) return false;
  for (const auto& branch : b.cones) {
    const int m = static_cast<int>(branch.primal.size());
    if (m == 0) {
      if (y_star.cwiseAbs().maxCoeff() <= tol) return true;
      continue;
    }
    lp::Problem prob(m);
    for (int r = 0; r < b.dim_y; ++r) {
      Vec row(m);
      for (int j = 0; j < m; ++j) row[j] = branch.primal[j][b.dim_x + r];
      prob.add_eq(row, -y_star[r]);
    }
    for (int j = 0; j < m; ++j) {
      Vec e = Vec::Zero(m);
      e[j] = -1.0;
      prob.add_ub(e, 0.0);
    }
    if (lp::feasible(prob)) return true;
  }
  return false;
}

bool coderiv_contains(const CoderivBranches& b, const Vec& y_star, const Vec& x_star,
                      double tol) {
  if (!b.defined) return false;
  Vec target(b.dim_x + b.dim_y);
  target.head(b.dim_x) = x_star;
  target.tail(b.dim_y) = -y_star;
  for (const auto& branch : b.cones) {
    if (branch_hits(branch, target, tol)) return true;
  }
  return false;
}

bool coderiv_zero_slice_trivial(const CoderivBranches& b, double tol) {
  if (!b.defined) return true;
  for (const auto& branch : b.cones) {
    const int m = static_cast<int>(branch.primal.size());
    if (m == 0) continue;
    // base of {lambda >= 0 : R_y lambda = 0}; maximize |x-image| coordinates
    for (int coord = 0; coord < b.dim_x; ++coord) {
      for (double sign : {1.0, -1.0}) {
        lp::Problem prob(m);
        Vec c(m);
        for (int j = 0; j < m; ++j) c[j] = -sign * branch.primal[j][coord];
        prob.c = c;
        for (int r = 0; r < b.dim_y; ++r) {
          Vec row(m);
          for (int j = 0; j < m; ++j) row[j] = branch.primal[j][b.dim_x + r];
          prob.add_eq(row, 0.0);
        }
        Vec ones = Vec::Ones(m);
        prob.add_eq(ones, 1.0);
        for (int j = 0; j < m; ++j) {
          Vec e = Vec::Zero(m);
          e[j] = -1.0;
          prob.add_ub(e, 0.0);
        }
        auto r = lp::solve(prob);
        if (r.status == lp::Status::Optimal && -r.objective > tol * 10) return false;
      }
    }
  }
  return true;
}

bool coderiv_zero_slice_meets_cone(const CoderivBranches& b,
                                   const std::vector<Vec>& other_gens, double tol) {
  if (!b.defined) return false;
  const int n_other = static_cast<int>(other_gens.size());
  for (const auto& branch : b.cones) {
    const int m = static_cast<int>(branch.primal.size());
    if (m == 0) continue;
    for (int coord = 0; coord < b.dim_x; ++coord) {
      for (double sign : {1.0, -1.0}) {
        lp::Problem prob(m + n_other);
        Vec c = Vec::Zero(m + n_other);
        for (int j = 0; j < m; ++j) c[j] = -sign * branch.primal[j][coord];
        prob.c = c;
        // R_y lambda = 0
        for (int r = 0; r < b.dim_y; ++r) {
          Vec row = Vec::Zero(m + n_other);
          for (int j = 0; j < m; ++j) row[j] = branch.primal[j][b.dim_x + r];
          prob.add_eq(row, 0.0);
        }
        // R_x lambda = sum mu_j g_j
        for (int r = 0; r < b.dim_x; ++r) {
          Vec row = Vec::Zero(m + n_other);
          for (int j = 0; j < m; ++j) row[j] = branch.primal[j][r];
          for (int j = 0; j < n_other; ++j) row[m + j] = -other_gens[j][r];
          prob.add_eq(row, 0.0);
        }
        Vec ones = Vec::Ones(m + n_other);
        prob.add_eq(ones, 1.0);
        for (int j = 0; j < m + n_other; ++j) {
          Vec e = Vec::Zero(m + n_other);
          e[j] = -1.0;
          prob.add_ub(e, 0.0);
        }
        auto r = lp::solve(prob);
        if (r.status == lp::Status::Optimal && -r.objective > tol * 10) return true;
      }
    }
  }
  return false;
}

std::vector<Vec> t_min_subdiff_gens(const Polyhedron& a, const Vec& u, const Vec& x,
                                    double tol) {
  double t = ray_hit(a, x, u);
  if (t == kInf || t <= tol) throw Error("t_min_subdiff: x must see A at positive time");
  std::vector<Vec> gens;
  for (const auto& h : a.halfspaces) {
    double pair = h.normal.dot(u);
    if (pair < -kTol) {
      double branch = (h.normal.dot(x) - h.offset) / (-pair);
      if (std::abs(branch - t) <= tol) gens.push_back(Vec(h.normal / (-pair)));
    }
  }
  if (gens.empty()) throw Error("t_min_subdiff: no active lower-bound rows");
  return gens;
}

double ScalarPwa::value(const Vec& x, double tol) const {
  for (const auto& c : cells) {
    if (c.region.contains(x, tol)) return c.grad.dot(x) + c.offset;
  }
  throw Error("ScalarPwa: point not covered");
}

SubdiffResult subdiff_pa(const ScalarPwa& g, const Vec& x, SplitRng& rng, double tol) {
  const int d = static_cast<int>(x.size());
  std::vector<Vec> active;
  double val = g.value(x, tol);
  for (const auto& c : g.cells) {
    if (!c.region.contains(x, tol)) continue;
    if (std::abs(c.grad.dot(x) + c.offset - val) > 1e-6)
      throw InvariantError("subdiff_pa: active cells disagree on the value");
    active.push_back(c.grad);
  }
  if (active.empty()) throw Error("subdiff_pa: no active cell");

  // midpoint-sampling convexity validation around x
  SplitRng local = rng.fork(0x73756264);
  bool convex = true;
  for (int s = 0; s < 200 && convex; ++s) {
    Vec a = x + local.vector(d, -0.5, 0.5);
    Vec b = x + local.vector(d, -0.5, 0.5);
    double va, vb, vm;
    try {
      va = g.value(a, tol);
      vb = g.value(b, tol);
      vm = g.value(Vec(0.5 * (a + b)), tol);
    } catch (const Error&) {
      continue;
    }
    if (vm > 0.5 * va + 0.5 * vb + 1e-8) convex = false;
  }
  SubdiffResult res;
  if (convex) {
    res.hull_gens = active;
    res.evidence = Evidence::Exact;
    return res;
  }
  // sampled Frechet fallback: keep gradients minorizing the directional
  // derivative along probe directions
  res.evidence = Evidence::Sampled;
  for (const Vec& cand : active) {
    bool ok = true;
    for (int s = 0; s < 64 && ok; ++s) {
      Vec v = local.unit_vector(d, Norm::Euclidean);
      double step = 1e-5;
      double dd;
      try {
        dd = (g.value(Vec(x + step * v), tol) - val) / step;
      } catch (const Error&) {
        continue;
      }
      if (cand.dot(v) > dd + 1e-6) ok = false;
    }
    if (ok) res.hull_gens.push_back(cand);
  }
  return res;
}

SubdiffBranches subdiff_s_vds(const Instance& inst, const Vec& x_tilde, const Vec& x_bar,
                              SplitRng& rng) {
  if (inst.objective.kind != GraphKind::PwAffine)
    throw Error("subdiff_s_vds needs a piecewise-affine objective");
  Vec a = inst.objective.value(x_tilde);
  const PolyCone& cone = cone_at(inst.cone_field, x_bar, inst.tol);

  auto s_of = [&](const Vec& x) -> double {
    auto r = s_vds(inst.objective, inst.cone_field, a, inst.k, x);
    if (r.status != GwStatus::Finite) return kInf;
    return r.value;
  };

  SubdiffBranches res;
  if (inst.dim_x == 1) {
    // one-sided slopes are exact for piecewise-affine data (the nearest
    // breakpoint is a cell boundary, never closer than the probe step)
    double h = 1e-7;
    double s0 = s_of(x_bar);
    if (!std::isfinite(s0)) throw Error("subdiff_s_vds: s is infinite at x_bar");
    double right = (s_of(Vec(x_bar.array() + h)) - s0) / h;
    double left = (s0 - s_of(Vec(x_bar.array() - h))) / h;
    // an infinite side means the effective domain of s ends at x_bar; the
    // subdifferential recedes along that side's outward normal
    if (!std::isfinite(right) && !std::isfinite(left)) {
      res.branches.push_back({{make_vec({0.0})}, {make_vec({1.0}), make_vec({-1.0})}});
    } else if (!std::isfinite(right)) {
      res.branches.push_back({{make_vec({left})}, {make_vec({1.0})}});
    } else if (!std::isfinite(left)) {
      res.branches.push_back({{make_vec({right})}, {make_vec({-1.0})}});
    } else if (left <= right + 1e-9) {
      res.branches.push_back({{make_vec({left}), make_vec({right})}, {}});
    } else {
      res.branches.push_back({{make_vec({left})}, {}});
      res.branches.push_back({{make_vec({right})}, {}});
    }
    return res;
  }

  // s(x) = max over d of <d, f(x) - a>/<d,k> locally; collect active slopes
  double sval = -kInf;
  struct Branch {
    Vec grad;
    double val;
  };
  std::vector<Branch> branches;
  for (const auto& cell : inst.objective.affine_cells) {
    if (!cell.region.contains(x_bar, inst.tol)) continue;
    Vec fx = cell.a * x_bar + cell.b;
    for (const Vec& d : cone.dual) {
      double pair = d.dot(inst.k);
      if (pair <= kTol) continue;
      double val = d.dot(fx - a) / pair;
      sval = std::max(sval, val);
      branches.push_back({Vec(cell.a.transpose() * d / pair), val});
    }
  }
  if (branches.empty()) throw Error("subdiff_s_vds: no pairing dual generator");
  std::vector<Vec> active;
  for (const auto& br : branches) {
    if (br.val >= sval - 1e-7) active.push_back(br.grad);
  }

  // local convexity decides hull vs per-gradient branches
  SplitRng local = rng.fork(0x73766473);
  bool convex = true;
  for (int s = 0; s < 100 && convex; ++s) {
    Vec p = x_bar + local.vector(inst.dim_x, -0.2, 0.2);
    Vec q = x_bar + local.vector(inst.dim_x, -0.2, 0.2);
    double vp, vq, vm;
    try {
      vp = s_of(p);
      vq = s_of(q);
      vm = s_of(Vec(0.5 * (p + q)));
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(vp) && std::isfinite(vq) && vm > 0.5 * vp + 0.5 * vq + 1e-8)
      convex = false;
  }
  res.evidence = Evidence::Sampled;
  if (convex) {
    res.branches.push_back({active, {}});
  } else {
    for (const Vec& g : active) res.branches.push_back({{g}, {}});
  }
  return res;
}

ConvexityReport convexity_wrt(const GraphMap& g, const PolyCone& r, SplitRng& rng,
                              int samples) {
  ConvexityReport rep;
  if (g.kind == GraphKind::PwAffine && g.affine_cells.size() == 1) {
    // affine single-valued maps are convex wrt any cone containing 0
    rep.exact = true;
    rep.checked = 1;
    return rep;
  }
  SplitRng local = rng.fork(0x636e7678);
  const double alphas[3] = {0.25, 0.5, 0.75};
  if (g.kind == GraphKind::FiniteGraph || g.kind == GraphKind::SingleValued) {
    const auto& nodes = g.nodes;
    const int n = static_cast<int>(nodes.size());
    for (int s = 0; s < samples; ++s) {
      const auto& n1 = nodes[local.uniform_int(0, n - 1)];
      const auto& n2 = nodes[local.uniform_int(0, n - 1)];
      double alpha = alphas[local.uniform_int(0, 2)];
      Vec xc = alpha * n1.x + (1 - alpha) * n2.x;
      const FiniteGraphNode* mid = nullptr;
      for (const auto& node : nodes) {
        if ((node.x - xc).cwiseAbs().maxCoeff() <= 1e-9) {
          mid = &node;
          break;
        }
      }
      if (!mid) continue;  // combination leaves the grid closure
      ++rep.checked;
      for (const Vec& y1 : n1.values) {
        for (const Vec& y2 : n2.values) {
          Vec combo = alpha * y1 + (1 - alpha) * y2;
          bool covered = false;
          for (const Vec& y : mid->values) {
            if (cone_contains_dual(r, Vec(combo - y), 1e-8)) {
              covered = true;
              break;
            }
          }
          if (!covered) {
            rep.holds = false;
            rep.witness = "violating combination found";
            return rep;
          }
        }
      }
    }
    return rep;
  }
  if (g.kind == GraphKind::PwAffine) {
    for (int s = 0; s < samples; ++s) {
      Vec x1 = local.vector(g.dim_x, -1, 1);
      Vec x2 = local.vector(g.dim_x, -1, 1);
      double alpha = alphas[local.uniform_int(0, 2)];
      Vec xc = alpha * x1 + (1 - alpha) * x2;
      Vec f1, f2, fc;
      try {
        f1 = g.value(x1);
        f2 = g.value(x2);
        fc = g.value(xc);
      } catch (const Error&) {
        continue;
      }
      ++rep.checked;
      Vec combo = alpha * f1 + (1 - alpha) * f2;
      if (!cone_contains_dual(r, Vec(combo - fc), 1e-8)) {
        rep.holds = false;
        rep.witness = "violating combination found";
        return rep;
      }
    }
    return rep;
  }
  throw Error("convexity_wrt: unsupported graph kind");
}

FirstOrderResidualReport first_order_residual_check(const Instance& inst, const Vec& x_tilde,
                              const EvpVdsResult& evp_out, SplitRng& rng) {
  FirstOrderResidualReport rep;
  const Vec& xb = evp_out.evp.x_bar;
  double root_delta = std::sqrt(inst.delta);
  rep.bound = root_delta + 1e-8;
  rep.case_i = root_delta >= inst.epsilon;

  auto sub = subdiff_s_vds(inst, x_tilde, xb, rng);
  rep.evidence = sub.evidence;

  std::vector<Vec> omega_normals = active_normals(inst.omega, xb, 1e-7);
  std::vector<Vec> cone_gens = omega_normals;  // N(Omega, x_bar), convex case
  if (rep.case_i) {
    Vec dirv = xb - x_tilde;
    if (dirv.norm() > inst.tol) {
      PolyCone n_omega = cone_from_normals(omega_normals, inst.dim_x);
      if (cone_contains_dual(n_omega, Vec(-dirv), inst.tol)) {
        rep.hypothesis_ok = false;  // x_bar - x_tilde in -N(Omega, x_bar)
        return rep;
      }
      cone_gens.push_back(dirv);
    }
  }
  double best = kInf;
  for (const auto& branch : sub.branches) {
    std::vector<Vec> gens = cone_gens;
    gens.insert(gens.end(), branch.rays.begin(), branch.rays.end());
    best = std::min(best, min_norm_point(branch.hull, gens, inst.dim_x).dist);
  }
  rep.residual = best;
  rep.ok = rep.residual <= rep.bound;
  return rep;
}

DecomposeResult decompose_subdiff(const Instance& inst, const Vec& x_bar, const Vec& x_star) {
  DecomposeResult res;
  if (inst.objective.kind != GraphKind::PwAffine)
    throw Error("decompose_subdiff needs piecewise-affine data");
  const PolyCone& p = cone_at(inst.cone_field, x_bar, inst.tol);
  // base vertices of {y* in P+ : <y*,k> = 1}: normalized dual generators
  std::vector<Vec> base;
  for (const Vec& d : p.dual) {
    double pair = d.dot(inst.k);
    if (pair > kTol) base.push_back(Vec(d / pair));
  }
  if (base.empty()) throw HypothesisError("decompose_subdiff: no pairing dual generator");

  std::vector<Mat> act_mats;
  for (const auto& cell : inst.objective.affine_cells) {
    if (cell.region.contains(x_bar, inst.tol)) act_mats.push_back(cell.a);
  }
  if (act_mats.empty()) throw Error("decompose_subdiff: x_bar not covered");

  const int nb = static_cast<int>(base.size());
  // joint search: y* = sum_j theta_j base_j restricted to a single active
  // cell A: solve A' (sum theta base_j) = x*, theta in simplex
  for (const Mat& a : act_mats) {
    lp::Problem prob(nb);
    for (int r = 0; r < inst.dim_x; ++r) {
      Vec row(nb);
      for (int j = 0; j < nb; ++j) row[j] = (a.transpose() * base[j])[r];
      prob.add_eq(row, x_star[r]);
    }
    Vec ones = Vec::Ones(nb);
    prob.add_eq(ones, 1.0);
    for (int j = 0; j < nb; ++j) {
      Vec e = Vec::Zero(nb);
      e[j] = -1.0;
      prob.add_ub(e, 0.0);
    }
    auto r = lp::solve(prob);
    if (r.status == lp::Status::Optimal) {
      Vec y_star = Vec::Zero(inst.dim_y);
      for (int j = 0; j < nb; ++j) y_star += r.x[j] * base[j];
      res.found = true;
      res.y_star = y_star;
      res.combination = r.x;
      return res;
    }
  }
  // fallback: fixed base vertex, convex combination across active cells
  for (const Vec& y_star : base) {
    const int nc = static_cast<int>(act_mats.size());
    lp::Problem prob(nc);
    for (int r = 0; r < inst.dim_x; ++r) {
      Vec row(nc);
      for (int j = 0; j < nc; ++j) row[j] = (act_mats[j].transpose() * y_star)[r];
      prob.add_eq(row, x_star[r]);
    }
    Vec ones = Vec::Ones(nc);
    prob.add_eq(ones, 1.0);
    for (int j = 0; j < nc; ++j) {
      Vec e = Vec::Zero(nc);
      e[j] = -1.0;
      prob.add_ub(e, 0.0);
    }
    auto r = lp::solve(prob);
    if (r.status == lp::Status::Optimal) {
      res.found = true;
      res.y_star = y_star;
      res.combination = r.x;
      return res;
    }
  }
  return res;  // exhaustive failure; the caller treats this as a test failure
}

}  // namespace vardom
