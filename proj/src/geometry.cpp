#include "vardom/geometry.hpp"

#include "vardom/linprog.hpp"

#include <algorithm>
#include <numeric>

namespace vardom {

namespace {

constexpr std::size_t kEnumCap = 200000;

bool near_parallel(const Vec& a, const Vec& b) {
  double na = a.norm(), nb = b.norm();
  if (na < 1e-14 || nb < 1e-14) return false;
  return a.dot(b) / (na * nb) > 1.0 - 1e-10;
}

std::vector<Vec> dedupe_directions(const std::vector<Vec>& gens) {
  std::vector<Vec> out;
  for (const Vec& g : gens) {
    if (g.norm() < 1e-13) continue;
    bool dup = false;
    for (const Vec& h : out) {
      if (near_parallel(g, h)) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(g / g.norm());
  }
  return out;
}

// y in cone(gens) within an L1 residual tolerance, via LP.
bool in_conic_hull(const std::vector<Vec>& gens, const Vec& y, int d, double tol) {
  if (gens.empty()) return y.cwiseAbs().maxCoeff() <= tol;
  const int m = static_cast<int>(gens.size());
  // min sum(s+ + s-) s.t. G lambda + s+ - s- = y, lambda, s >= 0
  Mat A(d, m + 2 * d);
  A.setZero();
  for (int j = 0; j < m; ++j) A.col(j) = gens[j];
  A.block(0, m, d, d) = Mat::Identity(d, d);
  A.block(0, m + d, d, d) = -Mat::Identity(d, d);
  Vec c = Vec::Zero(m + 2 * d);
  c.tail(2 * d).setOnes();
  auto r = lp::solve_standard(A, y, c);
  return r.status == lp::Status::Optimal && r.objective <= tol * (1.0 + y.lpNorm<1>());
}

}  // namespace

void Polyhedron::add(const Vec& normal, double offset) {
  if (normal.size() != dim) throw DimMismatch("halfspace dim");
  halfspaces.push_back({normal, offset});
}

void Polyhedron::add_eq(const Vec& normal, double offset) {
  add(normal, offset);
  add(Vec(-normal), -offset);
}

bool Polyhedron::contains(const Vec& x, double tol) const {
  if (x.size() != dim) throw DimMismatch("polyhedron contains: point dim");
  for (const auto& h : halfspaces) {
    if (h.normal.dot(x) > h.offset + tol) return false;
  }
  return true;
}

double Polyhedron::max_violation(const Vec& x) const {
  double v = 0.0;
  for (const auto& h : halfspaces) v = std::max(v, h.normal.dot(x) - h.offset);
  return v;
}

Polyhedron Polyhedron::box(const Vec& lo, const Vec& hi) {
  Polyhedron p(static_cast<int>(lo.size()));
  for (int i = 0; i < p.dim; ++i) {
    Vec e = Vec::Zero(p.dim);
    e[i] = 1.0;
    p.add(e, hi[i]);
    p.add(Vec(-e), -lo[i]);
  }
  return p;
}

Polyhedron Polyhedron::singleton(const Vec& pt) {
  Polyhedron p(static_cast<int>(pt.size()));
  for (int i = 0; i < p.dim; ++i) {
    Vec e = Vec::Zero(p.dim);
    e[i] = 1.0;
    p.add_eq(e, pt[i]);
  }
  return p;
}

Polyhedron Polyhedron::ball(const Vec& center, double radius, Norm n) {
  const int d = static_cast<int>(center.size());
  if (n == Norm::Max) {
    return box(Vec(center.array() - radius), Vec(center.array() + radius));
  }
  if (n == Norm::Sum) {
    // sum_i s_i (x_i - c_i) <= radius over all sign patterns
    Polyhedron p(d);
    const int patterns = 1 << d;
    for (int mask = 0; mask < patterns; ++mask) {
      Vec nvec(d);
      for (int i = 0; i < d; ++i) nvec[i] = (mask >> i) & 1 ? 1.0 : -1.0;
      p.add(nvec, radius + nvec.dot(center));
    }
    return p;
  }
  throw Error("euclidean ball is not polyhedral; use max or sum norm");
}

Polyhedron Polyhedron::product(const Polyhedron& q) const {
  Polyhedron p(dim + q.dim);
  for (const auto& h : halfspaces) {
    Vec n = Vec::Zero(p.dim);
    n.head(dim) = h.normal;
    p.add(n, h.offset);
  }
  for (const auto& h : q.halfspaces) {
    Vec n = Vec::Zero(p.dim);
    n.tail(q.dim) = h.normal;
    p.add(n, h.offset);
  }
  return p;
}

bool polyhedron_nonempty(const Polyhedron& p) {
  if (p.halfspaces.empty()) return true;
  lp::Problem prob(p.dim);
  for (const auto& h : p.halfspaces) prob.add_ub(h.normal, h.offset);
  return lp::feasible(prob);
}

std::vector<int> active_indices(const Polyhedron& p, const Vec& x, double tol) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(p.halfspaces.size()); ++i) {
    if (std::abs(p.halfspaces[i].normal.dot(x) - p.halfspaces[i].offset) <= tol)
      idx.push_back(i);
  }
  return idx;
}

std::vector<Vec> active_normals(const Polyhedron& p, const Vec& x, double tol) {
  std::vector<Vec> out;
  for (int i : active_indices(p, x, tol)) out.push_back(p.halfspaces[i].normal);
  return out;
}

std::vector<Vec> polyhedron_vertices(const Polyhedron& p, double tol) {
  const int d = p.dim;
  const int m = static_cast<int>(p.halfspaces.size());
  std::vector<Vec> verts;
  if (m < d) return verts;
  std::vector<int> comb(d);
  std::iota(comb.begin(), comb.end(), 0);
  auto advance = [&]() -> bool {
    int i = d - 1;
    while (i >= 0 && comb[i] == m - d + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < d; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  std::size_t iter = 0;
  do {
    if (++iter > kEnumCap) throw CapExceeded("vertex enumeration cap");
    Mat A(d, d);
    Vec b(d);
    for (int i = 0; i < d; ++i) {
      A.row(i) = p.halfspaces[comb[i]].normal;
      b[i] = p.halfspaces[comb[i]].offset;
    }
    Eigen::FullPivLU<Mat> lu(A);
    if (lu.rank() < d) continue;
    Vec x = lu.solve(b);
    if (!p.contains(x, 1e-7)) continue;
    bool dup = false;
    for (const Vec& v : verts) {
      if ((v - x).cwiseAbs().maxCoeff() <= 1e-7) {
        dup = true;
        break;
      }
    }
    if (!dup) verts.push_back(x);
  } while (advance());
  std::sort(verts.begin(), verts.end(), [](const Vec& a, const Vec& b) { return lex_less(a, b); });
  return verts;
}

bool vertex_cache_consistent(const Polyhedron& p, double tol) {
  if (p.vertex_cache.empty()) return true;
  auto verts = polyhedron_vertices(p, kTol);
  if (verts.size() != p.vertex_cache.size()) return false;
  for (const Vec& cached : p.vertex_cache) {
    bool matched = false;
    for (const Vec& v : verts) matched = matched || (v - cached).cwiseAbs().maxCoeff() <= tol;
    if (!matched) return false;
  }
  return true;
}

PolyCone PolyCone::orthant(int d) {
  std::vector<Vec> gens;
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    gens.push_back(e);
  }
  return PolyCone(d, gens, gens);
}

PolyCone PolyCone::zero(int d) {
  std::vector<Vec> duals;
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    duals.push_back(e);
    duals.push_back(Vec(-e));
  }
  return PolyCone(d, {}, duals);
}

bool PolyCone::is_zero(double tol) const {
  for (const Vec& g : primal) {
    if (g.norm() > tol) return false;
  }
  return true;
}

std::vector<Vec> prune_generators(const std::vector<Vec>& gens_in, int d) {
  std::vector<Vec> gens = dedupe_directions(gens_in);
  for (std::size_t i = 0; i < gens.size();) {
    std::vector<Vec> rest;
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (j != i) rest.push_back(gens[j]);
    }
    if (in_conic_hull(rest, gens[i], d, 1e-9)) {
      gens.erase(gens.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  std::sort(gens.begin(), gens.end(), [](const Vec& a, const Vec& b) { return lex_less(a, b); });
  return gens;
}

std::vector<Vec> dd_dual(const std::vector<Vec>& gens, int d) {
  std::vector<Vec> rays;
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    rays.push_back(e);
    rays.push_back(Vec(-e));
  }
  for (const Vec& g : gens) {
    if (g.norm() < 1e-13) continue;
    std::vector<Vec> pos, neg, zero;
    for (const Vec& r : rays) {
      double v = g.dot(r);
      if (v > kTol)
        pos.push_back(r);
      else if (v < -kTol)
        neg.push_back(r);
      else
        zero.push_back(r);
    }
    std::vector<Vec> next = pos;
    next.insert(next.end(), zero.begin(), zero.end());
    for (const Vec& rp : pos) {
      for (const Vec& rn : neg) {
        Vec comb = g.dot(rp) * rn - g.dot(rn) * rp;
        if (comb.norm() > 1e-12) next.push_back(Vec(comb / comb.norm()));
      }
    }
    rays = prune_generators(next, d);
  }
  return rays;
}

// The public dual_cone op documents dim <= 4; the graph machinery needs up
// to 6 (lifted graphs live in X x Y x Y), which the same DD handles at desk
// scale.
PolyCone PolyCone::from_primal(std::vector<Vec> gens, int d) {
  if (d > 6) throw Error("internal dual computation limited to dim <= 6; supply dual generators");
  auto pruned = prune_generators(gens, d);
  return PolyCone(d, pruned, dd_dual(pruned, d));
}

PolyCone PolyCone::from_dual(std::vector<Vec> duals, int d) {
  if (d > 6) throw Error("internal dual computation limited to dim <= 6; supply primal generators");
  auto pruned = prune_generators(duals, d);
  return PolyCone(d, dd_dual(pruned, d), pruned);
}

bool cone_contains_dual(const PolyCone& c, const Vec& y, double tol) {
  if (y.size() != c.dim) throw DimMismatch("cone membership: point dim");
  for (const Vec& dgen : c.dual) {
    if (dgen.dot(y) < -tol) return false;
  }
  return true;
}

bool cone_contains(const PolyCone& c, const Vec& y, double tol) {
  bool by_dual = cone_contains_dual(c, y, tol);
  bool by_primal = in_conic_hull(c.primal, y, c.dim, std::max(tol, 1e-8));
  if (by_dual != by_primal) {
    // Boundary cases within tolerance of each other are not inconsistencies.
    double dual_margin = kInf;
    for (const Vec& dgen : c.dual) dual_margin = std::min(dual_margin, dgen.dot(y));
    if (std::abs(dual_margin) > 1e-6 * (1.0 + y.norm()))
      throw InvariantError("cone primal/dual representations disagree");
    return by_dual;
  }
  return by_dual;
}

PolyCone dual_cone(const PolyCone& c) {
  if (c.dim > 4 && c.dual.empty())
    throw Error("dual_cone beyond dim 4 requires supplied dual generators");
  std::vector<Vec> dual_gens =
      c.dual.empty() ? dd_dual(c.primal, c.dim) : prune_generators(c.dual, c.dim);
  // (C+)+ = C for closed convex cones, so the dual's dual generators are the
  // primal generators of C.
  std::vector<Vec> back = c.primal.empty() ? dd_dual(dual_gens, c.dim)
                                           : prune_generators(c.primal, c.dim);
  return PolyCone(c.dim, dual_gens, back);
}

PolyCone intersect_cones(const std::vector<PolyCone>& cones) {
  if (cones.empty()) throw Error("intersect_cones: empty list");
  const int d = cones.front().dim;
  std::vector<Vec> duals;
  for (const auto& c : cones) {
    if (c.dim != d) throw DimMismatch("intersect_cones dims");
    duals.insert(duals.end(), c.dual.begin(), c.dual.end());
  }
  auto pruned = prune_generators(duals, d);
  return PolyCone(d, dd_dual(pruned, d), pruned);
}

bool cone_pointed(const PolyCone& c, double tol) {
  std::vector<Vec> gens;
  for (const Vec& g : c.primal) {
    if (g.norm() > tol) gens.push_back(g);
  }
  if (gens.empty()) return true;
  const int m = static_cast<int>(gens.size());
  // non-pointed iff exists nu >= 0, sum nu = 1, G nu = 0
  Mat A(c.dim + 1, m);
  for (int j = 0; j < m; ++j) {
    A.col(j).head(c.dim) = gens[j];
    A(c.dim, j) = 1.0;
  }
  Vec b = Vec::Zero(c.dim + 1);
  b[c.dim] = 1.0;
  auto r = lp::solve_standard(A, b, Vec::Zero(m));
  return r.status != lp::Status::Optimal;
}

ConeFlags validate_cone(const PolyCone& c, SplitRng& rng, int probes, double tol) {
  ConeFlags f;
  for (const Vec& dgen : c.dual) {
    for (const Vec& g : c.primal) {
      if (dgen.dot(g) < -tol) f.pairing_ok = false;
    }
  }
  f.pointed = cone_pointed(c, tol);
  bool has_gen = false;
  for (const Vec& g : c.primal) has_gen = has_gen || g.norm() > tol;
  bool has_dual = false;
  for (const Vec& dgen : c.dual) has_dual = has_dual || dgen.norm() > tol;
  f.proper = has_gen && has_dual;

  SplitRng local = rng.fork(0x636f6e65);
  for (int i = 0; i < probes; ++i) {
    Vec y;
    if (!c.primal.empty() && local.uniform() < 0.5) {
      y = Vec::Zero(c.dim);
      for (const Vec& g : c.primal) y += local.uniform(0.0, 1.0) * g;
      if (local.uniform() < 0.5) y += local.vector(c.dim, -0.3, 0.3);
    } else {
      y = local.vector(c.dim, -1.0, 1.0);
    }
    bool by_dual = cone_contains_dual(c, y, tol);
    double margin = kInf;
    for (const Vec& dgen : c.dual) margin = std::min(margin, dgen.dot(y));
    if (std::abs(margin) < 1e-7) continue;  // skip boundary flutter
    bool by_primal = in_conic_hull(c.primal, y, c.dim, 1e-8);
    if (by_dual != by_primal) f.duality_ok = false;
  }
  return f;
}

double ray_hit(const Polyhedron& p, const Vec& x, const Vec& u, double tol) {
  if (x.size() != p.dim || u.size() != p.dim) throw DimMismatch("ray_hit dims");
  double lo = 0.0, hi = kInf;
  for (const auto& h : p.halfspaces) {
    double a = h.normal.dot(u);
    double b = h.offset - h.normal.dot(x);
    if (a > tol) {
      hi = std::min(hi, b / a);
    } else if (a < -tol) {
      lo = std::max(lo, b / a);
    } else if (b < -tol) {
      return kInf;
    }
  }
  if (lo > hi + tol) return kInf;
  return std::max(lo, 0.0) <= hi + tol ? std::max(lo, 0.0) : kInf;
}

double distance_to_points(const Vec& y, const std::vector<Vec>& pts, Norm n) {
  if (pts.empty()) throw Error("distance to empty point set");
  double best = kInf;
  for (const Vec& p : pts) best = std::min(best, norm_of(Vec(y - p), n));
  return best;
}

Vec project_onto_polyhedron(const Vec& y, const Polyhedron& p) {
  if (p.contains(y, 1e-12)) return y;
  const int m = static_cast<int>(p.halfspaces.size());
  const int d = p.dim;
  double best = kInf;
  Vec best_x = y;
  bool found = false;
  // enumerate active sets by increasing size; first KKT-consistent candidate
  // of minimal distance wins (convex QP, so any KKT point is the optimum,
  // but keep the min to be safe against tolerance double-accepts)
  std::vector<int> subset;
  auto try_subset = [&](const std::vector<int>& w) {
    const int k = static_cast<int>(w.size());
    Mat Aw(k, d);
    Vec bw(k);
    for (int i = 0; i < k; ++i) {
      Aw.row(i) = p.halfspaces[w[i]].normal;
      bw[i] = p.halfspaces[w[i]].offset;
    }
    // x = y - Aw' mu with Aw x = bw  =>  (Aw Aw') mu = Aw y - bw
    Mat G = Aw * Aw.transpose();
    Vec rhs = Aw * y - bw;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(G);
    Vec mu = cod.solve(rhs);
    if ((G * mu - rhs).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff())) return;
    if (mu.size() > 0 && mu.minCoeff() < -1e-9) return;
    Vec x = y - Aw.transpose() * mu;
    if (!p.contains(x, 1e-8)) return;
    double dist = (x - y).norm();
    if (dist < best) {
      best = dist;
      best_x = x;
      found = true;
    }
  };
  std::size_t iters = 0;
  for (int size = 1; size <= std::min(m, d); ++size) {
    std::vector<int> comb(size);
    std::iota(comb.begin(), comb.end(), 0);
    for (;;) {
      if (++iters > kEnumCap) throw CapExceeded("projection enumeration cap");
      try_subset(comb);
      int i = size - 1;
      while (i >= 0 && comb[i] == m - size + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < size; ++j) comb[j] = comb[j - 1] + 1;
    }
    if (found) break;  // smaller active sets dominate; optimum already found
  }
  if (!found) throw Error("projection enumeration found no KKT point (empty polyhedron?)");
  return best_x;
}

double distance_to_polyhedron(const Vec& y, const Polyhedron& p, Norm n) {
  if (!polyhedron_nonempty(p)) throw Error("distance to empty polyhedron");
  if (n == Norm::Euclidean) return (project_onto_polyhedron(y, p) - y).norm();
  // max: min t st x in P, |x_i - y_i| <= t. sum: min sum t_i likewise.
  const int d = p.dim;
  if (n == Norm::Max) {
    lp::Problem prob(d + 1);
    Vec c = Vec::Zero(d + 1);
    c[d] = 1.0;
    prob.c = c;
    for (const auto& h : p.halfspaces) {
      Vec row = Vec::Zero(d + 1);
      row.head(d) = h.normal;
      prob.add_ub(row, h.offset);
    }
    for (int i = 0; i < d; ++i) {
      Vec row = Vec::Zero(d + 1);
      row[i] = 1.0;
      row[d] = -1.0;
      prob.add_ub(row, y[i]);
      row[i] = -1.0;
      prob.add_ub(row, -y[i]);
    }
    auto r = lp::solve(prob);
    if (r.status != lp::Status::Optimal) throw Error("distance LP failed");
    return std::max(0.0, r.objective);
  }
  lp::Problem prob(2 * d);
  Vec c = Vec::Zero(2 * d);
  c.tail(d).setOnes();
  prob.c = c;
  for (const auto& h : p.halfspaces) {
    Vec row = Vec::Zero(2 * d);
    row.head(d) = h.normal;
    prob.add_ub(row, h.offset);
  }
  for (int i = 0; i < d; ++i) {
    Vec row = Vec::Zero(2 * d);
    row[i] = 1.0;
    row[d + i] = -1.0;
    prob.add_ub(row, y[i]);
    row[i] = -1.0;
    prob.add_ub(row, -y[i]);
  }
  auto r = lp::solve(prob);
  if (r.status != lp::Status::Optimal) throw Error("distance LP failed");
  return std::max(0.0, r.objective);
}

MinNormResult min_norm_point(const std::vector<Vec>& hull_pts,
                             const std::vector<Vec>& cone_gens, int d) {
  if (hull_pts.empty()) return {0.0, Vec::Zero(d)};
  const int nv = static_cast<int>(hull_pts.size());
  const int nr = static_cast<int>(cone_gens.size());

  double best = kInf;
  Vec best_pt = Vec::Zero(d);
  bool found = false;
  std::size_t iters = 0;

  // Supports S (hull, nonempty, |S| <= d+1) and T (cone, |T| <= d).
  // KKT on the support: <g, v_i> = kappa (i in S), <g, r_j> = 0 (j in T),
  // sum lambda = 1; then dual feasibility over the complements.
  std::vector<int> sv, tv;
  auto test_support = [&](const std::vector<int>& S, const std::vector<int>& T) {
    if (++iters > kEnumCap) throw CapExceeded("min_norm enumeration cap");
    const int s = static_cast<int>(S.size());
    const int t = static_cast<int>(T.size());
    Mat W(d, s + t);
    for (int i = 0; i < s; ++i) W.col(i) = hull_pts[S[i]];
    for (int j = 0; j < t; ++j) W.col(s + j) = cone_gens[T[j]];
    Mat M(s + t + 1, s + t + 1);
    M.setZero();
    M.block(0, 0, s + t, s + t) = W.transpose() * W;
    for (int i = 0; i < s; ++i) {
      M(i, s + t) = -1.0;
      M(s + t, i) = 1.0;
    }
    Vec rhs = Vec::Zero(s + t + 1);
    rhs[s + t] = 1.0;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(M);
    Vec z = cod.solve(rhs);
    if ((M * z - rhs).cwiseAbs().maxCoeff() > 1e-8) return;
    Vec coeff = z.head(s + t);
    if (coeff.minCoeff() < -1e-9) return;
    Vec g = W * coeff;
    double kappa = z[s + t];
    for (int i = 0; i < nv; ++i) {
      if (g.dot(hull_pts[i]) - kappa < -1e-8) return;
    }
    for (int j = 0; j < nr; ++j) {
      if (g.dot(cone_gens[j]) < -1e-8) return;
    }
    double dist = g.norm();
    if (dist < best) {
      best = dist;
      best_pt = g;
      found = true;
    }
  };

  std::vector<std::vector<int>> hull_subsets, cone_subsets;
  auto gen_subsets = [](int n, int maxk, std::vector<std::vector<int>>& out) {
    out.push_back({});
    for (int k = 1; k <= std::min(n, maxk); ++k) {
      std::vector<int> comb(k);
      std::iota(comb.begin(), comb.end(), 0);
      for (;;) {
        out.push_back(comb);
        int i = k - 1;
        while (i >= 0 && comb[i] == n - k + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      }
    }
  };
  gen_subsets(nv, d + 1, hull_subsets);
  gen_subsets(nr, d, cone_subsets);
  for (const auto& S : hull_subsets) {
    if (S.empty()) continue;
    for (const auto& T : cone_subsets) test_support(S, T);
  }
  if (!found) throw Error("min_norm enumeration found no KKT point");
  return {best, best_pt};
}

}  // namespace vardom
