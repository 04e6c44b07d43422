#include "vardom/openness.hpp"

#include "vardom/linprog.hpp"

#include <algorithm>
#include <numeric>

namespace vardom {

namespace {
constexpr long kComboCap = 10000;
}

GraphMap cone_field_to_graph(const ConeField& f, int dim_x) {
  if (f.domain_dim != dim_x) throw DimMismatch("cone_field_to_graph: domain dim");
  std::vector<Polyhedron> pieces;
  for (const auto& cell : f.cells) {
    Polyhedron cone_poly(f.value_dim);
    for (const Vec& d : cell.cone.dual) cone_poly.add(Vec(-d), 0.0);
    pieces.push_back(cell.region.product(cone_poly));
  }
  if (f.default_cone) {
    Polyhedron cone_poly(f.value_dim);
    for (const Vec& d : f.default_cone->dual) cone_poly.add(Vec(-d), 0.0);
    pieces.push_back(Polyhedron::whole_space(dim_x).product(cone_poly));
  }
  return GraphMap::poly(std::move(pieces), dim_x, f.value_dim);
}

GraphMap indicator_graph(const Polyhedron& omega, int dim_y) {
  Polyhedron zero(dim_y);
  for (int i = 0; i < dim_y; ++i) {
    Vec e = Vec::Zero(dim_y);
    e[i] = 1.0;
    zero.add_eq(e, 0.0);
  }
  return GraphMap::poly({omega.product(zero)}, omega.dim, dim_y);
}

namespace {

// One probe membership: exists x in the ball and y_i per part with
// (x, y_i) in a chosen graph piece and sum y_i = probe.
bool probe_covered(const SumMap& map, const Vec& probe, const Vec& x_bar, double x_radius,
                   Norm norm, bool continuum_x, const std::vector<Vec>& x_candidates,
                   long& combo_budget) {
  const int dx = map.dim_x;
  const int dy = map.dim_y;
  const int p = static_cast<int>(map.parts.size());

  std::vector<std::vector<Polyhedron>> piece_lists;
  for (const auto& part : map.parts) piece_lists.push_back(part.graph_pieces());

  std::vector<std::size_t> idx(p, 0);
  for (;;) {
    if (--combo_budget < 0) throw CapExceeded("coverage piece-combination cap");
    // build the joint LP for this piece combination
    // vars: x (dx) then y_i (p * dy)
    const int nvars = dx + p * dy;
    lp::Problem prob(nvars);
    bool degenerate = false;
    for (int i = 0; i < p && !degenerate; ++i) {
      const Polyhedron& piece = piece_lists[i][idx[i]];
      for (const auto& h : piece.halfspaces) {
        Vec row = Vec::Zero(nvars);
        row.head(dx) = h.normal.head(dx);
        row.segment(dx + i * dy, dy) = h.normal.tail(dy);
        prob.add_ub(row, h.offset);
      }
    }
    // sum of part values equals the probe
    for (int r = 0; r < dy; ++r) {
      Vec row = Vec::Zero(nvars);
      for (int i = 0; i < p; ++i) row[dx + i * dy + r] = 1.0;
      prob.add_eq(row, probe[r]);
    }
    auto solve_with_x_ball = [&](const std::optional<Vec>& fixed_x) -> bool {
      lp::Problem q = prob;
      if (fixed_x) {
        for (int j = 0; j < dx; ++j) {
          Vec row = Vec::Zero(nvars);
          row[j] = 1.0;
          q.add_eq(row, (*fixed_x)[j]);
        }
      } else {
        // open ball realized with a tolerance margin; max norm = box (exact),
        // sum norm = cross-polytope rows
        double rad = x_radius * (1.0 - 1e-9);
        Polyhedron ball = Polyhedron::ball(x_bar, rad, norm == Norm::Euclidean ? Norm::Max : norm);
        for (const auto& h : ball.halfspaces) {
          Vec row = Vec::Zero(nvars);
          row.head(dx) = h.normal;
          q.add_ub(row, h.offset);
        }
      }
      return lp::feasible(q);
    };
    if (continuum_x && norm != Norm::Euclidean) {
      if (solve_with_x_ball(std::nullopt)) return true;
    } else {
      for (const Vec& cand : x_candidates) {
        if (norm_of(Vec(cand - x_bar), norm) >= x_radius - kTol) continue;
        if (solve_with_x_ball(cand)) return true;
      }
    }
    // advance piece indices
    int k = 0;
    for (; k < p; ++k) {
      if (++idx[k] < piece_lists[k].size()) break;
      idx[k] = 0;
    }
    if (k == p) break;
  }
  return false;
}

}  // namespace

CoverageReport check_directional_openness(const OpennessQuery& q) {
  CoverageReport rep;
  if (norm_of(q.u, q.norm) < kTol) throw Error("openness: zero direction");
  long budget = kComboCap;
  for (double rho : q.rho_grid) {
    double seg = q.modulus * rho;
    double x_rad = q.x_radius_fixed.value_or(rho);
    std::vector<double> ts;
    ts.push_back(0.0);
    for (int j = 1; j < q.t_samples; ++j)
      ts.push_back(seg * static_cast<double>(j) / q.t_samples);
    ts.push_back(seg * (1.0 - 1e-9));  // exact open endpoint
    for (double t : ts) {
      Vec probe = q.y_bar - t * q.u;
      ++rep.probes;
      if (!probe_covered(q.map, probe, q.x_bar, x_rad, q.norm, q.continuum_x, q.x_candidates,
                         budget)) {
        rep.certified = false;
        rep.failed_rho = rho;
        rep.uncovered_probe = probe;
        return rep;
      }
    }
  }
  return rep;
}

bool h_sum_covers_probe(const Instance& inst, const std::vector<Vec>& x_candidates,
                        const Vec& probe) {
  // membership probe in (F + K + Delta_Omega)(candidates): direct scan for
  // tabulated objectives, per-slice LP for polyhedral ones
  for (const Vec& x : x_candidates) {
    if (!inst.omega.contains(x, inst.tol)) continue;
    const PolyCone& cone = cone_at(inst.cone_field, x, inst.tol);
    if (inst.objective.kind == GraphKind::PolyGraph) {
      const int dx = inst.dim_x, dy = inst.dim_y;
      for (const auto& piece : inst.objective.pieces) {
        lp::Problem prob(dy);
        bool row_ok = true;
        for (const auto& h : piece.halfspaces) {
          Vec ny = h.normal.tail(dy);
          double rhs = h.offset - h.normal.head(dx).dot(x);
          if (ny.cwiseAbs().maxCoeff() <= 1e-13 && rhs < -inst.tol) {
            row_ok = false;
            break;
          }
          prob.add_ub(ny, rhs);
        }
        if (!row_ok) continue;
        for (const Vec& d : cone.dual) prob.add_ub(d, d.dot(probe));  // probe - y in cone
        if (lp::feasible(prob)) return true;
      }
    } else {
      std::vector<Vec> vals;
      if (inst.objective.kind == GraphKind::PwAffine) {
        bool covered_cell = false;
        for (const auto& cell : inst.objective.affine_cells)
          covered_cell = covered_cell || cell.region.contains(x, inst.tol);
        if (!covered_cell) continue;
        vals.push_back(inst.objective.value(x));
      } else {
        bool found = false;
        for (const auto& node : inst.objective.nodes) {
          if ((node.x - x).cwiseAbs().maxCoeff() <= inst.tol) {
            vals = node.values;
            found = true;
            break;
          }
        }
        if (!found) continue;
      }
      for (const Vec& y : vals) {
        if (cone_contains_dual(cone, Vec(probe - y), inst.tol)) return true;
      }
    }
  }
  return false;
}

IncompatReport incompatibility_check(const Instance& inst, const Vec& x_bar, const Vec& y_bar) {
  IncompatReport rep;
  auto common = common_cone(inst.cone_field, x_bar,
                            inst.epsilon == kInf ? 1e3 : inst.epsilon, inst.norm);
  rep.hypothesis_ok =
      !common.trivial && cone_contains_dual(common.cone, inst.k, inst.tol) &&
      norm_of(inst.k, inst.norm) > inst.tol;
  if (!rep.hypothesis_ok) throw HypothesisError("incompatibility: k not in the common cone");

  auto cert = certify_nondominated_K(inst, x_bar, y_bar);
  rep.nondominated = cert.verdict == Verdict::Certified;
  rep.delta_primes = {1.01 * inst.delta, 1.5 * inst.delta, 2.0 * inst.delta};
  if (!rep.nondominated) return rep;  // vacuous branch; contrapositive tested separately

  std::vector<Vec> candidates = ball_grid(inst, x_bar, inst.epsilon);
  for (double dp : rep.delta_primes) {
    bool all_covered = true;
    const int t_samples = 64;
    std::vector<double> ts;
    ts.push_back(0.0);
    for (int j = 1; j < t_samples; ++j) ts.push_back(dp * static_cast<double>(j) / t_samples);
    ts.push_back(dp * (1.0 - 1e-9));
    for (double t : ts) {
      if (!h_sum_covers_probe(inst, candidates, Vec(y_bar - t * inst.k))) {
        all_covered = false;
        break;
      }
    }
    rep.coverage_refuted.push_back(!all_covered);
    if (all_covered) rep.contradiction = true;
  }
  return rep;
}

namespace {

struct Face {
  int piece = 0;
  std::vector<int> rows;
  std::vector<Vec> normal_gens;
};

// Faces of the pieces that meet the given box, as activity-row subsets.
// Non-tight rows must be strictly slack somewhere on the face (margin LP);
// otherwise measure-zero slabs would admit spurious interior strata whose
// normal cone is too small.
std::vector<Face> faces_meeting_box(const std::vector<Polyhedron>& pieces,
                                    const Polyhedron& box, long cap) {
  std::vector<Face> out;
  long budget = cap;
  for (int pi = 0; pi < static_cast<int>(pieces.size()); ++pi) {
    const Polyhedron& piece = pieces[pi];
    const int m = static_cast<int>(piece.halfspaces.size());
    if (m > 14) throw CapExceeded("face enumeration: too many rows");
    for (std::size_t mask = 0; mask < (1ULL << m); ++mask) {
      if (--budget < 0) throw CapExceeded("face enumeration cap");
      const int d = piece.dim;
      lp::Problem prob(d + 1);  // point plus the slack margin
      Vec c = Vec::Zero(d + 1);
      c[d] = -1.0;
      prob.c = c;
      std::vector<int> rows;
      for (int r = 0; r < m; ++r) {
        Vec row = Vec::Zero(d + 1);
        row.head(d) = piece.halfspaces[r].normal;
        if (mask & (1ULL << r)) {
          prob.add_eq(row, piece.halfspaces[r].offset);
          rows.push_back(r);
        } else {
          row[d] = 1.0;
          prob.add_ub(row, piece.halfspaces[r].offset);
        }
      }
      for (const auto& h : box.halfspaces) {
        Vec row = Vec::Zero(d + 1);
        row.head(d) = h.normal;
        prob.add_ub(row, h.offset);
      }
      Vec em = Vec::Zero(d + 1);
      em[d] = 1.0;
      prob.add_ub(em, 1.0);
      prob.add_ub(Vec(-em), 0.0);
      auto sol = lp::solve(prob);
      if (sol.status != lp::Status::Optimal) continue;
      if (rows.size() < static_cast<std::size_t>(m) && -sol.objective <= 1e-9) continue;
      Face f;
      f.piece = pi;
      f.rows = rows;
      for (int r : rows) f.normal_gens.push_back(piece.halfspaces[r].normal);
      out.push_back(std::move(f));
    }
  }
  // richer normal cones first: deeper faces carry more multipliers
  std::sort(out.begin(), out.end(),
            [](const Face& a, const Face& b) { return a.rows.size() > b.rows.size(); });
  return out;
}

Vec face_anchor(const Polyhedron& piece, const Face& face, const Polyhedron& box) {
  // maximize the margin on the non-tight rows; any feasible point is a valid
  // anchor (its normal cone contains the face cone)
  const int d = piece.dim;
  lp::Problem prob(d + 1);
  Vec c = Vec::Zero(d + 1);
  c[d] = -1.0;
  prob.c = c;
  const int m = static_cast<int>(piece.halfspaces.size());
  for (int r = 0; r < m; ++r) {
    Vec row = Vec::Zero(d + 1);
    row.head(d) = piece.halfspaces[r].normal;
    if (std::find(face.rows.begin(), face.rows.end(), r) != face.rows.end()) {
      prob.add_eq(row, piece.halfspaces[r].offset);
    } else {
      row[d] = 1.0;
      prob.add_ub(row, piece.halfspaces[r].offset);
    }
  }
  for (const auto& h : box.halfspaces) {
    Vec row = Vec::Zero(d + 1);
    row.head(d) = h.normal;
    prob.add_ub(row, h.offset);
  }
  Vec em = Vec::Zero(d + 1);
  em[d] = 1.0;
  prob.add_ub(em, 1.0);
  prob.add_ub(Vec(-em), 0.0);
  auto r = lp::solve(prob);
  if (r.status != lp::Status::Optimal) throw Error("face_anchor: infeasible face");
  return r.x.head(d);
}

}  // namespace

InjectivityResult injectivity_constant(const InjectivityQuery& q) {
  InjectivityResult res;
  const int p = static_cast<int>(q.parts.size());
  if (p < 1 || p > 3) throw Error("injectivity: 1..3 parts supported");
  const int dx = q.parts.front().dim_x;
  const int dy = q.parts.front().dim_y;

  // collect faces of every part inside the r-box around its center
  std::vector<std::vector<Face>> faces(p);
  std::vector<std::vector<Polyhedron>> pieces(p);
  for (int i = 0; i < p; ++i) {
    pieces[i] = q.parts[i].graph_pieces();
    Vec center(dx + dy);
    center.head(dx) = q.x_bar;
    center.tail(dy) = q.y_centers[i];
    Polyhedron box = Polyhedron::ball(center, q.r, Norm::Max);
    faces[i] = faces_meeting_box(pieces[i], box, kComboCap);
  }

  const std::vector<Vec>* ycone = q.y_star_cone ? &q.y_star_cone->primal : nullptr;
  const int n_ynu = ycone ? static_cast<int>(ycone->size()) : 0;

  auto inf_for_c = [&](double cval) -> double {
    double best = kInf;
    std::vector<std::size_t> ix(p, 0);
    long combos = 0;
    for (;;) {
      if (++combos > kComboCap) throw CapExceeded("injectivity branch cap");
      // vars: lambda_i blocks, y* (dy) or nu (n_ynu), z_i blocks for coupled
      // parts (dy each, free), t
      std::vector<int> lam_off(p), lam_cnt(p);
      int off = 0;
      for (int i = 0; i < p; ++i) {
        lam_off[i] = off;
        lam_cnt[i] = static_cast<int>(faces[i][ix[i]].normal_gens.size());
        off += lam_cnt[i];
      }
      int y_off = off;
      off += ycone ? n_ynu : dy;
      std::vector<int> z_off(p, -1);
      for (int i = 0; i < p; ++i) {
        if (i != q.uncoupled_part) {
          z_off[i] = off;
          off += dy;
        }
      }
      int t_off = off;
      off += 1;
      // l1 slack blocks for coupled z when the norm demands it
      std::vector<int> zs_off(p, -1);
      if (q.norm == Norm::Max) {
        for (int i = 0; i < p; ++i) {
          if (i != q.uncoupled_part) {
            zs_off[i] = off;
            off += dy;
          }
        }
      }
      lp::Problem prob(off);
      Vec c = Vec::Zero(off);
      c[t_off] = 1.0;
      prob.c = c;
      auto y_star_row = [&](int coord) {
        Vec row = Vec::Zero(off);
        if (ycone) {
          for (int j = 0; j < n_ynu; ++j) row[y_off + j] = (*ycone)[j][coord];
        } else {
          row[y_off + coord] = 1.0;
        }
        return row;
      };
      // lambda >= 0 and nu >= 0
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < lam_cnt[i]; ++j) {
          Vec e = Vec::Zero(off);
          e[lam_off[i] + j] = -1.0;
          prob.add_ub(e, 0.0);
        }
      }
      if (ycone) {
        for (int j = 0; j < n_ynu; ++j) {
          Vec e = Vec::Zero(off);
          e[y_off + j] = -1.0;
          prob.add_ub(e, 0.0);
        }
      }
      // <y*, u> = 1
      {
        Vec row = Vec::Zero(off);
        for (int r = 0; r < dy; ++r) {
          Vec yr = y_star_row(r);
          row += q.u[r] * yr;
        }
        prob.add_eq(row, 1.0);
      }
      // per part: sum lambda_j (normal_y)_j = -(w_i) with w = y* or y* - z_i
      for (int i = 0; i < p; ++i) {
        const auto& gens = faces[i][ix[i]].normal_gens;
        for (int r = 0; r < dy; ++r) {
          Vec row = Vec::Zero(off);
          for (int j = 0; j < lam_cnt[i]; ++j) row[lam_off[i] + j] = gens[j][dx + r];
          Vec yr = y_star_row(r);
          row += yr;
          if (z_off[i] >= 0) row[z_off[i] + r] -= 1.0;
          prob.add_eq(row, 0.0);
        }
      }
      // z-ball: dual of max norm is l1 (exact); otherwise box relaxation
      for (int i = 0; i < p; ++i) {
        if (z_off[i] < 0) continue;
        if (q.norm == Norm::Max) {
          Vec sum_row = Vec::Zero(off);
          for (int r = 0; r < dy; ++r) {
            Vec row = Vec::Zero(off);
            row[z_off[i] + r] = 1.0;
            row[zs_off[i] + r] = -1.0;
            prob.add_ub(row, 0.0);
            row[z_off[i] + r] = -1.0;
            prob.add_ub(row, 0.0);
            sum_row[zs_off[i] + r] = 1.0;
          }
          prob.add_ub(sum_row, 2.0 * cval);
        } else {
          for (int r = 0; r < dy; ++r) {
            Vec row = Vec::Zero(off);
            row[z_off[i] + r] = 1.0;
            prob.add_ub(row, 2.0 * cval);
            row[z_off[i] + r] = -1.0;
            prob.add_ub(row, 2.0 * cval);
          }
        }
      }
      // -t <= (sum_i x_i*)_j <= t
      for (int r = 0; r < dx; ++r) {
        Vec sum_row = Vec::Zero(off);
        for (int i = 0; i < p; ++i) {
          const auto& gens = faces[i][ix[i]].normal_gens;
          for (int j = 0; j < lam_cnt[i]; ++j) sum_row[lam_off[i] + j] = gens[j][r];
        }
        Vec upper = sum_row;
        upper[t_off] = -1.0;
        prob.add_ub(upper, 0.0);
        Vec lower = -sum_row;
        lower[t_off] = -1.0;
        prob.add_ub(lower, 0.0);
      }
      {
        Vec e = Vec::Zero(off);
        e[t_off] = -1.0;
        prob.add_ub(e, 0.0);
      }
      auto r = lp::solve(prob);
      if (r.status == lp::Status::Optimal) best = std::min(best, r.objective);
      if (best <= 1e-12) return 0.0;

      int k = 0;
      for (; k < p; ++k) {
        if (++ix[k] < faces[k].size()) break;
        ix[k] = 0;
      }
      if (k == p) break;
    }
    res.branches = combos;
    return best;
  };

  double c = q.c_cap;
  const double damping = 0.5;
  for (int it = 0; it < 100; ++it) {
    ++res.iterations;
    double inf = std::min(q.c_cap, inf_for_c(c));
    double next = (1.0 - damping) * c + damping * inf;
    if (std::abs(next - c) <= 1e-6) {
      c = next;
      res.converged = true;
      break;
    }
    c = next;
  }
  if (!res.converged) {
    // the damped iteration oscillates when the coupling slope exceeds one;
    // inf(c) is nonincreasing in c, so the fixed point is unique and
    // bracketed bisection on inf(c) - c always resolves it
    double lo = 0.0, hi = q.c_cap;
    if (std::min(q.c_cap, inf_for_c(0.0)) <= 1e-12) {
      c = 0.0;
      res.converged = true;
    } else {
      for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
        ++res.iterations;
        double mid = 0.5 * (lo + hi);
        if (std::min(q.c_cap, inf_for_c(mid)) >= mid)
          lo = mid;
        else
          hi = mid;
      }
      c = lo;
      res.converged = true;
    }
  }
  // final validation: the returned c must satisfy c <= inf at its own ball
  double final_inf = std::min(q.c_cap, inf_for_c(c));
  if (final_inf + 1e-5 < c) {
    res.converged = false;
    c = std::max(0.0, final_inf);
  }
  res.c = c;
  return res;
}

TransversalityReport transversality_check(const GraphMap& f, const ConeField& vds_field,
                                          const Polyhedron& omega, const Vec& x_bar,
                                          const Vec& y_bar, VdsKind kind) {
  TransversalityReport rep;
  const int dy = f.dim_y;
  Vec zero_y = Vec::Zero(dy);
  if (kind == VdsKind::K) {
    GraphMap kg = cone_field_to_graph(vds_field, f.dim_x);
    auto br = graph_coderiv_branches(kg, x_bar, zero_y, NormalKind::Limiting);
    rep.vds_cond = coderiv_zero_slice_trivial(br);
  } else {
    GraphMap qg = cone_field_to_graph(vds_field, dy);
    auto br = graph_coderiv_branches(qg, y_bar, zero_y, NormalKind::Limiting);
    rep.vds_cond = coderiv_zero_slice_trivial(br);
  }
  auto fbr = graph_coderiv_branches(f, x_bar, y_bar, NormalKind::Limiting);
  std::vector<Vec> neg_normals;
  for (const Vec& n : active_normals(omega, x_bar, 1e-7)) neg_normals.push_back(Vec(-n));
  rep.f_cond = !coderiv_zero_slice_meets_cone(fbr, neg_normals);
  return rep;
}

bool aubin_check(const GraphMap& g, const Vec& x, const Vec& y) {
  auto br = graph_coderiv_branches(g, x, y, NormalKind::Limiting);
  if (!br.defined) throw Error("aubin_check: point off the graph");
  return coderiv_zero_slice_trivial(br);
}

OpennessHarnessReport sum_openness_harness(const Instance& inst, const Vec& x_bar, const Vec& y_bar,
                                double r, double a_frac, int rho_count) {
  OpennessHarnessReport rep;
  if (inst.vds_kind != VdsKind::K) throw Error("sum_openness_harness: K-instances only");

  auto tv = transversality_check(inst.objective, inst.cone_field, inst.omega, x_bar, y_bar,
                                 VdsKind::K);
  if (!tv.ok()) {
    rep.failure = "transversality conditions fail";
    return rep;
  }
  auto common = common_cone(inst.cone_field, x_bar, 2.0 * r, inst.norm);
  if (common.trivial || !cone_contains_dual(common.cone, inst.k, inst.tol) ||
      !is_unit(inst.k, inst.norm, 1e-9)) {
    rep.failure = "k not a unit vector of the common cone";
    return rep;
  }
  PolyCone p_plus = dual_cone(common.cone);

  InjectivityQuery iq;
  iq.parts = {cone_field_to_graph(inst.cone_field, inst.dim_x), inst.objective,
              indicator_graph(inst.omega, inst.dim_y)};
  iq.x_bar = x_bar;
  iq.y_centers = {Vec::Zero(inst.dim_y), y_bar, Vec::Zero(inst.dim_y)};
  iq.r = r;
  iq.u = inst.k;
  iq.uncoupled_part = 0;  // the vds part pairs with y* in P+
  iq.y_star_cone = p_plus;
  iq.norm = inst.norm;
  auto inj = injectivity_constant(iq);
  rep.c = inj.c;
  if (!inj.converged || inj.c <= 1e-9) {
    rep.failure = "injectivity constant estimation failed";
    return rep;
  }
  double a = a_frac * inj.c;
  if (!(a > 0 && a < inj.c)) {
    rep.failure = "modulus must lie in (0, c)";
    return rep;
  }
  rep.theta = constants::theta_bound(r, inj.c, a);
  rep.hypotheses_ok = true;

  SumMap map;
  map.dim_x = inst.dim_x;
  map.dim_y = inst.dim_y;
  map.parts = iq.parts;
  for (int i = 1; i <= rho_count; ++i) {
    double rho = rep.theta * static_cast<double>(i) / (rho_count + 1);
    rep.rho_grid.push_back(rho);
    OpennessQuery q;
    q.map = map;
    q.x_bar = x_bar;
    q.y_bar = y_bar;
    q.u = inst.k;
    q.modulus = a;
    q.rho_grid = {rho};
    q.norm = inst.norm;
    q.continuum_x = inst.norm != Norm::Euclidean;
    if (!q.continuum_x) q.x_candidates = ball_grid(inst, x_bar, rho);
    auto cov = check_directional_openness(q);
    rep.covered.push_back(cov.certified);
  }
  rep.all_covered =
      std::all_of(rep.covered.begin(), rep.covered.end(), [](bool b) { return b; });
  return rep;
}

namespace {

struct SearchSpaces {
  std::vector<Polyhedron> f_pieces, vds_pieces;
  std::vector<Face> f_faces, vds_faces, omega_faces;
  Polyhedron omega_box;  // omega faces live in X
};

// Shared face-enumeration setup for the witness searches.
SearchSpaces build_spaces(const Instance& inst, const GraphMap& vds_graph, const Vec& x_bar,
                          const Vec& y_bar, const Vec& vds_center_x, double radius) {
  SearchSpaces s;
  s.f_pieces = inst.objective.graph_pieces();
  s.vds_pieces = vds_graph.graph_pieces();
  Vec fc(inst.dim_x + inst.dim_y);
  fc.head(inst.dim_x) = x_bar;
  fc.tail(inst.dim_y) = y_bar;
  s.f_faces = faces_meeting_box(s.f_pieces, Polyhedron::ball(fc, radius, Norm::Max), kComboCap);
  Vec kc(vds_graph.dim_x + vds_graph.dim_y);
  kc.head(vds_graph.dim_x) = vds_center_x;
  kc.tail(vds_graph.dim_y) = Vec::Zero(vds_graph.dim_y);
  s.vds_faces =
      faces_meeting_box(s.vds_pieces, Polyhedron::ball(kc, radius, Norm::Max), kComboCap);
  s.omega_box = Polyhedron::ball(x_bar, radius, Norm::Max);
  s.omega_faces = faces_meeting_box({inst.omega}, s.omega_box, kComboCap);
  return s;
}

void append_l1_bounded(lp::Problem& prob, int vec_off, int slack_off, int dim, double bound) {
  Vec sum_row = Vec::Zero(prob.n);
  for (int r = 0; r < dim; ++r) {
    Vec row = Vec::Zero(prob.n);
    row[vec_off + r] = 1.0;
    row[slack_off + r] = -1.0;
    prob.add_ub(row, 0.0);
    row[vec_off + r] = -1.0;
    prob.add_ub(row, 0.0);
    sum_row[slack_off + r] = 1.0;
  }
  prob.add_ub(sum_row, bound);
}

}  // namespace

NcReport necessary_cond_K(const Instance& inst, const Vec& x_bar, const Vec& y_bar) {
  NcReport rep;
  if (inst.norm != Norm::Max)
    throw Error("necessary_cond_K: max-norm instances only (balls must be polyhedral)");
  inst.check_basic();

  // (a) Aubin conditions via the Mordukhovich criterion
  GraphMap kg = cone_field_to_graph(inst.cone_field, inst.dim_x);
  if (!aubin_check(inst.objective, x_bar, y_bar)) rep.failures.push_back("aubin(F)");
  if (!aubin_check(kg, x_bar, Vec::Zero(inst.dim_y))) rep.failures.push_back("aubin(K)");
  // (b) constants regime
  if (constants::classify(inst.epsilon, inst.delta) == constants::Regime::Infeasible)
    rep.failures.push_back("constants regime");
  // (c) interiority of k in the common cone over the epsilon-ball
  auto common = common_cone(inst.cone_field, x_bar,
                            inst.epsilon == kInf ? 1e3 : inst.epsilon, inst.norm);
  auto inter = interiority(inst.k, common.cone);
  if (!inter.holds || !is_unit(inst.k, inst.norm, 1e-9))
    rep.failures.push_back("interiority of k");
  // (d) approximate solution certificate
  auto cert = certify_nondominated_K(inst, x_bar, y_bar);
  if (cert.verdict != Verdict::Certified) rep.failures.push_back("nondominatedness");
  rep.hypotheses_ok = rep.failures.empty();
  if (!rep.hypotheses_ok) return rep;

  const double big = constants::phi_inv(inst.delta);
  PolyCone p_plus = dual_cone(common.cone);
  auto spaces = build_spaces(inst, kg, x_bar, y_bar, x_bar, big);

  const int dx = inst.dim_x, dy = inst.dim_y;
  const int n_nu = static_cast<int>(p_plus.primal.size());
  for (const Face& ff : spaces.f_faces) {
    for (const Face& kf : spaces.vds_faces) {
      for (const Face& of : spaces.omega_faces) {
        if (++rep.combos_tried > kComboCap) throw CapExceeded("witness search cap");
        const int nf = static_cast<int>(ff.normal_gens.size());
        const int nk = static_cast<int>(kf.normal_gens.size());
        const int no = static_cast<int>(of.normal_gens.size());
        // vars: nu (y*), z (dy) + z slack (dy), lamF (nf), lamK (nk),
        // mu (no), e (dx) + e slack (dx)
        int off = 0;
        int nu_off = off;
        off += n_nu;
        int z_off = off;
        off += dy;
        int zs_off = off;
        off += dy;
        int lf_off = off;
        off += nf;
        int lk_off = off;
        off += nk;
        int mu_off = off;
        off += no;
        int e_off = off;
        off += dx;
        int es_off = off;
        off += dx;
        lp::Problem prob(off);
        auto nonneg = [&](int start, int count) {
          for (int j = 0; j < count; ++j) {
            Vec e2 = Vec::Zero(off);
            e2[start + j] = -1.0;
            prob.add_ub(e2, 0.0);
          }
        };
        nonneg(nu_off, n_nu);
        nonneg(lf_off, nf);
        nonneg(lk_off, nk);
        nonneg(mu_off, no);
        append_l1_bounded(prob, z_off, zs_off, dy, 2.0 * big);
        append_l1_bounded(prob, e_off, es_off, dx, big);
        auto y_star_coef = [&](Vec& row, int coord, double scale) {
          for (int j = 0; j < n_nu; ++j) row[nu_off + j] += scale * p_plus.primal[j][coord];
        };
        // <y*, k> = 1
        {
          Vec row = Vec::Zero(off);
          for (int r = 0; r < dy; ++r) y_star_coef(row, r, inst.k[r]);
          prob.add_eq(row, 1.0);
        }
        // F face: sum lamF (n_y) = -(y* - z*)
        for (int r = 0; r < dy; ++r) {
          Vec row = Vec::Zero(off);
          for (int j = 0; j < nf; ++j) row[lf_off + j] = ff.normal_gens[j][dx + r];
          y_star_coef(row, r, 1.0);
          row[z_off + r] -= 1.0;
          prob.add_eq(row, 0.0);
        }
        // K face: sum lamK (n_y) = -y*
        for (int r = 0; r < dy; ++r) {
          Vec row = Vec::Zero(off);
          for (int j = 0; j < nk; ++j) row[lk_off + j] = kf.normal_gens[j][dx + r];
          y_star_coef(row, r, 1.0);
          prob.add_eq(row, 0.0);
        }
        // x1* + x2* + x3* + e = 0
        for (int r = 0; r < dx; ++r) {
          Vec row = Vec::Zero(off);
          for (int j = 0; j < nf; ++j) row[lf_off + j] += ff.normal_gens[j][r];
          for (int j = 0; j < nk; ++j) row[lk_off + j] += kf.normal_gens[j][r];
          for (int j = 0; j < no; ++j) row[mu_off + j] += of.normal_gens[j][r];
          row[e_off + r] += 1.0;
          prob.add_eq(row, 0.0);
        }
        auto sol = lp::solve(prob);
        if (sol.status != lp::Status::Optimal) continue;
        // assemble and re-validate the witness
        const Vec& z = sol.x;
        NcWitness w;
        w.y_star = Vec::Zero(dy);
        for (int j = 0; j < n_nu; ++j) w.y_star += z[nu_off + j] * p_plus.primal[j];
        w.z_star = z.segment(z_off, dy);
        w.xs1 = Vec::Zero(dx);
        for (int j = 0; j < nf; ++j) w.xs1 += z[lf_off + j] * ff.normal_gens[j].head(dx);
        w.xs2 = Vec::Zero(dx);
        for (int j = 0; j < nk; ++j) w.xs2 += z[lk_off + j] * kf.normal_gens[j].head(dx);
        w.xs3 = Vec::Zero(dx);
        for (int j = 0; j < no; ++j) w.xs3 += z[mu_off + j] * of.normal_gens[j];
        w.residual = z.segment(e_off, dx);
        Vec fa = face_anchor(spaces.f_pieces[ff.piece], ff,
                             Polyhedron::ball(
                                 [&] {
                                   Vec fc(dx + dy);
                                   fc.head(dx) = x_bar;
                                   fc.tail(dy) = y_bar;
                                   return fc;
                                 }(),
                                 big, Norm::Max));
        w.x1 = fa.head(dx);
        w.y1 = fa.tail(dy);
        Vec ka = face_anchor(spaces.vds_pieces[kf.piece], kf,
                             Polyhedron::ball(
                                 [&] {
                                   Vec kc(dx + dy);
                                   kc.head(dx) = x_bar;
                                   kc.tail(dy).setZero();
                                   return kc;
                                 }(),
                                 big, Norm::Max));
        w.x2 = ka.head(dx);
        w.y2 = ka.tail(dy);
        w.x3 = face_anchor(inst.omega, of, spaces.omega_box);

        bool valid = true;
        valid = valid && std::abs(w.y_star.dot(inst.k) - 1.0) <= 1e-7;
        valid = valid && cone_contains_dual(p_plus, w.y_star, 1e-7);
        valid = valid && w.z_star.lpNorm<1>() <= 2.0 * big + 1e-7;
        valid = valid && w.residual.lpNorm<1>() <= big + 1e-7;
        valid = valid && (w.xs1 + w.xs2 + w.xs3 + w.residual).cwiseAbs().maxCoeff() <= 1e-7;
        {
          auto fbr = graph_coderiv_branches(inst.objective, w.x1, w.y1, NormalKind::Limiting);
          valid = valid && coderiv_contains(fbr, Vec(w.y_star - w.z_star), w.xs1, 1e-6);
          auto kbr = graph_coderiv_branches(kg, w.x2, w.y2, NormalKind::Limiting);
          valid = valid && coderiv_contains(kbr, w.y_star, w.xs2, 1e-6);
          PolyCone omega_cone = PolyCone::from_primal(active_normals(inst.omega, w.x3, 1e-7),
                                                      dx);
          valid = valid && cone_contains_dual(omega_cone, w.xs3, 1e-6);
        }
        if (!valid) continue;
        rep.found = true;
        rep.revalidated = true;
        rep.witness = w;
        return rep;
      }
    }
  }
  return rep;
}

NcReport necessary_cond_Q(const Instance& inst, const Vec& x_bar, const Vec& y_bar) {
  NcReport rep;
  if (inst.norm != Norm::Max)
    throw Error("necessary_cond_Q: max-norm instances only (balls must be polyhedral)");
  inst.check_basic();
  if (inst.vds_kind != VdsKind::Q) throw Error("necessary_cond_Q: Q-instances only");

  GraphMap qg = cone_field_to_graph(inst.cone_field, inst.dim_y);
  if (!aubin_check(inst.objective, x_bar, y_bar)) rep.failures.push_back("aubin(F)");
  if (!aubin_check(qg, y_bar, Vec::Zero(inst.dim_y))) rep.failures.push_back("aubin(Q)");
  if (constants::classify(inst.epsilon, inst.delta) == constants::Regime::Infeasible)
    rep.failures.push_back("constants regime");
  auto common = common_cone(inst.cone_field, y_bar,
                            inst.epsilon == kInf ? 1e3 : inst.epsilon, inst.norm);
  auto inter = interiority(inst.k, common.cone);
  if (!inter.holds || !is_unit(inst.k, inst.norm, 1e-9))
    rep.failures.push_back("interiority of q");
  auto cert = certify_nondominated_Q(inst, x_bar, y_bar);
  if (cert.verdict != Verdict::Certified) rep.failures.push_back("nondominatedness");
  rep.hypotheses_ok = rep.failures.empty();
  if (!rep.hypotheses_ok) return rep;

  const double big = constants::phi_inv(inst.delta);
  PolyCone p_plus = dual_cone(common.cone);
  auto spaces = build_spaces(inst, qg, x_bar, y_bar, y_bar, big);

  const int dx = inst.dim_x, dy = inst.dim_y;
  const int n_nu = static_cast<int>(p_plus.primal.size());
  for (const Face& ff : spaces.f_faces) {
    for (const Face& qf : spaces.vds_faces) {
      for (const Face& of : spaces.omega_faces) {
        if (++rep.combos_tried > kComboCap) throw CapExceeded("witness search cap");
        const int nf = static_cast<int>(ff.normal_gens.size());
        const int nq = static_cast<int>(qf.normal_gens.size());
        const int no = static_cast<int>(of.normal_gens.size());
        // vars: nu, z (dy)+slack, w (dy)+slack for the y1* ball, lamF, lamQ,
        // mu, e (dx)+slack
        int off = 0;
        int nu_off = off;
        off += n_nu;
        int z_off = off;
        off += dy;
        int zs_off = off;
        off += dy;
        int w_off = off;
        off += dy;
        int ws_off = off;
        off += dy;
        int lf_off = off;
        off += nf;
        int lq_off = off;
        off += nq;
        int mu_off = off;
        off += no;
        int e_off = off;
        off += dx;
        int es_off = off;
        off += dx;
        lp::Problem prob(off);
        auto nonneg = [&](int start, int count) {
          for (int j = 0; j < count; ++j) {
            Vec e2 = Vec::Zero(off);
            e2[start + j] = -1.0;
            prob.add_ub(e2, 0.0);
          }
        };
        nonneg(nu_off, n_nu);
        nonneg(lf_off, nf);
        nonneg(lq_off, nq);
        nonneg(mu_off, no);
        append_l1_bounded(prob, z_off, zs_off, dy, 2.0 * big);
        append_l1_bounded(prob, w_off, ws_off, dy, big);
        append_l1_bounded(prob, e_off, es_off, dx, big);
        auto y_star_coef = [&](Vec& row, int coord, double scale) {
          for (int j = 0; j < n_nu; ++j) row[nu_off + j] += scale * p_plus.primal[j][coord];
        };
        {
          Vec row = Vec::Zero(off);
          for (int r = 0; r < dy; ++r) y_star_coef(row, r, inst.k[r]);
          prob.add_eq(row, 1.0);
        }
        // Q face: sum lamQ (n_z) = -y*  (second block of the Q graph)
        for (int r = 0; r < dy; ++r) {
          Vec row = Vec::Zero(off);
          for (int j = 0; j < nq; ++j) row[lq_off + j] = qf.normal_gens[j][dy + r];
          y_star_coef(row, r, 1.0);
          prob.add_eq(row, 0.0);
        }
        // F face: sum lamF (n_y) = -(y* + y1* + z*), y1* = q* + w where
        // q* = sum lamQ (n_y-first-block)
        for (int r = 0; r < dy; ++r) {
          Vec row = Vec::Zero(off);
          for (int j = 0; j < nf; ++j) row[lf_off + j] = ff.normal_gens[j][dx + r];
          y_star_coef(row, r, 1.0);
          for (int j = 0; j < nq; ++j) row[lq_off + j] += qf.normal_gens[j][r];
          row[w_off + r] += 1.0;
          row[z_off + r] += 1.0;
          prob.add_eq(row, 0.0);
        }
        // x1* + x3* + e = 0
        for (int r = 0; r < dx; ++r) {
          Vec row = Vec::Zero(off);
          for (int j = 0; j < nf; ++j) row[lf_off + j] += ff.normal_gens[j][r];
          for (int j = 0; j < no; ++j) row[mu_off + j] += of.normal_gens[j][r];
          row[e_off + r] += 1.0;
          prob.add_eq(row, 0.0);
        }
        auto sol = lp::solve(prob);
        if (sol.status != lp::Status::Optimal) continue;
        const Vec& z = sol.x;
        NcWitness w;
        w.y_star = Vec::Zero(dy);
        for (int j = 0; j < n_nu; ++j) w.y_star += z[nu_off + j] * p_plus.primal[j];
        w.z_star = z.segment(z_off, dy);
        w.xs1 = Vec::Zero(dx);
        for (int j = 0; j < nf; ++j) w.xs1 += z[lf_off + j] * ff.normal_gens[j].head(dx);
        Vec q_star = Vec::Zero(dy);
        for (int j = 0; j < nq; ++j) q_star += z[lq_off + j] * qf.normal_gens[j].head(dy);
        w.y1_star = q_star + z.segment(w_off, dy);
        w.xs3 = Vec::Zero(dx);
        for (int j = 0; j < no; ++j) w.xs3 += z[mu_off + j] * of.normal_gens[j];
        w.residual = z.segment(e_off, dx);
        Vec fa = face_anchor(spaces.f_pieces[ff.piece], ff,
                             Polyhedron::ball(
                                 [&] {
                                   Vec fc(dx + dy);
                                   fc.head(dx) = x_bar;
                                   fc.tail(dy) = y_bar;
                                   return fc;
                                 }(),
                                 big, Norm::Max));
        w.x1 = fa.head(dx);
        w.y1 = fa.tail(dy);
        Vec qa = face_anchor(spaces.vds_pieces[qf.piece], qf,
                             Polyhedron::ball(
                                 [&] {
                                   Vec qc(2 * dy);
                                   qc.head(dy) = y_bar;
                                   qc.tail(dy).setZero();
                                   return qc;
                                 }(),
                                 big, Norm::Max));
        w.x2 = qa.head(dy);  // y2 position in Y
        w.y2 = qa.tail(dy);  // z2 value
        w.x3 = face_anchor(inst.omega, of, spaces.omega_box);

        bool valid = true;
        valid = valid && std::abs(w.y_star.dot(inst.k) - 1.0) <= 1e-7;
        valid = valid && cone_contains_dual(p_plus, w.y_star, 1e-7);
        valid = valid && w.z_star.lpNorm<1>() <= 2.0 * big + 1e-7;
        valid = valid && w.residual.lpNorm<1>() <= big + 1e-7;
        valid = valid && (w.xs1 + w.xs3 + w.residual).cwiseAbs().maxCoeff() <= 1e-7;
        {
          auto fbr = graph_coderiv_branches(inst.objective, w.x1, w.y1, NormalKind::Limiting);
          valid = valid &&
                  coderiv_contains(fbr, Vec(w.y_star + w.y1_star + w.z_star), w.xs1, 1e-6);
          auto qbr = graph_coderiv_branches(qg, w.x2, w.y2, NormalKind::Frechet);
          valid = valid && coderiv_contains(qbr, w.y_star, q_star, 1e-6);
          valid = valid && (w.y1_star - q_star).lpNorm<1>() <= big + 1e-7;
          PolyCone omega_cone = PolyCone::from_primal(active_normals(inst.omega, w.x3, 1e-7),
                                                      dx);
          valid = valid && cone_contains_dual(omega_cone, w.xs3, 1e-6);
        }
        if (!valid) continue;
        rep.found = true;
        rep.revalidated = true;
        rep.witness = w;
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace vardom
