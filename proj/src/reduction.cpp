#include "vardom/reduction.hpp"

namespace vardom {

GraphMap lift_objective_graph(const GraphMap& f) {
  const int dx = f.dim_x, dy = f.dim_y;
  std::vector<Polyhedron> out;
  for (const Polyhedron& piece : f.graph_pieces()) {
    Polyhedron lifted(dx + dy + dy);
    for (const auto& h : piece.halfspaces) {
      Vec n = Vec::Zero(lifted.dim);
      n.head(dx + dy) = h.normal;
      lifted.add(n, h.offset);
    }
    for (int r = 0; r < dy; ++r) {
      Vec n = Vec::Zero(lifted.dim);
      n[dx + r] = -1.0;
      n[dx + dy + r] = 1.0;  // z = y
      lifted.add_eq(n, 0.0);
    }
    out.push_back(std::move(lifted));
  }
  return GraphMap::poly(std::move(out), dx + dy, dy);
}

GraphMap lift_vds_graph(const ConeField& q_field, int dim_x) {
  GraphMap q_graph = cone_field_to_graph(q_field, q_field.domain_dim);
  const int dy = q_field.value_dim;
  std::vector<Polyhedron> out;
  for (const Polyhedron& piece : q_graph.graph_pieces()) {
    Polyhedron lifted(dim_x + dy + dy);
    for (const auto& h : piece.halfspaces) {
      Vec n = Vec::Zero(lifted.dim);
      n.tail(dy + dy) = h.normal;
      lifted.add(n, h.offset);
    }
    out.push_back(std::move(lifted));
  }
  return GraphMap::poly(std::move(out), dim_x + dy, dy);
}

LiftedInstance lift(const Instance& q_inst, const Vec& x_bar, const Vec& y_bar) {
  if (q_inst.vds_kind != VdsKind::Q) throw Error("lift: Q-instances only");
  if (q_inst.objective.kind != GraphKind::FiniteGraph &&
      q_inst.objective.kind != GraphKind::SingleValued)
    throw Error("lift: finite-graph objectives only");
  LiftedInstance out;
  out.orig_dim_x = q_inst.dim_x;
  out.orig_dim_y = q_inst.dim_y;
  const int dx = q_inst.dim_x, dy = q_inst.dim_y;

  // truncation box: data extent plus twice the data diameter
  Vec lo = y_bar, hi = y_bar;
  for (const auto& node : q_inst.objective.nodes) {
    for (const Vec& v : node.values) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  double diam = std::max(1e-3, (hi - lo).cwiseAbs().maxCoeff());
  out.y_box_lo = Vec(lo.array() - 2.0 * diam);
  out.y_box_hi = Vec(hi.array() + 2.0 * diam);

  Instance& L = out.inst;
  L.dim_x = dx + dy;
  L.dim_y = dy;
  L.norm = q_inst.norm;
  L.vds_kind = VdsKind::K;
  L.k = q_inst.k;
  L.delta = q_inst.delta;
  L.epsilon = kInf;  // the (eps, +inf) product ball moves into omega
  L.tol = q_inst.tol;

  // omega = (Omega cap open eps-ball around x_bar) x Y-box
  Polyhedron omega_x = q_inst.omega;
  if (q_inst.epsilon < kInf) {
    Polyhedron ball = Polyhedron::ball(
        x_bar, q_inst.epsilon * (1.0 - 1e-9),
        q_inst.norm == Norm::Euclidean ? Norm::Max : q_inst.norm);
    // euclidean instances keep the grid-side strictness; the box is only a
    // carrier for the polyhedral omega
    for (const auto& h : ball.halfspaces) omega_x.add(h.normal, h.offset);
  }
  L.omega = omega_x.product(Polyhedron::box(out.y_box_lo, out.y_box_hi));

  std::vector<FiniteGraphNode> nodes;
  for (const auto& node : q_inst.objective.nodes) {
    if (q_inst.epsilon < kInf &&
        norm_of(Vec(node.x - x_bar), q_inst.norm) >= q_inst.epsilon - q_inst.tol)
      continue;  // outside the x-ball: unreachable in the lifted scan too
    if (!q_inst.omega.contains(node.x, q_inst.tol)) continue;
    for (const Vec& v : node.values) {
      Vec xy(dx + dy);
      xy.head(dx) = node.x;
      xy.tail(dy) = v;
      nodes.push_back({xy, {v}});
      L.omega_grid.push_back(xy);
    }
  }
  // the candidate itself must be present even at the ball boundary
  {
    Vec xy(dx + dy);
    xy.head(dx) = x_bar;
    xy.tail(dy) = y_bar;
    bool present = false;
    for (const auto& n : nodes) present = present || (n.x - xy).cwiseAbs().maxCoeff() <= 1e-12;
    if (!present) {
      nodes.push_back({xy, {y_bar}});
      L.omega_grid.push_back(xy);
    }
  }
  L.objective = GraphMap::finite(std::move(nodes), dx + dy, dy);

  ConeField lifted_field;
  lifted_field.domain_dim = dx + dy;
  lifted_field.value_dim = dy;
  for (const auto& cell : q_inst.cone_field.cells) {
    Polyhedron region = Polyhedron::whole_space(dx).product(cell.region);
    lifted_field.cells.push_back({region, cell.cone});
  }
  if (q_inst.cone_field.default_cone) lifted_field.default_cone = q_inst.cone_field.default_cone;
  L.cone_field = lifted_field;

  out.lifted_x_bar = Vec(dx + dy);
  out.lifted_x_bar.head(dx) = x_bar;
  out.lifted_x_bar.tail(dy) = y_bar;
  return out;
}

bool LiftedInstance::truncation_witnessed(const Witness& w, double tol) const {
  Vec y = w.x.tail(orig_dim_y);
  for (int i = 0; i < orig_dim_y; ++i) {
    if (y[i] <= y_box_lo[i] + tol || y[i] >= y_box_hi[i] - tol) return true;
  }
  return false;
}

IdentityCheckReport coderivative_identities_check(const GraphMap& f, const ConeField& q_field,
                                                  const Vec& x, const Vec& y, SplitRng& rng,
                                                  int probes) {
  IdentityCheckReport rep;
  const int dx = f.dim_x, dy = f.dim_y;
  GraphMap lifted_f = lift_objective_graph(f);
  GraphMap lifted_k = lift_vds_graph(q_field, dx);
  GraphMap q_graph = cone_field_to_graph(q_field, q_field.domain_dim);

  Vec xyy(dx + dy + dy);
  xyy.head(dx) = x;
  xyy.segment(dx, dy) = y;
  xyy.tail(dy) = y;
  Vec xy(dx + dy);
  xy.head(dx) = x;
  xy.tail(dy) = y;

  SplitRng local = rng.fork(0x6c696674);
  for (int s = 0; s < probes; ++s) {
    for (NormalKind kind : {NormalKind::Frechet, NormalKind::Limiting}) {
      // F~ identity: (x*, y*) in D*F~(x,y,y)(z*) iff x* in D*F(x,y)(z* - y*)
      Vec xs = local.vector(dx, -1, 1);
      Vec ys = local.vector(dy, -1, 1);
      Vec zs = local.vector(dy, -1, 1);
      if (s % 2 == 0) {
        // seed from an actual normal-cone element so the true branch fires
        auto fb = graph_coderiv_branches(f, x, y, kind);
        if (!fb.cones.empty() && !fb.cones.front().primal.empty()) {
          Vec combo = Vec::Zero(dx + dy);
          for (const Vec& g : fb.cones.front().primal) combo += local.uniform(0, 1) * g;
          xs = combo.head(dx);
          Vec w = -combo.tail(dy);
          ys = local.vector(dy, -0.5, 0.5);
          zs = w + ys;  // so z* - y* = w
        }
      }
      auto lifted_branches = graph_coderiv_branches(lifted_f, xy, y, kind);
      Vec lifted_xs(dx + dy);
      lifted_xs.head(dx) = xs;
      lifted_xs.tail(dy) = ys;
      bool lhs = coderiv_contains(lifted_branches, zs, lifted_xs, 1e-7);
      auto orig_branches = graph_coderiv_branches(f, x, y, kind);
      bool rhs = coderiv_contains(orig_branches, Vec(zs - ys), xs, 1e-7);
      ++rep.probes;
      if (lhs != rhs) ++rep.mismatches;

      // K~ identity: (x*, y*) in D*K~(x,y,z)(z*) iff x* = 0 and
      // y* in D*Q(y, z)(z*); test at z = 0 in the cone graph
      Vec z0 = Vec::Zero(dy);
      auto lifted_k_branches = graph_coderiv_branches(lifted_k, xy, z0, kind);
      bool lhs_k = coderiv_contains(lifted_k_branches, zs, lifted_xs, 1e-7);
      auto q_branches = graph_coderiv_branches(q_graph, y, z0, kind);
      bool rhs_k = xs.cwiseAbs().maxCoeff() <= 1e-9 && coderiv_contains(q_branches, zs, ys, 1e-7);
      ++rep.probes;
      if (lhs_k != rhs_k) ++rep.mismatches;
    }
  }
  return rep;
}

AlliednessBridgeReport lifted_sets_alliedness_bridge(const GraphMap& f,
                                                     const ConeField& q_field,
                                                     const Polyhedron& omega, const Vec& x_bar,
                                                     const Vec& y_bar) {
  AlliednessBridgeReport rep;
  GraphMap q_graph = cone_field_to_graph(q_field, q_field.domain_dim);
  rep.q_cond = aubin_check(q_graph, y_bar, Vec::Zero(f.dim_y));
  auto fbr = graph_coderiv_branches(f, x_bar, y_bar, NormalKind::Limiting);
  std::vector<Vec> neg_normals;
  for (const Vec& n : active_normals(omega, x_bar, 1e-7)) neg_normals.push_back(Vec(-n));
  rep.f_cond = !coderiv_zero_slice_meets_cone(fbr, neg_normals);
  return rep;
}

OpennessHarnessReport lifted_openness_harness(const Instance& q_inst, const Vec& x_bar, const Vec& y_bar,
                                 double r, double a_frac, int rho_count) {
  OpennessHarnessReport rep;
  if (q_inst.vds_kind != VdsKind::Q) throw Error("lifted_openness_harness: Q-instances only");
  const int dx = q_inst.dim_x, dy = q_inst.dim_y;

  auto bridge = lifted_sets_alliedness_bridge(q_inst.objective, q_inst.cone_field,
                                              q_inst.omega, x_bar, y_bar);
  if (!bridge.ok()) {
    rep.failure = "lifted transversality conditions fail";
    return rep;
  }
  auto common = common_cone(q_inst.cone_field, y_bar, 2.0 * r, q_inst.norm);
  if (common.trivial || !cone_contains_dual(common.cone, q_inst.k, q_inst.tol) ||
      !is_unit(q_inst.k, q_inst.norm, 1e-9)) {
    rep.failure = "q not a unit vector of the common cone";
    return rep;
  }
  PolyCone p_plus = dual_cone(common.cone);

  GraphMap lifted_f = lift_objective_graph(q_inst.objective);
  GraphMap lifted_k = lift_vds_graph(q_inst.cone_field, dx);
  // indicator of Omega x Y over the lifted input space
  Polyhedron omega_lifted = q_inst.omega.product(Polyhedron::whole_space(dy));
  GraphMap lifted_ind = indicator_graph(omega_lifted, dy);

  Vec lifted_center(dx + dy);
  lifted_center.head(dx) = x_bar;
  lifted_center.tail(dy) = y_bar;

  InjectivityQuery iq;
  iq.parts = {lifted_k, lifted_f, lifted_ind};
  iq.x_bar = lifted_center;
  iq.y_centers = {Vec::Zero(dy), y_bar, Vec::Zero(dy)};
  iq.r = r;
  iq.u = q_inst.k;
  iq.uncoupled_part = 0;
  iq.y_star_cone = p_plus;
  iq.norm = q_inst.norm;
  auto inj = injectivity_constant(iq);
  rep.c = inj.c;
  if (!inj.converged || inj.c <= 1e-9) {
    rep.failure = "lifted injectivity constant estimation failed";
    return rep;
  }
  double a = a_frac * inj.c;
  rep.theta = constants::theta_bound(r, inj.c, a);
  rep.hypotheses_ok = true;

  SumMap map;
  map.dim_x = dx + dy;
  map.dim_y = dy;
  map.parts = iq.parts;
  for (int i = 1; i <= rho_count; ++i) {
    double rho = rep.theta * static_cast<double>(i) / (rho_count + 1);
    rep.rho_grid.push_back(rho);
    OpennessQuery q;
    q.map = map;
    q.x_bar = lifted_center;
    q.y_bar = y_bar;
    q.u = q_inst.k;
    q.modulus = a;
    q.rho_grid = {rho};
    q.norm = q_inst.norm;
    q.continuum_x = q_inst.norm != Norm::Euclidean;
    auto cov = check_directional_openness(q);
    rep.covered.push_back(cov.certified);
  }
  rep.all_covered =
      std::all_of(rep.covered.begin(), rep.covered.end(), [](bool b) { return b; });
  return rep;
}

}  // namespace vardom
