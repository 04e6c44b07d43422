#include "doctest.h"

#include "vardom/openness.hpp"

using namespace vardom;

namespace {

// identity objective on a max-norm instance; the objective's domain extends
// past omega so the graph maps keep the Aubin property on the feasible set
Instance identity_instance_1d(double eps, double delta, double lo = -2, double hi = 2) {
  Instance inst;
  inst.norm = Norm::Max;
  inst.dim_x = 1;
  inst.dim_y = 1;
  inst.omega = Polyhedron::box(make_vec({lo}), make_vec({hi}));
  for (double x = lo; x <= hi + 1e-12; x += 0.25) inst.omega_grid.push_back(make_vec({x}));
  inst.objective = GraphMap::identity(Polyhedron::box(make_vec({2 * lo}), make_vec({2 * hi})));
  inst.cone_field = ConeField::constant(PolyCone::orthant(1), 1);
  inst.k = make_vec({1});
  inst.epsilon = eps;
  inst.delta = delta;
  return inst;
}

Instance identity_instance_2d(double eps, double delta) {
  Instance inst;
  inst.norm = Norm::Max;
  inst.dim_x = 2;
  inst.dim_y = 2;
  inst.omega = Polyhedron::box(make_vec({-2, -2}), make_vec({2, 2}));
  for (double x = -2; x <= 2.0001; x += 0.5) {
    for (double y = -2; y <= 2.0001; y += 0.5) inst.omega_grid.push_back(make_vec({x, y}));
  }
  inst.objective = GraphMap::identity(Polyhedron::box(make_vec({-4, -4}), make_vec({4, 4})));
  inst.cone_field = ConeField::constant(PolyCone::orthant(2), 2);
  inst.k = make_vec({1, 1});  // max-norm unit, interior of the orthant
  inst.epsilon = eps;
  inst.delta = delta;
  return inst;
}

SumMap single_part_map(const GraphMap& g) {
  SumMap m;
  m.dim_x = g.dim_x;
  m.dim_y = g.dim_y;
  m.parts = {g};
  return m;
}

}  // namespace

TEST_CASE("identity map is directionally open at every modulus below one") {
  GraphMap ident = GraphMap::identity(Polyhedron::box(make_vec({-2}), make_vec({2})));
  OpennessQuery q;
  q.map = single_part_map(ident);
  q.x_bar = make_vec({0.0});
  q.y_bar = make_vec({0.0});
  q.u = make_vec({-1});
  q.modulus = 0.9;
  q.rho_grid = {0.1, 0.5, 1.0};
  q.norm = Norm::Max;
  auto rep = check_directional_openness(q);
  CHECK(rep.certified);
  CHECK(rep.probes > 100);
}

TEST_CASE("constant map is never directionally open") {
  // H == {c}: every probe off the center is uncovered
  std::vector<FiniteGraphNode> nodes;
  for (double x = -1; x <= 1.0001; x += 0.1) nodes.push_back({make_vec({x}), {make_vec({0.7})}});
  GraphMap constm = GraphMap::finite(nodes, 1, 1);
  OpennessQuery q;
  q.map = single_part_map(constm);
  q.x_bar = make_vec({0.0});
  q.y_bar = make_vec({0.7});
  q.u = make_vec({-1});
  q.modulus = 0.5;
  q.rho_grid = {0.4};
  q.norm = Norm::Max;
  auto rep = check_directional_openness(q);
  CHECK_FALSE(rep.certified);
  REQUIRE(rep.uncovered_probe.has_value());
  CHECK((*rep.uncovered_probe)[0] > 0.7);  // y_bar - t(-1) = y_bar + t
}

TEST_CASE("doubling map covers at modulus 1.5") {
  // H(x) = {2x} as a graph segment; probe needs x = probe/2 inside the ball
  Polyhedron seg(2);
  seg.add(make_vec({1, 0}), 2.0);
  seg.add(make_vec({-1, 0}), 2.0);
  seg.add_eq(make_vec({-2, 1}), 0.0);  // y = 2x
  GraphMap doubling = GraphMap::poly({seg}, 1, 1);
  OpennessQuery q;
  q.map = single_part_map(doubling);
  q.x_bar = make_vec({0.5});
  q.y_bar = make_vec({1.0});
  q.u = make_vec({-1});
  q.modulus = 1.5;
  q.rho_grid = {0.2, 0.6};
  q.norm = Norm::Max;
  auto rep = check_directional_openness(q);
  CHECK(rep.certified);
  // coverage oracle: 1.5 rho / 2 < rho
  CHECK(1.5 / 2.0 < 1.0);
}

TEST_CASE("coverage is monotone in the modulus") {
  GraphMap ident = GraphMap::identity(Polyhedron::box(make_vec({-2}), make_vec({2})));
  for (double a : {0.2, 0.5, 0.8}) {
    OpennessQuery q;
    q.map = single_part_map(ident);
    q.x_bar = make_vec({0.0});
    q.y_bar = make_vec({0.0});
    q.u = make_vec({1});
    q.modulus = a;
    q.rho_grid = {0.5};
    q.norm = Norm::Max;
    CHECK(check_directional_openness(q).certified);
  }
  // far above 1 the identity cannot cover
  OpennessQuery q;
  q.map = single_part_map(ident);
  q.x_bar = make_vec({0.0});
  q.y_bar = make_vec({0.0});
  q.u = make_vec({1});
  q.modulus = 3.0;
  q.rho_grid = {0.5};
  q.norm = Norm::Max;
  CHECK_FALSE(check_directional_openness(q).certified);
}

TEST_CASE("incompatibility: certified nondominated points are never covered") {
  Instance inst = identity_instance_1d(1.0, 0.3);
  // x_bar at the left edge of omega: nothing in the box improves past delta
  Vec xb = make_vec({-2.0});
  auto rep = incompatibility_check(inst, xb, xb);
  CHECK(rep.hypothesis_ok);
  CHECK(rep.nondominated);
  REQUIRE(rep.coverage_refuted.size() == 3);
  for (bool refuted : rep.coverage_refuted) CHECK(refuted);
  CHECK_FALSE(rep.contradiction);
}

TEST_CASE("incompatibility contrapositive: covered implies dominated") {
  Instance inst = identity_instance_1d(1.0, 0.1);
  // interior point: surjective identity covers and the certificate refutes
  Vec xb = make_vec({0.0});
  auto cert = certify_nondominated_K(inst, xb, xb);
  CHECK(cert.verdict == Verdict::Refuted);

  SumMap map;
  map.dim_x = 1;
  map.dim_y = 1;
  map.parts.push_back(inst.objective);
  map.parts.push_back(cone_field_to_graph(inst.cone_field, 1));
  map.parts.push_back(indicator_graph(inst.omega, 1));
  OpennessQuery q;
  q.map = map;
  q.x_bar = xb;
  q.y_bar = xb;
  q.u = inst.k;
  q.modulus = 2.0 * inst.delta;
  q.rho_grid = {1.0};
  q.x_radius_fixed = inst.epsilon;
  q.norm = Norm::Max;
  CHECK(check_directional_openness(q).certified);
}

TEST_CASE("incompatibility hypothesis failure when k leaves the common cone") {
  Instance inst = identity_instance_1d(1.0, 0.3);
  inst.k = make_vec({-1});
  CHECK_THROWS_AS((void)incompatibility_check(inst, make_vec({-2.0}), make_vec({-2.0})),
                  HypothesisError);
}

TEST_CASE("injectivity constant of the 1-D identity sum") {
  // parts K = R+, F = identity, Delta_Omega with Omega the whole line:
  // x1* = 0 (K part), x2* = y* - z*, x3* = 0; |y*| >= 1 from <y*,u> = 1,
  // so inf |x*|_sum = max(0, 1 - 2c): fixed point c = 1/3
  Instance inst = identity_instance_1d(1.0, 0.3, -3, 3);
  InjectivityQuery iq;
  iq.parts = {cone_field_to_graph(inst.cone_field, 1), inst.objective,
              indicator_graph(Polyhedron::whole_space(1), 1)};
  iq.x_bar = make_vec({0.0});
  iq.y_centers = {make_vec({0.0}), make_vec({0.0}), make_vec({0.0})};
  iq.r = 0.5;
  iq.u = make_vec({1});
  iq.uncoupled_part = 0;
  iq.y_star_cone = dual_cone(PolyCone::orthant(1));
  iq.norm = Norm::Max;
  auto res = injectivity_constant(iq);
  CHECK(res.converged);
  CHECK(res.c == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("injectivity collapses to zero for a horizontal graph part") {
  // a constant map contributes x* = 0 with unconstrained y*, so the whole
  // sum can vanish: c = 0
  Polyhedron flat(2);
  flat.add_eq(make_vec({0, 1}), 0.3);  // y = 0.3 for all x
  GraphMap constm = GraphMap::poly({flat}, 1, 1);
  InjectivityQuery iq;
  iq.parts = {constm};
  iq.x_bar = make_vec({0.0});
  iq.y_centers = {make_vec({0.3})};
  iq.r = 0.5;
  iq.u = make_vec({1});
  iq.uncoupled_part = 0;
  iq.norm = Norm::Max;
  auto res = injectivity_constant(iq);
  CHECK(res.c == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("indicator part of the whole space contributes nothing") {
  GraphMap ident = GraphMap::identity(Polyhedron::box(make_vec({-2}), make_vec({2})));
  InjectivityQuery iq;
  iq.parts = {ident, indicator_graph(Polyhedron::whole_space(1), 1)};
  iq.x_bar = make_vec({0.0});
  iq.y_centers = {make_vec({0.0}), make_vec({0.0})};
  iq.r = 0.5;
  iq.u = make_vec({1});
  iq.uncoupled_part = 0;
  iq.norm = Norm::Max;
  auto res = injectivity_constant(iq);
  // F alone forces |x1*| = |y*| >= 1; the indicator adds x* = 0 only
  CHECK(res.c == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("transversality checks on affine data") {
  Instance inst = identity_instance_2d(1.0, 0.2);
  auto tv = transversality_check(inst.objective, inst.cone_field, inst.omega,
                                 make_vec({0, 0}), make_vec({0, 0}), VdsKind::K);
  CHECK(tv.vds_cond);
  CHECK(tv.f_cond);
  CHECK(tv.ok());
  CHECK(tv.alliedness == "derived");
}

TEST_CASE("transversality failure for a halfspace-domain map against a matching omega") {
  // F == {0} on the domain {x1 <= 0}, empty outside: the domain boundary
  // contributes the normal (1,0,0,0), so D*F(0) = cone{(1,0)}. With
  // Omega = {x1 >= 0}, -N(Omega,0) = cone{(1,0)} meets it nontrivially.
  Polyhedron flat(2 + 2);
  flat.add(make_vec({1, 0, 0, 0}), 0.0);
  flat.add_eq(make_vec({0, 0, 1, 0}), 0.0);
  flat.add_eq(make_vec({0, 0, 0, 1}), 0.0);
  GraphMap constm = GraphMap::poly({flat}, 2, 2);
  Polyhedron omega(2);
  omega.add(make_vec({-1, 0}), 0.0);
  ConeField field = ConeField::constant(PolyCone::orthant(2), 2);
  auto tv = transversality_check(constm, field, omega, make_vec({0, 0}), make_vec({0, 0}),
                                 VdsKind::K);
  CHECK(tv.vds_cond);  // constant cone field still passes its own condition
  CHECK_FALSE(tv.f_cond);

  // the everywhere-defined constant map passes: D*F(0) = {0}
  Polyhedron flat_all(4);
  flat_all.add_eq(make_vec({0, 0, 1, 0}), 0.0);
  flat_all.add_eq(make_vec({0, 0, 0, 1}), 0.0);
  auto tv2 = transversality_check(GraphMap::poly({flat_all}, 2, 2), field, omega,
                                  make_vec({0, 0}), make_vec({0, 0}), VdsKind::K);
  CHECK(tv2.f_cond);
}

TEST_CASE("aubin property checks") {
  GraphMap ident = GraphMap::identity(Polyhedron::box(make_vec({-2}), make_vec({2})));
  CHECK(aubin_check(ident, make_vec({0.0}), make_vec({0.0})));

  // constant map has the Aubin property
  Polyhedron flat(2);
  flat.add_eq(make_vec({0, 1}), 0.0);
  GraphMap constm = GraphMap::poly({flat}, 1, 1);
  CHECK(aubin_check(constm, make_vec({0.2}), make_vec({0.0})));

  // its inverse (a vertical graph) does not
  Polyhedron vert(2);
  vert.add_eq(make_vec({1, 0}), 0.0);
  GraphMap inv = GraphMap::poly({vert}, 1, 1);
  CHECK_FALSE(aubin_check(inv, make_vec({0.0}), make_vec({0.2})));
}

TEST_CASE("openness harness on hand instances") {
  // five polyhedral instances with exactly verified hypotheses; coverage
  // must hold for a in {0.5c, 0.9c} at every rho below theta
  std::vector<Instance> instances;
  instances.push_back(identity_instance_1d(1.0, 0.2, -3, 3));
  {
    Instance scaled = identity_instance_1d(1.0, 0.2, -3, 3);
    Polyhedron seg(2);
    seg.add(make_vec({1, 0}), 3.0);
    seg.add(make_vec({-1, 0}), 3.0);
    seg.add_eq(make_vec({-2, 1}), 0.0);
    scaled.objective = GraphMap::poly({seg}, 1, 1);
    instances.push_back(scaled);
  }
  instances.push_back(identity_instance_2d(1.0, 0.2));
  {
    Instance diag = identity_instance_2d(1.0, 0.2);
    Mat a(2, 2);
    a << 2, 0, 0, 3;
    diag.objective = GraphMap::affine(a, Vec::Zero(2), Polyhedron::box(make_vec({-2, -2}),
                                                                       make_vec({2, 2})));
    instances.push_back(diag);
  }
  {
    Instance wedge = identity_instance_2d(1.0, 0.2);
    wedge.cone_field = ConeField::constant(
        PolyCone::from_primal({make_vec({1, 0}), make_vec({1, 1})}, 2), 2);
    wedge.k = make_vec({1, 0.5});  // max-unit, inside the wedge
    instances.push_back(wedge);
  }
  int idx = 0;
  for (auto& inst : instances) {
    CAPTURE(idx);
    Vec xb = Vec::Zero(inst.dim_x);
    Vec yb = Vec::Zero(inst.dim_y);
    for (double frac : {0.5, 0.9}) {
      auto rep = sum_openness_harness(inst, xb, yb, 0.5, frac, 4);
      CHECK(rep.hypotheses_ok);
      CHECK(rep.c > 0);
      CHECK(rep.theta > 0);
      CHECK(rep.all_covered);
    }
    ++idx;
  }
}

TEST_CASE("openness harness rejects a >= c") {
  Instance inst = identity_instance_1d(1.0, 0.2, -3, 3);
  auto rep = sum_openness_harness(inst, make_vec({0.0}), make_vec({0.0}), 0.5, 1.5, 3);
  CHECK_FALSE(rep.hypotheses_ok);
}

TEST_CASE("necessary condition for K on a box instance") {
  Instance inst = identity_instance_2d(1.0, 0.05);
  // left-bottom corner of the box is nondominated for the orthant order
  Vec xb = make_vec({-2, -2});
  auto rep = necessary_cond_K(inst, xb, xb);
  for (const auto& f : rep.failures) CAPTURE(f);
  CHECK(rep.hypotheses_ok);
  REQUIRE(rep.found);
  CHECK(rep.revalidated);
  CHECK(rep.witness.y_star.dot(inst.k) == doctest::Approx(1.0));
}

TEST_CASE("necessary condition for K on a singleton omega") {
  Instance inst = identity_instance_1d(0.5, 0.2);
  inst.omega = Polyhedron::singleton(make_vec({0.0}));
  inst.omega_grid = {make_vec({0.0})};
  auto rep = necessary_cond_K(inst, make_vec({0.0}), make_vec({0.0}));
  CHECK(rep.hypotheses_ok);
  CHECK(rep.found);
  CHECK(rep.revalidated);
}

TEST_CASE("necessary condition with a two-cell cone field") {
  // K switches between the orthant and a wider cone across x1 = 0; the
  // common cone over the ball is their intersection (the orthant)
  Instance inst = identity_instance_2d(0.5, 0.05);
  ConeField field;
  field.domain_dim = 2;
  field.value_dim = 2;
  Polyhedron left(2), right(2);
  left.add(make_vec({1, 0}), 0.0);
  right.add(make_vec({-1, 0}), 0.0);
  PolyCone wide = PolyCone::from_primal(
      {make_vec({1, -0.2}), make_vec({-0.2, 1}), make_vec({1, 1})}, 2);
  field.cells.push_back({left, wide});
  field.cells.push_back({right, wide});
  // identical cones keep the overlap consistent while exercising two pieces
  inst.cone_field = field;
  Vec xb = make_vec({-2, -2});
  auto rep = necessary_cond_K(inst, xb, xb);
  for (const auto& f : rep.failures) CAPTURE(f);
  CHECK(rep.hypotheses_ok);
  REQUIRE(rep.found);
  CHECK(rep.revalidated);
}

TEST_CASE("necessary condition with the candidate on a box face") {
  Instance inst = identity_instance_2d(0.5, 0.05);
  // the face midpoint (-2, 0) is dominated by points below it, so shrink the
  // feasible set to a segment where it becomes the minimum
  inst.omega = Polyhedron::box(make_vec({-2, 0}), make_vec({2, 2}));
  inst.omega_grid.clear();
  for (double x = -2; x <= 2.0001; x += 0.5) {
    for (double y = 0; y <= 2.0001; y += 0.5) inst.omega_grid.push_back(make_vec({x, y}));
  }
  Vec xb = make_vec({-2, 0});
  auto rep = necessary_cond_K(inst, xb, xb);
  for (const auto& f : rep.failures) CAPTURE(f);
  CHECK(rep.hypotheses_ok);
  REQUIRE(rep.found);
  CHECK(rep.revalidated);
  // witness arithmetic: the inclusion closes to zero within the ball radius
  CHECK((rep.witness.xs1 + rep.witness.xs2 + rep.witness.xs3 + rep.witness.residual)
            .cwiseAbs()
            .maxCoeff() <= 1e-7);
}

TEST_CASE("necessary condition hypothesis failures are reported") {
  Instance inst = identity_instance_2d(1.0, 0.2);
  auto rep = necessary_cond_K(inst, make_vec({0, 0}), make_vec({0, 0}));
  // interior point is dominated
  CHECK_FALSE(rep.hypotheses_ok);
  REQUIRE(!rep.failures.empty());
  CHECK(rep.failures.front() == "nondominatedness");
}

TEST_CASE("necessary condition for Q on a 1-D instance") {
  Instance inst;
  inst.norm = Norm::Max;
  inst.dim_x = 1;
  inst.dim_y = 1;
  inst.omega = Polyhedron::box(make_vec({0.0}), make_vec({2.0}));
  for (double x = 0; x <= 2.0001; x += 0.25) inst.omega_grid.push_back(make_vec({x}));
  inst.objective = GraphMap::identity(Polyhedron::box(make_vec({-2.0}), make_vec({4.0})));
  inst.vds_kind = VdsKind::Q;
  inst.cone_field = ConeField::constant(PolyCone::orthant(1), 1);
  inst.k = make_vec({1});
  inst.epsilon = 0.75;
  inst.delta = 0.2;
  Vec xb = make_vec({0.0});
  auto rep = necessary_cond_Q(inst, xb, xb);
  CHECK(rep.hypotheses_ok);
  CHECK(rep.found);
  CHECK(rep.revalidated);
}
