#include "doctest.h"

#include "oracles.hpp"
#include "vardom/geometry.hpp"

using namespace vardom;

namespace {
PolyCone wedge_cone() {
  // cone{(1,0),(1,1)}
  return PolyCone::from_primal({make_vec({1, 0}), make_vec({1, 1})}, 2);
}
}  // namespace

TEST_CASE("orthant membership") {
  PolyCone c = PolyCone::orthant(2);
  CHECK(cone_contains(c, make_vec({1, 2})));
  CHECK_FALSE(cone_contains(c, make_vec({-1, 0.0})));
}

TEST_CASE("wedge cone membership via elimination oracle") {
  // (2,1) = a(1,0) + b(1,1): a = b = 1 >= 0
  Vec ab = oracle::solve2x2(1, 1, 0, 1, 2, 1);
  CHECK(ab[0] == doctest::Approx(1.0));
  CHECK(ab[1] == doctest::Approx(1.0));
  CHECK(cone_contains(wedge_cone(), make_vec({2, 1})));
  CHECK_FALSE(cone_contains(wedge_cone(), make_vec({0, 1})));
}

TEST_CASE("cone membership dimension mismatch") {
  CHECK_THROWS_AS((void)cone_contains(PolyCone::orthant(2), make_vec({1, 2, 3})), DimMismatch);
}

TEST_CASE("dual cone of orthant is orthant") {
  PolyCone d = dual_cone(PolyCone::orthant(2));
  for (const Vec& probe : {make_vec({1, 0}), make_vec({0, 1}), make_vec({2, 3})})
    CHECK(cone_contains(d, probe));
  CHECK_FALSE(cone_contains(d, make_vec({-0.1, 1})));
}

TEST_CASE("dual cone of wedge") {
  // dual(cone{(1,0),(1,1)}) = cone{(0,1),(1,-1)}
  PolyCone d = dual_cone(wedge_cone());
  REQUIRE(d.primal.size() == 2);
  CHECK(cone_contains(d, make_vec({0, 1})));
  CHECK(cone_contains(d, make_vec({1, -1})));
  // extremality: the two named rays are not in the hull of the other gens
  CHECK_FALSE(cone_contains(d, make_vec({0, -0.1})));
  CHECK_FALSE(cone_contains(d, make_vec({1, -1.1})));
}

TEST_CASE("dual of zero cone is the whole plane") {
  PolyCone d = dual_cone(PolyCone::zero(2));
  SplitRng rng(3);
  for (int i = 0; i < 32; ++i) CHECK(cone_contains_dual(d, rng.vector(2, -5, 5)));
}

TEST_CASE("dual of dual reproduces the cone on random probes") {
  SplitRng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    int d = 2 + trial % 2;
    // pointed full-dimensional cone: generators clustered around a center ray
    Vec center = rng.unit_vector(d, Norm::Euclidean);
    std::vector<Vec> gens;
    for (int g = 0; g < d + 2; ++g) {
      Vec v = center + 0.45 * rng.unit_vector(d, Norm::Euclidean);
      gens.push_back(v / v.norm());
    }
    PolyCone c = PolyCone::from_primal(gens, d);
    PolyCone cc = dual_cone(dual_cone(c));
    for (int p = 0; p < 1000; ++p) {
      Vec y = rng.vector(d, -1.5, 1.5);
      double margin = kInf;
      for (const Vec& dg : c.dual) margin = std::min(margin, dg.dot(y));
      if (std::abs(margin) < 1e-7) continue;
      CHECK(cone_contains_dual(c, y, 1e-9) == cone_contains_dual(cc, y, 1e-9));
    }
  }
}

TEST_CASE("positive homogeneity of membership") {
  SplitRng rng(5);
  PolyCone c = wedge_cone();
  for (int i = 0; i < 100; ++i) {
    Vec y = rng.vector(2, -2, 2);
    if (!cone_contains_dual(c, y)) continue;
    double lam = rng.uniform(1e-3, 1e3);
    CHECK(cone_contains_dual(c, Vec(lam * y), 1e-6 * lam));
  }
}

TEST_CASE("pointedness detection") {
  CHECK(cone_pointed(PolyCone::orthant(2)));
  CHECK(cone_pointed(PolyCone::zero(2)));
  PolyCone halfplane = PolyCone::from_primal(
      {make_vec({1, 0}), make_vec({-1, 0}), make_vec({0, 1})}, 2);
  CHECK_FALSE(cone_pointed(halfplane));
}

TEST_CASE("cone validation flags") {
  SplitRng rng(11);
  ConeFlags f = validate_cone(PolyCone::orthant(3), rng);
  CHECK(f.pairing_ok);
  CHECK(f.duality_ok);
  CHECK(f.pointed);
  CHECK(f.proper);
  ConeFlags z = validate_cone(PolyCone::zero(2), rng);
  CHECK_FALSE(z.proper);
}

TEST_CASE("ray_hit basics") {
  Polyhedron p(2);
  p.add(make_vec({1, 0}), 0.0);  // x1 <= 0
  CHECK(ray_hit(p, make_vec({1, 0}), make_vec({-1, 0})) == doctest::Approx(1.0));
  CHECK(ray_hit(p, make_vec({1, 0}), make_vec({1, 0})) == kInf);
}

TEST_CASE("ray_hit unit square from outside, against scan oracle") {
  Polyhedron sq = Polyhedron::box(make_vec({0, 0}), make_vec({1, 1}));
  Vec x = make_vec({-1, 0.5}), u = make_vec({1, 0});
  double t = ray_hit(sq, x, u);
  CHECK(t == doctest::Approx(1.0));
  double t_oracle = oracle::first_hit_up([&](double s) { return sq.contains(Vec(x + s * u), 1e-12); }, 5.0);
  CHECK(t == doctest::Approx(t_oracle).epsilon(1e-6));
}

TEST_CASE("ray_hit zero iff containment") {
  SplitRng rng(23);
  Polyhedron sq = Polyhedron::box(make_vec({0, 0}), make_vec({1, 1}));
  for (int i = 0; i < 200; ++i) {
    Vec x = rng.vector(2, -0.5, 1.5);
    Vec u = rng.unit_vector(2, Norm::Euclidean);
    double t = ray_hit(sq, x, u);
    if (sq.contains(x, 1e-12)) {
      CHECK(t == doctest::Approx(0.0));
    } else if (t < kInf) {
      CHECK(t > 0.0);
    }
  }
}

TEST_CASE("distance to finite set and membership") {
  std::vector<Vec> pts = {make_vec({2, 0})};
  CHECK(distance_to_points(make_vec({0, 0}), pts, Norm::Euclidean) == doctest::Approx(2.0));
  CHECK(distance_to_points(make_vec({2, 0}), pts, Norm::Euclidean) == doctest::Approx(0.0));
}

TEST_CASE("distance to halfspace against projection formula") {
  Polyhedron hs(2);
  hs.add(make_vec({-1, 0}), -1.0);  // x1 >= 1
  Vec y = make_vec({0, 0});
  CHECK(distance_to_polyhedron(y, hs, Norm::Euclidean) ==
        doctest::Approx(oracle::halfspace_distance(make_vec({-1, 0}), -1.0, y)));
  CHECK(distance_to_polyhedron(y, hs, Norm::Euclidean) == doctest::Approx(1.0));
}

TEST_CASE("euclidean projection against random-direction oracle") {
  SplitRng rng(31);
  Polyhedron tri(2);
  tri.add(make_vec({-1, 0}), 0.0);
  tri.add(make_vec({0, -1}), 0.0);
  tri.add(make_vec({1, 1}), 1.0);
  for (int i = 0; i < 50; ++i) {
    Vec y = rng.vector(2, -2, 2);
    Vec pr = project_onto_polyhedron(y, tri);
    CHECK(tri.contains(pr, 1e-7));
    double d = (pr - y).norm();
    // no feasible sampled point may be closer
    for (int s = 0; s < 500; ++s) {
      Vec z = rng.vector(2, 0, 1);
      if (!tri.contains(z, 0.0)) continue;
      CHECK(d <= (z - y).norm() + 1e-7);
    }
  }
}

TEST_CASE("distance zero iff membership, polyhedra") {
  SplitRng rng(37);
  Polyhedron sq = Polyhedron::box(make_vec({-1, -1}), make_vec({1, 1}));
  for (int i = 0; i < 100; ++i) {
    Vec y = rng.vector(2, -2, 2);
    double d = distance_to_polyhedron(y, sq, Norm::Euclidean);
    if (sq.contains(y, 1e-12)) {
      CHECK(d <= 1e-9);
    } else {
      CHECK(d > 1e-9);
    }
  }
}

TEST_CASE("distance in max and sum norms via LP") {
  Polyhedron hs(2);
  hs.add(make_vec({-1, 0}), -1.0);  // x1 >= 1
  CHECK(distance_to_polyhedron(make_vec({0, 0}), hs, Norm::Max) == doctest::Approx(1.0));
  CHECK(distance_to_polyhedron(make_vec({0, 0}), hs, Norm::Sum) == doctest::Approx(1.0));
}

TEST_CASE("min_norm_point over hull plus cone") {
  // conv{(2,1),(2,-1)} + cone{(1,0)}: closest point to origin is (2,0)
  auto r = min_norm_point({make_vec({2, 1}), make_vec({2, -1})}, {make_vec({1, 0})}, 2);
  CHECK(r.dist == doctest::Approx(2.0));
  CHECK(r.point[0] == doctest::Approx(2.0));
  CHECK(r.point[1] == doctest::Approx(0.0).epsilon(1e-7));
  // adding the opposite ray collapses the distance to 0
  auto r2 = min_norm_point({make_vec({2, 1}), make_vec({2, -1})},
                           {make_vec({1, 0}), make_vec({-1, 0})}, 2);
  CHECK(r2.dist == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("min_norm_point hull only, random sampling oracle") {
  SplitRng rng(41);
  for (int t = 0; t < 30; ++t) {
    std::vector<Vec> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(rng.vector(2, -1, 2));
    auto r = min_norm_point(pts, {}, 2);
    double best = kInf;
    for (int s = 0; s < 3000; ++s) {
      Vec w(4);
      for (int i = 0; i < 4; ++i) w[i] = rng.uniform();
      w /= w.sum();
      Vec g = Vec::Zero(2);
      for (int i = 0; i < 4; ++i) g += w[i] * pts[i];
      best = std::min(best, g.norm());
    }
    CHECK(r.dist <= best + 1e-9);
    CHECK(r.dist >= 0.0);
  }
}

TEST_CASE("vertex enumeration of a box") {
  Polyhedron sq = Polyhedron::box(make_vec({0, 0}), make_vec({1, 2}));
  auto vs = polyhedron_vertices(sq);
  REQUIRE(vs.size() == 4);
  CHECK(vs.front()[0] == doctest::Approx(0.0));
  CHECK(vs.back()[1] == doctest::Approx(2.0));
}

TEST_CASE("intersection of cones") {
  PolyCone both = intersect_cones({PolyCone::orthant(2), wedge_cone()});
  // wedge is contained in the orthant, so the intersection is the wedge
  CHECK(cone_contains(both, make_vec({1, 0})));
  CHECK(cone_contains(both, make_vec({1, 1})));
  CHECK_FALSE(cone_contains(both, make_vec({0, 1})));

  PolyCone ray1 = PolyCone::from_primal({make_vec({1, 0})}, 2);
  PolyCone ray2 = PolyCone::from_primal({make_vec({0, 1})}, 2);
  PolyCone z = intersect_cones({ray1, ray2});
  CHECK(z.is_zero());
  CHECK_FALSE(oracle::cones_share_direction({ray1, ray2}, 2, 5000));
}

TEST_CASE("vertex cache invariant") {
  Polyhedron sq = Polyhedron::box(make_vec({0, 0}), make_vec({1, 1}));
  CHECK(vertex_cache_consistent(sq));  // empty cache is fine
  sq.vertex_cache = polyhedron_vertices(sq);
  CHECK(vertex_cache_consistent(sq));
  sq.vertex_cache.push_back(make_vec({0.5, 0.5}));  // interior point is not a vertex
  CHECK_FALSE(vertex_cache_consistent(sq));
  sq.vertex_cache = {make_vec({0, 0}), make_vec({1, 1})};  // missing vertices
  CHECK_FALSE(vertex_cache_consistent(sq));
}

TEST_CASE("nonempty flag consistent with LP feasibility") {
  Polyhedron empty(1);
  empty.add(make_vec({1}), 0.0);
  empty.add(make_vec({-1}), -1.0);  // x >= 1 and x <= 0
  CHECK_FALSE(polyhedron_nonempty(empty));
  CHECK(polyhedron_nonempty(Polyhedron::whole_space(3)));
}
