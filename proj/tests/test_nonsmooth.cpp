#include "doctest.h"

#include "oracles.hpp"
#include "vardom/nonsmooth.hpp"
#include "vardom/solutions.hpp"

using namespace vardom;

namespace {

// limsup-definition oracle: x* is a Frechet normal at p iff the sampled
// ratio <x*, u-p>/|u-p| stays below a vanishing threshold for u in S near p.
bool frechet_oracle_member(const std::vector<Polyhedron>& pieces, const Vec& p, const Vec& xs) {
  SplitRng rng(404);
  double worst = -kInf;
  for (int s = 0; s < 4000; ++s) {
    Vec u = p + 1e-3 * rng.unit_vector(static_cast<int>(p.size()), Norm::Euclidean) *
                    rng.uniform(0.05, 1.0);
    bool inside = false;
    for (const auto& piece : pieces) inside = inside || piece.contains(u, 1e-12);
    if (!inside) continue;
    worst = std::max(worst, xs.dot(u - p) / (u - p).norm());
  }
  return worst <= 1e-3;
}

Polyhedron halfplane(double nx, double ny, double off) {
  Polyhedron p(2);
  p.add(make_vec({nx, ny}), off);
  return p;
}

Instance pwa_instance_1d(std::vector<ScalarPwa::Cell> cells_1d, double eps, double delta,
                         double lo = 0.0, double hi = 1.0, double h = 0.1) {
  Instance inst;
  inst.dim_x = 1;
  inst.dim_y = 1;
  inst.omega = Polyhedron::box(make_vec({lo}), make_vec({hi}));
  for (double x = lo; x <= hi + 1e-12; x += h) inst.omega_grid.push_back(make_vec({x}));
  std::vector<AffineCell> cells;
  for (const auto& c : cells_1d) {
    Mat a(1, 1);
    a(0, 0) = c.grad[0];
    cells.push_back({c.region, a, make_vec({c.offset})});
  }
  inst.objective = GraphMap::pw_affine(cells);
  inst.cone_field = ConeField::constant(PolyCone::orthant(1), 1);
  inst.k = make_vec({1});
  inst.epsilon = eps;
  inst.delta = delta;
  return inst;
}

}  // namespace

TEST_CASE("frechet normal cone of a halfspace") {
  std::vector<Polyhedron> s = {halfplane(1, 0, 0)};
  auto n = normal_cone(s, make_vec({0, 0.5}), NormalKind::Frechet);
  REQUIRE(n.defined);
  CHECK(normal_union_contains(n, make_vec({1, 0})));
  CHECK(normal_union_contains(n, make_vec({2, 0})));
  CHECK_FALSE(normal_union_contains(n, make_vec({1, 0.1})));
  CHECK_FALSE(normal_union_contains(n, make_vec({-1, 0})));

  auto interior = normal_cone(s, make_vec({-1, 0}), NormalKind::Frechet);
  CHECK(interior.cones.front().is_zero());

  auto outside = normal_cone(s, make_vec({1, 0}), NormalKind::Frechet);
  CHECK_FALSE(outside.defined);
}

TEST_CASE("frechet cone of a union covering the plane is trivial") {
  std::vector<Polyhedron> s = {halfplane(0, 1, 0), halfplane(0, -1, 0)};
  Vec p = make_vec({0, 0});
  auto n = normal_cone(s, p, NormalKind::Frechet);
  REQUIRE(n.defined);
  CHECK(n.cones.front().is_zero());
  // limsup-definition oracle agrees on probes
  CHECK(frechet_oracle_member(s, p, make_vec({0, 0})));
  CHECK_FALSE(frechet_oracle_member(s, p, make_vec({0, 1})));
  CHECK_FALSE(frechet_oracle_member(s, p, make_vec({1, 0})));
}

TEST_CASE("limiting cone equals frechet cone for convex sets") {
  std::vector<Polyhedron> s = {halfplane(1, 0, 0)};
  Vec p = make_vec({0, 0});
  auto lim = normal_cone(s, p, NormalKind::Limiting);
  REQUIRE(lim.defined);
  CHECK(normal_union_contains(lim, make_vec({1, 0})));
  CHECK_FALSE(normal_union_contains(lim, make_vec({-1, 0})));
  CHECK_FALSE(normal_union_contains(lim, make_vec({0, 1})));
  CHECK_FALSE(normal_union_contains(lim, make_vec({0.5, 0.5})));
}

TEST_CASE("limiting cone of the two coordinate axes") {
  Polyhedron axis1(2), axis2(2);
  axis1.add_eq(make_vec({0, 1}), 0.0);  // x2 = 0
  axis2.add_eq(make_vec({1, 0}), 0.0);  // x1 = 0
  std::vector<Polyhedron> s = {axis1, axis2};
  Vec origin = make_vec({0, 0});

  auto fre = normal_cone(s, origin, NormalKind::Frechet);
  CHECK(fre.cones.front().is_zero());

  auto lim = normal_cone(s, origin, NormalKind::Limiting);
  // union of the two perpendicular lines
  for (const Vec& v : {make_vec({0, 1}), make_vec({0, -1}), make_vec({1, 0}), make_vec({-1, 0})})
    CHECK(normal_union_contains(lim, v));
  CHECK_FALSE(normal_union_contains(lim, make_vec({1, 1})));
  CHECK_FALSE(normal_union_contains(lim, make_vec({-0.5, 0.7})));

  // frechet is contained in limiting at every queried point
  for (const auto& c : fre.cones) {
    for (const Vec& g : c.primal) CHECK(normal_union_contains(lim, g));
  }
}

TEST_CASE("frechet subset of limiting on random polyhedral unions") {
  SplitRng rng(808);
  for (int trial = 0; trial < 20; ++trial) {
    SplitRng local = rng.fork(trial);
    std::vector<Polyhedron> s;
    for (int i = 0; i < 2; ++i) {
      Polyhedron p(2);
      for (int rrow = 0; rrow < 2; ++rrow) {
        Vec n = local.unit_vector(2, Norm::Euclidean);
        p.add(n, 0.0);  // all through the origin so p = 0 is shared
      }
      s.push_back(p);
    }
    Vec p0 = make_vec({0, 0});
    if (!s[0].contains(p0, 1e-9) || !s[1].contains(p0, 1e-9)) continue;
    auto fre = normal_cone(s, p0, NormalKind::Frechet);
    auto lim = normal_cone(s, p0, NormalKind::Limiting);
    for (int probe = 0; probe < 50; ++probe) {
      Vec v = local.unit_vector(2, Norm::Euclidean);
      bool in_fre = normal_union_contains(fre, v, 1e-7);
      if (in_fre) CHECK(normal_union_contains(lim, v, 1e-6));
    }
  }
}

TEST_CASE("coderivative of a diagonal linear map is the adjoint") {
  Mat a(2, 2);
  a << 2, 0, 0, 3;
  GraphMap f = GraphMap::affine(a, Vec::Zero(2), Polyhedron::whole_space(2));
  Vec x = make_vec({0.3, -0.2});
  Vec y = a * x;
  auto br = graph_coderiv_branches(f, x, y, NormalKind::Frechet);
  REQUIRE(br.defined);
  Vec ys = make_vec({1, 1});
  CHECK(coderiv_nonempty(br, ys));
  CHECK(coderiv_contains(br, ys, make_vec({2, 3})));
  CHECK_FALSE(coderiv_contains(br, ys, make_vec({2, 3.1})));
  CHECK_FALSE(coderiv_contains(br, ys, make_vec({0, 0})));
  // limiting agrees for the smooth graph
  auto brl = graph_coderiv_branches(f, x, y, NormalKind::Limiting);
  CHECK(coderiv_contains(brl, ys, make_vec({2, 3})));
}

TEST_CASE("coderivative of a constant polyhedral map") {
  // F == C = R^2_+: graph piece is X x C; product normal cone {0} x N(C,y)
  Polyhedron piece(3);  // (x, y1, y2) with y >= 0
  piece.add(make_vec({0, -1, 0}), 0.0);
  piece.add(make_vec({0, 0, -1}), 0.0);
  GraphMap f = GraphMap::poly({piece}, 1, 2);
  Vec x = make_vec({0.5});
  Vec y0 = make_vec({0, 0});
  auto br = graph_coderiv_branches(f, x, y0, NormalKind::Frechet);
  // -y* must lie in N(C,0) = -C+, i.e. y* in C+ = orthant
  CHECK(coderiv_nonempty(br, make_vec({1, 1})));
  CHECK(coderiv_contains(br, make_vec({1, 1}), make_vec({0.0})));
  CHECK_FALSE(coderiv_contains(br, make_vec({1, 1}), make_vec({0.5})));
  CHECK_FALSE(coderiv_nonempty(br, make_vec({-1, 0.5})));
  // at an interior graph value only y* = 0 pairs
  auto br2 = graph_coderiv_branches(f, x, make_vec({1, 1}), NormalKind::Frechet);
  CHECK_FALSE(coderiv_nonempty(br2, make_vec({1, 0})));
  CHECK(coderiv_nonempty(br2, make_vec({0, 0})));
}

TEST_CASE("dual-multiplier positivity for cone-field graphs") {
  // nonempty Frechet coderivative of K forces y* in K(x)+; exact LP check
  SplitRng rng(1945);
  PolyCone wedge = PolyCone::from_primal({make_vec({1, 0}), make_vec({1, 1})}, 2);
  Polyhedron piece(3);
  for (const Vec& d : wedge.dual) piece.add(make_vec({0, -d[0], -d[1]}), 0.0);
  GraphMap kmap = GraphMap::poly({piece}, 1, 2);
  int nonempty_count = 0;
  for (int i = 0; i < 500; ++i) {
    SplitRng local = rng.fork(i);
    Vec x = local.vector(1, -1, 1);
    // graph point: apex half the time (full-dimensional normal cone there),
    // otherwise a generic wedge point
    Vec y = local.uniform() < 0.5
                ? make_vec({0, 0})
                : Vec(std::max(0.0, local.uniform(-0.3, 1.0)) * make_vec({1, 0}) +
                      std::max(0.0, local.uniform(-0.3, 1.0)) * make_vec({1, 1}));
    Vec ys = local.vector(2, -1.5, 1.5);
    auto br = graph_coderiv_branches(kmap, x, y, NormalKind::Frechet);
    if (coderiv_nonempty(br, ys)) {
      ++nonempty_count;
      CHECK(cone_contains_dual(dual_cone(wedge), ys, 1e-7));
    }
  }
  CHECK(nonempty_count > 50);
}

TEST_CASE("minimal-time subdifferential pairs -1 with the direction") {
  SplitRng rng(112);
  int done = 0;
  for (int trial = 0; trial < 1200 && done < 100; ++trial) {
    SplitRng local = rng.fork(trial);
    Polyhedron box = Polyhedron::box(local.vector(2, -1.5, -0.2), local.vector(2, 0.2, 1.5));
    Vec u = local.unit_vector(2, Norm::Euclidean);
    Vec x = local.vector(2, -3, 3);
    if (box.contains(x, 1e-9)) continue;
    double t = ray_hit(box, x, u);
    if (t == kInf || t < 1e-3) continue;
    Vec a = x + t * u;
    std::vector<Vec> gens;
    try {
      gens = t_min_subdiff_gens(box, u, x);
    } catch (const Error&) {
      continue;
    }
    PolyCone nhat = PolyCone::from_primal(active_normals(box, a, 1e-7), 2);
    for (const Vec& g : gens) {
      CHECK(g.dot(u) == doctest::Approx(-1.0).epsilon(1e-9));
      CHECK(cone_contains_dual(nhat, g, 1e-7));
    }
    ++done;
  }
  CHECK(done >= 100);
}

TEST_CASE("subdiff of |x| at the kink is [-1,1]") {
  ScalarPwa g;
  Polyhedron left(1), right(1);
  left.add(make_vec({1}), 0.0);
  right.add(make_vec({-1}), 0.0);
  g.cells.push_back({left, make_vec({-1}), 0.0});
  g.cells.push_back({right, make_vec({1}), 0.0});
  SplitRng rng(3);
  auto sd = subdiff_pa(g, make_vec({0.0}), rng);
  CHECK(sd.evidence == Evidence::Exact);
  REQUIRE(sd.hull_gens.size() == 2);
  auto sd_smooth = subdiff_pa(g, make_vec({0.7}), rng);
  REQUIRE(sd_smooth.hull_gens.size() == 1);
  CHECK(sd_smooth.hull_gens[0][0] == doctest::Approx(1.0));
}

TEST_CASE("subdiff of a max-affine composition against finite differences") {
  // g(x) = max(x1 + x2, 2 x1 - x2 + 0.5)
  ScalarPwa g;
  Polyhedron c1(2), c2(2);
  // cell 1 active: x1 + x2 >= 2x1 - x2 + 0.5
  c1.add(make_vec({1, -2}), -0.5);
  c2.add(make_vec({-1, 2}), 0.5);
  g.cells.push_back({c1, make_vec({1, 1}), 0.0});
  g.cells.push_back({c2, make_vec({2, -1}), 0.5});
  SplitRng rng(4);
  Vec kink = make_vec({0.5, 0.5});  // x1 - 2 x2 = -0.5 holds
  auto sd = subdiff_pa(g, kink, rng);
  CHECK(sd.evidence == Evidence::Exact);
  CHECK(sd.hull_gens.size() == 2);
  // finite-difference directional derivative must dominate every gradient
  for (int s = 0; s < 64; ++s) {
    Vec v = rng.unit_vector(2, Norm::Euclidean);
    double fd = (g.value(Vec(kink + 1e-6 * v)) - g.value(kink)) / 1e-6;
    for (const Vec& grad : sd.hull_gens) CHECK(grad.dot(v) <= fd + 1e-4);
  }
}

TEST_CASE("nonconvex pwa routes to the sampled fallback") {
  // g(x) = min(x, -x) = -|x| is concave at 0
  ScalarPwa g;
  Polyhedron left(1), right(1);
  left.add(make_vec({1}), 0.0);
  right.add(make_vec({-1}), 0.0);
  g.cells.push_back({left, make_vec({1}), 0.0});
  g.cells.push_back({right, make_vec({-1}), 0.0});
  SplitRng rng(5);
  auto sd = subdiff_pa(g, make_vec({0.0}), rng);
  CHECK(sd.evidence == Evidence::Sampled);
  // Frechet subdifferential of -|x| at 0 is empty
  CHECK(sd.hull_gens.empty());
}

TEST_CASE("convexity_wrt on tabulated and affine data") {
  SplitRng rng(6);
  // affine single-valued: exact true
  GraphMap aff = GraphMap::affine(Mat::Identity(2, 2), Vec::Zero(2), Polyhedron::whole_space(2));
  auto rep = convexity_wrt(aff, PolyCone::orthant(2), rng);
  CHECK(rep.holds);
  CHECK(rep.exact);

  // x^2 on a grid wrt R+ is convex
  std::vector<FiniteGraphNode> sq, nsq;
  for (int i = -4; i <= 4; ++i) {
    double x = 0.25 * i;
    sq.push_back({make_vec({x}), {make_vec({x * x})}});
    nsq.push_back({make_vec({x}), {make_vec({-x * x})}});
  }
  auto rep2 = convexity_wrt(GraphMap::finite(sq, 1, 1), PolyCone::orthant(1), rng);
  CHECK(rep2.holds);
  CHECK(rep2.checked > 100);
  auto rep3 = convexity_wrt(GraphMap::finite(nsq, 1, 1), PolyCone::orthant(1), rng);
  CHECK_FALSE(rep3.holds);
}

TEST_CASE("first-order residual on the singleton omega") {
  ScalarPwa::Cell lin{Polyhedron::whole_space(1), make_vec({1}), 0.0};
  Instance inst = pwa_instance_1d({lin}, 1.0, 0.3, 0.0, 0.0, 1.0);
  inst.omega = Polyhedron::singleton(make_vec({0.0}));
  inst.omega_grid = {make_vec({0.0})};
  auto out = evp_vds(inst, make_vec({0.0}), 0.5);
  SplitRng rng(7);
  auto rep = first_order_residual_check(inst, make_vec({0.0}), out, rng);
  CHECK(rep.ok);
  CHECK(rep.residual == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("first-order residual for the tight affine instance") {
  // f(x) = x on [0,1] with delta = 1 truncated to the unit grid; the slope 1
  // cancels against N(Omega, 0) at the left edge
  ScalarPwa::Cell lin{Polyhedron::whole_space(1), make_vec({1}), 0.0};
  Instance inst = pwa_instance_1d({lin}, 1.2, 1.0);
  auto out = evp_vds(inst, make_vec({0.3}), 1.1);
  SplitRng rng(8);
  auto rep = first_order_residual_check(inst, make_vec({0.3}), out, rng);
  CHECK_FALSE(rep.case_i);  // sqrt(1.0) = 1 < 1.2 = epsilon
  CHECK(rep.ok);
  CHECK(rep.residual <= 1.0 + 1e-8);
}

TEST_CASE("first-order residual vanishes at an interior kink minimum") {
  // f = |x - 0.5| with the kink on the grid
  Polyhedron left(1), right(1);
  left.add(make_vec({1}), 0.5);
  right.add(make_vec({-1}), -0.5);
  ScalarPwa::Cell c1{left, make_vec({-1}), 0.5};
  ScalarPwa::Cell c2{right, make_vec({1}), -0.5};
  Instance inst = pwa_instance_1d({c1, c2}, 1.0, 0.09);
  auto out = evp_vds(inst, make_vec({0.5}), 0.65);
  CHECK(out.evp.x_bar[0] == doctest::Approx(0.5));
  SplitRng rng(9);
  auto rep = first_order_residual_check(inst, make_vec({0.5}), out, rng);
  CHECK(rep.ok);
  CHECK(rep.residual == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rep.evidence == Evidence::Exact);
}

TEST_CASE("decompose_subdiff on affine data") {
  // f = identity on R^2, K = P = orthant, k interior
  Instance inst;
  inst.dim_x = 2;
  inst.dim_y = 2;
  inst.omega = Polyhedron::whole_space(2);
  inst.omega_grid = {make_vec({0, 0})};
  inst.objective = GraphMap::identity(Polyhedron::whole_space(2));
  inst.cone_field = ConeField::constant(PolyCone::orthant(2), 2);
  inst.k = make_vec({1, 1}) / std::sqrt(2.0);
  inst.epsilon = 1.0;
  inst.delta = 0.1;
  // base vertices are sqrt2 e1, sqrt2 e2; pick the midpoint of the hull
  Vec x_star = make_vec({std::sqrt(2.0) / 2, std::sqrt(2.0) / 2});
  auto res = decompose_subdiff(inst, make_vec({0, 0}), x_star);
  REQUIRE(res.found);
  CHECK(res.y_star.dot(inst.k) == doctest::Approx(1.0));
  CHECK(cone_contains_dual(dual_cone(PolyCone::orthant(2)), res.y_star, 1e-8));
  CHECK(((Mat::Identity(2, 2).transpose() * res.y_star) - x_star).norm() <= 1e-7);
  // a point outside the subdifferential is reported as not found
  auto bad = decompose_subdiff(inst, make_vec({0, 0}), make_vec({-1, -1}));
  CHECK_FALSE(bad.found);
}

TEST_CASE("decompose_subdiff with a singular adjoint reaching zero") {
  Mat a(2, 2);
  a << 1, 0, -1, 0;  // A' y* = (y1 - y2, 0)
  Instance inst;
  inst.dim_x = 2;
  inst.dim_y = 2;
  inst.omega = Polyhedron::whole_space(2);
  inst.omega_grid = {make_vec({0, 0})};
  inst.objective = GraphMap::affine(a, Vec::Zero(2), Polyhedron::whole_space(2));
  inst.cone_field = ConeField::constant(PolyCone::orthant(2), 2);
  inst.k = make_vec({1, 1}) / std::sqrt(2.0);
  inst.epsilon = 1.0;
  inst.delta = 0.1;
  auto res = decompose_subdiff(inst, make_vec({0, 0}), make_vec({0, 0}));
  REQUIRE(res.found);
  CHECK(res.y_star[0] == doctest::Approx(res.y_star[1]).epsilon(1e-7));
}

TEST_CASE("decompose_subdiff on the 1-D line") {
  ScalarPwa::Cell lin{Polyhedron::whole_space(1), make_vec({1}), 0.0};
  Instance inst = pwa_instance_1d({lin}, 1.0, 0.1);
  auto res = decompose_subdiff(inst, make_vec({0.5}), make_vec({1.0}));
  REQUIRE(res.found);
  CHECK(res.y_star[0] == doctest::Approx(1.0));
}

TEST_CASE("sampled midpoint convexity of the scalarization") {
  // convex-wrt-P data: affine f, constant field
  ScalarPwa::Cell lin{Polyhedron::whole_space(1), make_vec({2}), 0.25};
  Instance inst = pwa_instance_1d({lin}, 1.0, 0.1);
  SplitRng rng(10);
  Vec a = inst.objective.value(make_vec({0.5}));
  for (int s = 0; s < 1000; ++s) {
    double x1 = rng.uniform(0, 1), x2 = rng.uniform(0, 1);
    auto v1 = s_vds(inst.objective, inst.cone_field, a, inst.k, make_vec({x1}));
    auto v2 = s_vds(inst.objective, inst.cone_field, a, inst.k, make_vec({x2}));
    auto vm = s_vds(inst.objective, inst.cone_field, a, inst.k, make_vec({0.5 * (x1 + x2)}));
    CHECK(vm.value <= 0.5 * v1.value + 0.5 * v2.value + 1e-9);
  }
}
