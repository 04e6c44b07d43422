// Writes the three golden fixture files shipped under fixtures/.

#include "vardom/instances_io.hpp"

#include <iostream>

using namespace vardom;

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "fixtures";

  {
    // 1-D affine instance: f(x) = x on {0, 0.1, ..., 1}, K = R+, delta = 0.3
    Instance inst;
    inst.dim_x = 1;
    inst.dim_y = 1;
    inst.omega = Polyhedron::box(make_vec({0.0}), make_vec({1.0}));
    std::vector<FiniteGraphNode> nodes;
    for (int i = 0; i <= 10; ++i) {
      Vec x = make_vec({0.1 * i});
      inst.omega_grid.push_back(x);
      nodes.push_back({x, {x}});
    }
    inst.objective = GraphMap::finite(nodes, 1, 1, true);
    inst.cone_field = ConeField::constant(PolyCone::orthant(1), 1);
    inst.k = make_vec({1.0});
    inst.epsilon = 1.0;
    inst.delta = 0.3;
    inst.check_basic();
    Vec cx = make_vec({0.3}), cy = make_vec({0.3});
    save_instance(dir + "/grid1d_affine.json", inst, &cx, &cy, "fixture grid1d_affine");
  }
  {
    // constant two-objective map: every point maps to the origin
    Instance inst;
    inst.dim_x = 1;
    inst.dim_y = 2;
    inst.omega = Polyhedron::box(make_vec({0.0}), make_vec({1.0}));
    std::vector<FiniteGraphNode> nodes;
    for (int i = 0; i <= 4; ++i) {
      Vec x = make_vec({0.25 * i});
      inst.omega_grid.push_back(x);
      nodes.push_back({x, {make_vec({0.0, 0.0})}});
    }
    inst.objective = GraphMap::finite(nodes, 1, 2, true);
    inst.cone_field = ConeField::constant(PolyCone::orthant(2), 1);
    Vec k = make_vec({1.0, 1.0});
    inst.k = k / k.norm();
    inst.epsilon = 5.0;
    inst.delta = 0.1;
    inst.check_basic();
    Vec cx = make_vec({0.0}), cy = make_vec({0.0, 0.0});
    save_instance(dir + "/constant2d.json", inst, &cx, &cy, "fixture constant2d");
  }
  {
    // five-point Q-instance used by the reduce subcommand
    Instance inst;
    inst.dim_x = 1;
    inst.dim_y = 2;
    inst.vds_kind = VdsKind::Q;
    inst.omega = Polyhedron::whole_space(1);
    std::vector<FiniteGraphNode> nodes;
    double data[5][2] = {{0.4, 0.1}, {0.2, 0.5}, {-0.1, 0.8}, {0.7, -0.2}, {0.3, 0.3}};
    for (int i = 0; i < 5; ++i) {
      Vec x = make_vec({0.25 * i});
      inst.omega_grid.push_back(x);
      nodes.push_back({x, {make_vec({data[i][0], data[i][1]})}});
    }
    inst.objective = GraphMap::finite(nodes, 1, 2);
    inst.cone_field = ConeField::constant(PolyCone::orthant(2), 2);
    Vec k = make_vec({1.0, 1.0});
    inst.k = k / k.norm();
    inst.epsilon = 2.0;
    inst.delta = 0.15;
    inst.check_basic();
    Vec cx = make_vec({0.75}), cy = make_vec({0.7, -0.2});
    save_instance(dir + "/lifted_q.json", inst, &cx, &cy, "fixture lifted_q");
  }
  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}
