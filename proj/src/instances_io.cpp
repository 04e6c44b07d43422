#include "vardom/instances_io.hpp"

#include "vardom/solutions.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace vardom {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

ordered vec_to_json(const Vec& v) {
  ordered a = ordered::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a, int expect_dim = -1) {
  if (!a.is_array()) throw SchemaError("expected a numeric array");
  Vec v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw SchemaError("expected a number in vector");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  if (expect_dim >= 0 && v.size() != expect_dim) throw SchemaError("vector dimension mismatch");
  return v;
}

ordered polyhedron_to_json(const Polyhedron& p) {
  ordered o;
  o["dim"] = p.dim;
  ordered rows = ordered::array();
  for (const auto& h : p.halfspaces) {
    ordered r;
    r["normal"] = vec_to_json(h.normal);
    r["offset"] = h.offset;
    rows.push_back(r);
  }
  o["halfspaces"] = rows;
  return o;
}

void check_keys(const json& o, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    if (!allowed.count(it.key()))
      throw SchemaError("unknown field '" + it.key() + "' in " + where);
  }
}

Polyhedron polyhedron_from_json(const json& o) {
  check_keys(o, {"dim", "halfspaces"}, "polyhedron");
  Polyhedron p(o.at("dim").get<int>());
  for (const auto& r : o.at("halfspaces")) {
    check_keys(r, {"normal", "offset"}, "halfspace");
    p.add(vec_from_json(r.at("normal"), p.dim), r.at("offset").get<double>());
  }
  return p;
}

ordered cone_to_json(const PolyCone& c) {
  ordered o;
  o["dim"] = c.dim;
  ordered prim = ordered::array(), dual = ordered::array();
  for (const Vec& g : c.primal) prim.push_back(vec_to_json(g));
  for (const Vec& d : c.dual) dual.push_back(vec_to_json(d));
  o["primal"] = prim;
  o["dual"] = dual;
  return o;
}

PolyCone cone_from_json(const json& o) {
  check_keys(o, {"dim", "primal", "dual"}, "cone");
  PolyCone c;
  c.dim = o.at("dim").get<int>();
  for (const auto& g : o.at("primal")) c.primal.push_back(vec_from_json(g, c.dim));
  for (const auto& d : o.at("dual")) c.dual.push_back(vec_from_json(d, c.dim));
  return c;
}

}  // namespace

std::string instance_to_json(const Instance& inst, const Vec* candidate_x,
                             const Vec* candidate_y, const std::string& provenance) {
  ordered o;
  o["schema_version"] = 1;
  o["dim_x"] = inst.dim_x;
  o["dim_y"] = inst.dim_y;
  o["norm"] = norm_name(inst.norm);
  ordered omega;
  omega["polyhedron"] = polyhedron_to_json(inst.omega);
  ordered grid = ordered::array();
  for (const Vec& g : inst.omega_grid) grid.push_back(vec_to_json(g));
  omega["grid"] = grid;
  o["omega"] = omega;

  ordered obj;
  switch (inst.objective.kind) {
    case GraphKind::FiniteGraph:
    case GraphKind::SingleValued: {
      obj["kind"] =
          inst.objective.kind == GraphKind::SingleValued ? "single_valued" : "finite_graph";
      ordered nodes = ordered::array();
      for (const auto& n : inst.objective.nodes) {
        ordered node;
        node["x"] = vec_to_json(n.x);
        ordered vals = ordered::array();
        for (const Vec& v : n.values) vals.push_back(vec_to_json(v));
        node["values"] = vals;
        nodes.push_back(node);
      }
      obj["nodes"] = nodes;
      break;
    }
    case GraphKind::PolyGraph: {
      obj["kind"] = "poly_graph";
      ordered pieces = ordered::array();
      for (const auto& p : inst.objective.pieces) pieces.push_back(polyhedron_to_json(p));
      obj["pieces"] = pieces;
      break;
    }
    case GraphKind::PwAffine: {
      obj["kind"] = "pw_affine";
      ordered cells = ordered::array();
      for (const auto& c : inst.objective.affine_cells) {
        ordered cell;
        cell["region"] = polyhedron_to_json(c.region);
        ordered rows = ordered::array();
        for (int r = 0; r < c.a.rows(); ++r) rows.push_back(vec_to_json(c.a.row(r)));
        cell["a"] = rows;
        cell["b"] = vec_to_json(c.b);
        cells.push_back(cell);
      }
      obj["cells"] = cells;
      break;
    }
  }
  o["objective"] = obj;

  ordered vds;
  vds["kind"] = inst.vds_kind == VdsKind::K ? "K" : "Q";
  ordered cells = ordered::array();
  for (const auto& c : inst.cone_field.cells) {
    ordered cell;
    cell["region"] = polyhedron_to_json(c.region);
    cell["cone"] = cone_to_json(c.cone);
    cells.push_back(cell);
  }
  vds["cells"] = cells;
  if (inst.cone_field.default_cone) vds["default_cone"] = cone_to_json(*inst.cone_field.default_cone);
  o["vds"] = vds;

  o["k"] = vec_to_json(inst.k);
  if (inst.epsilon == kInf)
    o["epsilon"] = "inf";
  else
    o["epsilon"] = inst.epsilon;
  o["delta"] = inst.delta;
  o["tolerance"] = inst.tol;
  if (candidate_x && candidate_y) {
    ordered cand;
    cand["x"] = vec_to_json(*candidate_x);
    cand["y"] = vec_to_json(*candidate_y);
    o["candidate"] = cand;
  }
  if (!provenance.empty()) o["provenance"] = provenance;
  return o.dump(2) + "\n";
}

LoadedInstance instance_from_json(const std::string& text) {
  json o;
  try {
    o = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("json parse error: ") + e.what());
  }
  check_keys(o,
             {"schema_version", "dim_x", "dim_y", "norm", "omega", "objective", "vds", "k",
              "epsilon", "delta", "tolerance", "candidate", "provenance"},
             "instance");
  if (!o.contains("schema_version") || o["schema_version"].get<int>() != 1)
    throw SchemaError("unsupported schema version");
  LoadedInstance out;
  Instance& inst = out.inst;
  inst.dim_x = o.at("dim_x").get<int>();
  inst.dim_y = o.at("dim_y").get<int>();
  inst.norm = norm_from_name(o.at("norm").get<std::string>());

  const json& omega = o.at("omega");
  check_keys(omega, {"polyhedron", "grid"}, "omega");
  inst.omega = polyhedron_from_json(omega.at("polyhedron"));
  if (inst.omega.dim != inst.dim_x) throw SchemaError("omega dimension mismatch");
  for (const auto& g : omega.at("grid")) {
    Vec gv = vec_from_json(g, inst.dim_x);
    // the feasible set is the listed grid intersected with the polyhedron
    if (inst.omega.contains(gv, kTol)) inst.omega_grid.push_back(gv);
  }

  const json& obj = o.at("objective");
  std::string kind = obj.at("kind").get<std::string>();
  if (kind == "finite_graph" || kind == "single_valued") {
    check_keys(obj, {"kind", "nodes"}, "objective");
    std::vector<FiniteGraphNode> nodes;
    for (const auto& n : obj.at("nodes")) {
      check_keys(n, {"x", "values"}, "node");
      FiniteGraphNode node;
      node.x = vec_from_json(n.at("x"), inst.dim_x);
      for (const auto& v : n.at("values")) node.values.push_back(vec_from_json(v, inst.dim_y));
      nodes.push_back(std::move(node));
    }
    inst.objective =
        GraphMap::finite(std::move(nodes), inst.dim_x, inst.dim_y, kind == "single_valued");
  } else if (kind == "poly_graph") {
    check_keys(obj, {"kind", "pieces"}, "objective");
    std::vector<Polyhedron> pieces;
    for (const auto& p : obj.at("pieces")) pieces.push_back(polyhedron_from_json(p));
    inst.objective = GraphMap::poly(std::move(pieces), inst.dim_x, inst.dim_y);
  } else if (kind == "pw_affine") {
    check_keys(obj, {"kind", "cells"}, "objective");
    std::vector<AffineCell> cells;
    for (const auto& c : obj.at("cells")) {
      check_keys(c, {"region", "a", "b"}, "affine cell");
      AffineCell cell;
      cell.region = polyhedron_from_json(c.at("region"));
      const auto& rows = c.at("a");
      cell.a = Mat(rows.size(), inst.dim_x);
      for (std::size_t r = 0; r < rows.size(); ++r)
        cell.a.row(static_cast<Eigen::Index>(r)) = vec_from_json(rows[r], inst.dim_x);
      cell.b = vec_from_json(c.at("b"), inst.dim_y);
      cells.push_back(std::move(cell));
    }
    inst.objective = GraphMap::pw_affine(std::move(cells));
  } else {
    throw SchemaError("unknown objective kind: " + kind);
  }

  const json& vds = o.at("vds");
  check_keys(vds, {"kind", "cells", "default_cone"}, "vds");
  std::string vkind = vds.at("kind").get<std::string>();
  if (vkind == "K")
    inst.vds_kind = VdsKind::K;
  else if (vkind == "Q")
    inst.vds_kind = VdsKind::Q;
  else
    throw SchemaError("vds kind must be K or Q");
  inst.cone_field.domain_dim = inst.vds_kind == VdsKind::K ? inst.dim_x : inst.dim_y;
  inst.cone_field.value_dim = inst.dim_y;
  for (const auto& c : vds.at("cells")) {
    check_keys(c, {"region", "cone"}, "vds cell");
    ConeCell cell{polyhedron_from_json(c.at("region")), cone_from_json(c.at("cone"))};
    if (cell.region.dim != inst.cone_field.domain_dim || cell.cone.dim != inst.dim_y)
      throw SchemaError("vds cell dimension mismatch");
    inst.cone_field.cells.push_back(std::move(cell));
  }
  if (vds.contains("default_cone")) {
    PolyCone d = cone_from_json(vds.at("default_cone"));
    if (d.dim != inst.dim_y) throw SchemaError("default cone dimension mismatch");
    inst.cone_field.default_cone = d;
  }
  if (inst.cone_field.cells.empty() && !inst.cone_field.default_cone)
    throw SchemaError("missing cone field");

  inst.k = vec_from_json(o.at("k"), inst.dim_y);
  if (o.at("epsilon").is_string()) {
    if (o.at("epsilon").get<std::string>() != "inf") throw SchemaError("bad epsilon");
    inst.epsilon = kInf;
  } else {
    inst.epsilon = o.at("epsilon").get<double>();
  }
  inst.delta = o.at("delta").get<double>();
  inst.tol = o.at("tolerance").get<double>();
  if (o.contains("candidate")) {
    check_keys(o.at("candidate"), {"x", "y"}, "candidate");
    out.candidate_x = vec_from_json(o.at("candidate").at("x"), inst.dim_x);
    out.candidate_y = vec_from_json(o.at("candidate").at("y"), inst.dim_y);
  }
  if (o.contains("provenance")) out.provenance = o.at("provenance").get<std::string>();
  inst.check_basic();
  // load-time invariants: overlapping cells must agree, representations must
  // be duality-consistent ({0} cells are representable, so pointedness is
  // reported by the certifiers rather than enforced here)
  SplitRng probe_rng(0x76647321);
  validate_field(inst.cone_field, probe_rng, /*require_pointed=*/false);
  return out;
}

void save_instance(const std::string& path, const Instance& inst, const Vec* candidate_x,
                   const Vec* candidate_y, const std::string& provenance) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f << instance_to_json(inst, candidate_x, candidate_y, provenance);
}

LoadedInstance load_instance(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return instance_from_json(text);
}

Profile profile_from_name(const std::string& name) {
  if (name == "grid1d") return Profile::Grid1d;
  if (name == "grid2d") return Profile::Grid2d;
  if (name == "polyhedral2d") return Profile::Polyhedral2d;
  if (name == "lifted") return Profile::Lifted;
  throw SchemaError("unknown profile: " + name);
}

std::string profile_name(Profile p) {
  switch (p) {
    case Profile::Grid1d: return "grid1d";
    case Profile::Grid2d: return "grid2d";
    case Profile::Polyhedral2d: return "polyhedral2d";
    case Profile::Lifted: return "lifted";
  }
  return "grid1d";
}

namespace {

// pointed cone holding k strictly inside (so the scalarization stays finite
// and the dual base is bounded); generators fan out from k in an acute cap
PolyCone cone_around(SplitRng& rng, const Vec& k_dir, int dim) {
  Vec k_hat = k_dir / k_dir.norm();
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::vector<Vec> gens;
    if (dim == 1) {
      gens.push_back(k_hat);
    } else {
      for (int g = 0; g < dim + 1 + rng.uniform_int(0, 1); ++g) {
        Vec v = k_hat + 0.55 * rng.unit_vector(dim, Norm::Euclidean);
        gens.push_back(v / v.norm());
      }
    }
    PolyCone c = PolyCone::from_primal(gens, dim);
    if (!cone_pointed(c)) continue;
    auto inner = interiority(k_hat, c);
    if (inner.holds && inner.margin >= 0.05) return c;
  }
  return PolyCone::orthant(dim);
}

void pick_regime(SplitRng& rng, const std::string& regime, double& eps, double& delta) {
  if (regime == "b_ii") {
    // eps <= 1/16 with delta < eps and sqrt(delta) - delta < eps
    eps = rng.uniform(0.03, 1.0 / 16.0);
    for (int i = 0; i < 200; ++i) {
      delta = rng.uniform(1e-4, eps * 0.9);
      if (std::sqrt(delta) - delta < eps && delta < eps) return;
    }
    delta = 1e-4;
    return;
  }
  // default b_i: eps > 1/16, delta in (0, 1/4)
  eps = rng.uniform(0.3, 1.0);
  delta = rng.uniform(0.05, 0.24);
}

GeneratedInstance generate_grid1d(SplitRng rng, GeneratorOptions opt) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SplitRng sub = rng.fork(attempt);
    GeneratedInstance out;
    Instance& inst = out.inst;
    inst.dim_x = 1;
    inst.dim_y = 1 + sub.uniform_int(0, 2);
    inst.norm = Norm::Euclidean;
    int n = sub.uniform_int(10, 24);
    double h = 1.0 / (n - 1);
    inst.omega = Polyhedron::box(make_vec({0.0}), make_vec({1.0}));
    for (int i = 0; i < n; ++i) inst.omega_grid.push_back(make_vec({i * h}));

    Vec k = Vec::Ones(inst.dim_y) + sub.vector(inst.dim_y, -0.2, 0.2);
    inst.k = k / k.norm();
    PolyCone cone = cone_around(sub, inst.k, inst.dim_y);
    inst.cone_field = ConeField::constant(cone, 1);

    // piecewise-affine objective with on-grid breakpoints; outer cells extend
    // beyond omega so subdifferentials exist at the boundary
    int n_cells = sub.uniform_int(1, 3);
    std::vector<double> breaks = {-10.0};
    for (int b = 1; b < n_cells; ++b) breaks.push_back(h * sub.uniform_int(1, n - 2));
    breaks.push_back(10.0);
    std::sort(breaks.begin(), breaks.end());
    std::vector<AffineCell> cells;
    double level_shift = sub.uniform(-0.3, 0.3);
    Vec value_at_left = sub.vector(inst.dim_y, -0.4, 0.4);
    double cursor = breaks.front();
    Vec cursor_val = value_at_left;
    for (int cidx = 0; cidx + 1 < static_cast<int>(breaks.size()); ++cidx) {
      AffineCell cell;
      cell.region = Polyhedron::box(make_vec({breaks[cidx]}), make_vec({breaks[cidx + 1]}));
      Mat a(inst.dim_y, 1);
      for (int r = 0; r < inst.dim_y; ++r) a(r, 0) = sub.uniform(-0.8, 0.8);
      cell.a = a;
      // continuity: match the running value at the left breakpoint
      cell.b = cursor_val - a.col(0) * cursor + Vec::Constant(inst.dim_y, level_shift * 0);
      cells.push_back(cell);
      cursor_val = cells.back().a.col(0) * breaks[cidx + 1] + cells.back().b;
      cursor = breaks[cidx + 1];
    }
    inst.objective = GraphMap::pw_affine(cells);

    pick_regime(sub, opt.regime.empty() ? "b_i" : opt.regime, inst.epsilon, inst.delta);
    // keep sqrt(delta) < epsilon so the residual check stays in its interior case
    if (std::sqrt(inst.delta) >= inst.epsilon) inst.delta = 0.8 * inst.epsilon * inst.epsilon;

    // certified candidate by scan
    bool found = false;
    for (const Vec& x : inst.omega_grid) {
      Vec y = inst.objective.value(x);
      auto cert = certify_nondominated_K(inst, x, y);
      if (cert.verdict == Verdict::Certified) {
        out.candidate_x = x;
        out.candidate_y = y;
        found = true;
        break;
      }
    }
    if (!found) continue;
    auto sc = scalarization_condition(inst.cone_field, out.candidate_x, inst.epsilon, inst.k,
                                      inst.norm);
    if (!sc.holds) continue;  // generator post-check; constant k-cones pass
    return out;
  }
  throw Error("grid1d generation failed after 1000 attempts");
}

GeneratedInstance generate_grid2d(SplitRng rng, GeneratorOptions opt) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SplitRng sub = rng.fork(attempt ^ 0x32643264ULL);
    GeneratedInstance out;
    Instance& inst = out.inst;
    inst.dim_x = 2;
    inst.dim_y = 1 + sub.uniform_int(0, 2);
    inst.norm = Norm::Euclidean;
    int m = sub.uniform_int(5, 12);
    double h = 1.0 / (m - 1);
    inst.omega = Polyhedron::box(make_vec({0.0, 0.0}), make_vec({1.0, 1.0}));
    std::vector<FiniteGraphNode> nodes;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        Vec x = make_vec({i * h, j * h});
        inst.omega_grid.push_back(x);
        std::vector<Vec> vals;
        int nv = sub.uniform_int(1, 2);
        for (int v = 0; v < nv; ++v) vals.push_back(sub.vector(inst.dim_y, -0.6, 0.6));
        nodes.push_back({x, vals});
      }
    }
    inst.objective = GraphMap::finite(std::move(nodes), 2, inst.dim_y);

    Vec k = Vec::Ones(inst.dim_y) + sub.vector(inst.dim_y, -0.2, 0.2);
    inst.k = k / k.norm();
    inst.cone_field = ConeField::constant(cone_around(sub, inst.k, inst.dim_y), 2);
    pick_regime(sub, opt.regime.empty() ? "b_i" : opt.regime, inst.epsilon, inst.delta);

    for (const auto& node : inst.objective.nodes) {
      for (const Vec& y : node.values) {
        auto cert = certify_nondominated_K(inst, node.x, y);
        if (cert.verdict == Verdict::Certified) {
          out.candidate_x = node.x;
          out.candidate_y = y;
          return out;
        }
      }
    }
  }
  throw Error("grid2d generation failed after 1000 attempts");
}

GeneratedInstance generate_polyhedral2d(SplitRng rng, GeneratorOptions opt) {
  SplitRng sub = rng.fork(0x706f6c79);
  GeneratedInstance out;
  Instance& inst = out.inst;
  inst.dim_x = 2;
  inst.dim_y = 2;
  inst.norm = Norm::Max;
  double side = sub.uniform(1.0, 2.0);
  inst.omega = Polyhedron::box(make_vec({-side, -side}), make_vec({side, side}));
  double h = side / 4.0;
  for (double x = -side; x <= side + 1e-12; x += h) {
    for (double y = -side; y <= side + 1e-12; y += h) inst.omega_grid.push_back(make_vec({x, y}));
  }
  Mat a = Mat::Identity(2, 2);
  a(0, 0) = sub.uniform(0.8, 2.0);
  a(1, 1) = sub.uniform(0.8, 2.0);
  a(0, 1) = sub.uniform(0.0, 0.4);
  inst.objective = GraphMap::affine(
      a, Vec::Zero(2), Polyhedron::box(make_vec({-3 * side, -3 * side}),
                                       make_vec({3 * side, 3 * side})));
  inst.k = make_vec({1.0, 1.0});  // max-norm unit, interior of the orthant
  inst.cone_field = ConeField::constant(PolyCone::orthant(2), 2);
  pick_regime(sub, opt.regime.empty() ? "b_i" : opt.regime, inst.epsilon, inst.delta);
  // candidate: the box corner minimizing both objective coordinates
  out.candidate_x = make_vec({-side, -side});
  out.candidate_y = a * out.candidate_x;
  auto cert = certify_nondominated_K(inst, out.candidate_x, out.candidate_y);
  if (cert.verdict != Verdict::Certified)
    throw Error("polyhedral2d generator post-check failed");
  return out;
}

GeneratedInstance generate_lifted(SplitRng rng, GeneratorOptions opt) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SplitRng sub = rng.fork(attempt ^ 0x6c696674ULL);
    GeneratedInstance out;
    Instance& inst = out.inst;
    inst.dim_x = 1;
    inst.dim_y = 2;
    inst.norm = Norm::Euclidean;
    inst.vds_kind = VdsKind::Q;
    inst.omega = Polyhedron::whole_space(1);
    int n = sub.uniform_int(4, 8);
    std::vector<FiniteGraphNode> nodes;
    for (int i = 0; i < n; ++i) {
      Vec x = make_vec({static_cast<double>(i) / std::max(1, n - 1)});
      inst.omega_grid.push_back(x);
      std::vector<Vec> vals;
      int nv = sub.uniform_int(1, 2);
      for (int v = 0; v < nv; ++v) vals.push_back(sub.vector(2, -0.8, 0.8));
      nodes.push_back({x, vals});
    }
    inst.objective = GraphMap::finite(std::move(nodes), 1, 2);
    Vec k = Vec::Ones(2) + sub.vector(2, -0.2, 0.2);
    inst.k = k / k.norm();
    inst.cone_field = ConeField::constant(cone_around(sub, inst.k, 2), 2);
    pick_regime(sub, opt.regime.empty() ? "b_i" : opt.regime, inst.epsilon, inst.delta);

    for (const auto& node : inst.objective.nodes) {
      for (const Vec& y : node.values) {
        auto cert = certify_nondominated_Q(inst, node.x, y);
        if (cert.verdict == Verdict::Certified) {
          out.candidate_x = node.x;
          out.candidate_y = y;
          return out;
        }
      }
    }
  }
  throw Error("lifted generation failed after 1000 attempts");
}

}  // namespace

GeneratedInstance generate(std::uint64_t seed, Profile profile, GeneratorOptions opt) {
  SplitRng rng(seed);
  GeneratedInstance out;
  switch (profile) {
    case Profile::Grid1d: out = generate_grid1d(rng, opt); break;
    case Profile::Grid2d: out = generate_grid2d(rng, opt); break;
    case Profile::Polyhedral2d: out = generate_polyhedral2d(rng, opt); break;
    case Profile::Lifted: out = generate_lifted(rng, opt); break;
  }
  out.provenance = "seed=" + std::to_string(seed) + " profile=" + profile_name(profile) +
                   (opt.regime.empty() ? "" : " regime=" + opt.regime);
  out.inst.check_basic();
  return out;
}

}  // namespace vardom
