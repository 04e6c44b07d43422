// vardom: batch driver for the vds certification toolbox.
// Exit codes: 0 certified/success, 1 refuted (witness in the report),
// 2 hypothesis failure, 3 internal error, 64 usage error.

#include "vardom/constants.hpp"
#include "vardom/evp.hpp"
#include "vardom/instances_io.hpp"
#include "vardom/nonsmooth.hpp"
#include "vardom/openness.hpp"
#include "vardom/reduction.hpp"
#include "vardom/solutions.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

namespace {

using namespace vardom;
using ordered = nlohmann::ordered_json;

constexpr int kExitCertified = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitHypothesis = 2;
constexpr int kExitInternal = 3;

ordered vec_json(const Vec& v) {
  ordered a = ordered::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec parse_components(const std::string& s) {
  std::vector<double> vals;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      vals.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) vals.push_back(std::stod(cur));
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

// "x;y" with comma-separated blocks
std::pair<Vec, std::optional<Vec>> parse_point(const std::string& s) {
  auto semi = s.find(';');
  if (semi == std::string::npos) return {parse_components(s), std::nullopt};
  return {parse_components(s.substr(0, semi)), parse_components(s.substr(semi + 1))};
}

void emit(const ordered& report, bool as_json) {
  if (as_json) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  for (auto it = report.begin(); it != report.end(); ++it)
    std::cout << it.key() << ": " << it.value().dump() << "\n";
}

struct PointArgs {
  std::string point;
  Vec resolve_x(const LoadedInstance& li) const {
    if (!point.empty()) return parse_point(point).first;
    if (li.candidate_x) return *li.candidate_x;
    throw Error("no --point given and the instance carries no candidate");
  }
  Vec resolve_y(const LoadedInstance& li) const {
    if (!point.empty()) {
      auto [x, y] = parse_point(point);
      if (y) return *y;
      if (li.inst.objective.single_valued()) return li.inst.objective.value(x);
      throw Error("set-valued instance requires --point \"x;y\"");
    }
    if (li.candidate_y) return *li.candidate_y;
    throw Error("no --point given and the instance carries no candidate");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vardom: certification toolbox for variable domination structures"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable report on stdout");

  auto* gen_cmd = app.add_subcommand("generate", "emit a seeded instance file");
  std::uint64_t seed = 0;
  std::string profile = "grid1d", regime, out_path = "instance.json";
  gen_cmd->add_option("--seed", seed, "64-bit seed")->required();
  gen_cmd->add_option("--profile", profile, "grid1d|grid2d|polyhedral2d|lifted");
  gen_cmd->add_option("--regime", regime, "b_i|b_ii");
  gen_cmd->add_option("--out", out_path, "output path");

  auto* cert_cmd = app.add_subcommand("certify", "run the brute-force certifier");
  std::string inst_path;
  PointArgs pt;
  std::string concept_name = "nondominated";
  double tol_override = -1;
  cert_cmd->add_option("--instance", inst_path, "instance file")->required();
  cert_cmd->add_option("--point", pt.point, "candidate \"x;y\" (components comma-separated)");
  cert_cmd->add_option("--concept", concept_name, "nondominated|efficient|pareto");
  cert_cmd->add_option("--tol", tol_override, "membership tolerance override");

  auto* evp_cmd = app.add_subcommand("evp", "run the variational-principle pipeline");
  double eps_prime = -1;
  evp_cmd->add_option("--instance", inst_path, "instance file")->required();
  evp_cmd->add_option("--point", pt.point, "candidate x");
  evp_cmd->add_option("--eps-prime", eps_prime, "localization radius in (0, epsilon)");
  evp_cmd->add_option("--tol", tol_override, "tolerance override");

  auto* nc32_cmd = app.add_subcommand("nc32", "first-order residual check after the EVP");
  nc32_cmd->add_option("--instance", inst_path, "instance file")->required();
  nc32_cmd->add_option("--point", pt.point, "candidate x");
  nc32_cmd->add_option("--eps-prime", eps_prime, "localization radius");

  auto* nck_cmd = app.add_subcommand("nck", "necessary-condition witness search (K form)");
  nck_cmd->add_option("--instance", inst_path, "instance file")->required();
  nck_cmd->add_option("--point", pt.point, "candidate \"x;y\"");
  auto* ncq_cmd = app.add_subcommand("ncq", "necessary-condition witness search (Q form)");
  ncq_cmd->add_option("--instance", inst_path, "instance file")->required();
  ncq_cmd->add_option("--point", pt.point, "candidate \"x;y\"");

  auto* open_cmd = app.add_subcommand("openness", "directional-openness harnesses");
  std::string mode = "harness";
  double radius = 0.5, a_frac = 0.5;
  int rho_count = 4;
  open_cmd->add_option("--instance", inst_path, "instance file")->required();
  open_cmd->add_option("--point", pt.point, "candidate \"x;y\"");
  open_cmd->add_option("--mode", mode, "harness|incompat");
  open_cmd->add_option("--r", radius, "injectivity radius");
  open_cmd->add_option("--afrac", a_frac, "modulus as a fraction of c");
  open_cmd->add_option("--rho-count", rho_count, "rho grid size");

  auto* const_cmd = app.add_subcommand("constants", "scalar constants calculus");
  double c_eps = 0.2, c_delta = 0.1;
  const_cmd->add_option("--epsilon", c_eps, "epsilon");
  const_cmd->add_option("--delta", c_delta, "delta");

  auto* red_cmd = app.add_subcommand("reduce", "lift a Q-instance to the K form");
  std::string red_out = "lifted.json";
  red_cmd->add_option("--instance", inst_path, "instance file")->required();
  red_cmd->add_option("--point", pt.point, "candidate \"x;y\"");
  red_cmd->add_option("--out", red_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 64;
  }

  try {
    ordered report;
    if (gen_cmd->parsed()) {
      auto gen = generate(seed, profile_from_name(profile), {.regime = regime});
      save_instance(out_path, gen.inst, &gen.candidate_x, &gen.candidate_y, gen.provenance);
      report["command"] = "generate";
      report["out"] = out_path;
      report["provenance"] = gen.provenance;
      report["candidate_x"] = vec_json(gen.candidate_x);
      emit(report, as_json);
      return kExitCertified;
    }

    if (const_cmd->parsed()) {
      report["command"] = "constants";
      auto regime_v = constants::classify(c_eps, c_delta);
      report["regime"] = regime_v == constants::Regime::BI    ? "b_i"
                         : regime_v == constants::Regime::BII ? "b_ii"
                                                              : "infeasible";
      auto sol = constants::solve_constants_system(c_eps, c_delta);
      ordered intervals = ordered::array();
      for (const auto& iv : sol) {
        ordered o;
        o["lo"] = iv.lo;
        if (iv.hi == kInf)
          o["hi"] = "inf";
        else
          o["hi"] = iv.hi;
        intervals.push_back(o);
      }
      report["solution_intervals"] = intervals;
      if (c_delta < 0.25) report["phi_inv_delta"] = constants::phi_inv(c_delta);
      if (!sol.empty()) {
        double c = sol.front().lo + 1.0;
        report["a_bar"] = constants::a_bar(c);
        report["m_a_bar"] = constants::m_a_bar(c);
        report["theta_at_c"] = constants::theta_bound(c, c, constants::a_bar(c));
      }
      emit(report, as_json);
      return kExitCertified;
    }

    LoadedInstance li = load_instance(inst_path);
    if (tol_override > 0) li.inst.tol = tol_override;

    if (cert_cmd->parsed()) {
      report["command"] = "certify";
      report["concept"] = concept_name;
      Vec x = pt.resolve_x(li), y = pt.resolve_y(li);
      Certificate cert;
      if (concept_name == "nondominated") {
        cert = li.inst.vds_kind == VdsKind::K ? certify_nondominated_K(li.inst, x, y)
                                              : certify_nondominated_Q(li.inst, x, y);
      } else if (concept_name == "efficient") {
        cert = certify_efficient(li.inst, x, y);
      } else if (concept_name == "pareto") {
        cert = certify_pareto(li.inst,
                              cone_at(li.inst.cone_field,
                                      li.inst.vds_kind == VdsKind::K ? x : y),
                              x, y);
      } else {
        throw Error("unknown concept: " + concept_name);
      }
      report["verdict"] = cert.verdict == Verdict::Certified ? "certified" : "refuted";
      report["checked"] = cert.checked_count;
      if (cert.witness) {
        ordered w;
        w["x"] = vec_json(cert.witness->x);
        w["y"] = vec_json(cert.witness->y);
        w["cone_element"] = vec_json(cert.witness->cone_element);
        w["revalidated"] = revalidate_witness(li.inst, x, y, *cert.witness);
        report["witness"] = w;
      }
      emit(report, as_json);
      return cert.verdict == Verdict::Certified ? kExitCertified : kExitRefuted;
    }

    if (evp_cmd->parsed() || nc32_cmd->parsed()) {
      Vec x = pt.resolve_x(li);
      double ep = eps_prime > 0 ? eps_prime : 0.9 * li.inst.epsilon;
      auto out = evp_vds(li.inst, x, ep);
      report["command"] = evp_cmd->parsed() ? "evp" : "nc32";
      report["x_bar"] = vec_json(out.evp.x_bar);
      report["residual_decrease"] = out.residual_i;
      report["residual_locality"] = out.residual_ii;
      report["strict_min_margin"] = out.residual_iii;
      report["scalarization_at_start"] = out.g_at_start;
      bool ok = out.conclusion_i && out.conclusion_ii && out.conclusion_iii &&
                out.lower_bound_ok && out.start_zero_ok;
      if (nc32_cmd->parsed()) {
        SplitRng rng(2026);
        auto rep32 = first_order_residual_check(li.inst, x, out, rng);
        if (!rep32.hypothesis_ok) {
          report["nc32"] = "hypothesis failure (case i direction condition)";
          emit(report, as_json);
          return kExitHypothesis;
        }
        report["nc32_case"] = rep32.case_i ? "i" : "ii";
        report["nc32_residual"] = rep32.residual;
        report["nc32_bound"] = rep32.bound;
        report["nc32_evidence"] = rep32.evidence == Evidence::Exact ? "exact" : "sampled";
        ok = ok && rep32.ok;
      }
      report["verdict"] = ok ? "certified" : "refuted";
      emit(report, as_json);
      return ok ? kExitCertified : kExitRefuted;
    }

    if (nck_cmd->parsed() || ncq_cmd->parsed()) {
      Vec x = pt.resolve_x(li), y = pt.resolve_y(li);
      auto rep = nck_cmd->parsed() ? necessary_cond_K(li.inst, x, y)
                                   : necessary_cond_Q(li.inst, x, y);
      report["command"] = nck_cmd->parsed() ? "nck" : "ncq";
      if (!rep.hypotheses_ok) {
        ordered fails = ordered::array();
        for (const auto& f : rep.failures) fails.push_back(f);
        report["hypothesis_failures"] = fails;
        emit(report, as_json);
        return kExitHypothesis;
      }
      report["found"] = rep.found;
      report["combos_tried"] = rep.combos_tried;
      if (rep.found) {
        report["y_star"] = vec_json(rep.witness.y_star);
        report["z_star"] = vec_json(rep.witness.z_star);
        report["residual"] = vec_json(rep.witness.residual);
        report["revalidated"] = rep.revalidated;
      }
      emit(report, as_json);
      return rep.found ? kExitCertified : kExitRefuted;
    }

    if (open_cmd->parsed()) {
      Vec x = pt.resolve_x(li), y = pt.resolve_y(li);
      report["command"] = "openness";
      report["mode"] = mode;
      if (mode == "incompat") {
        auto rep = incompatibility_check(li.inst, x, y);
        report["nondominated"] = rep.nondominated;
        ordered refs = ordered::array();
        for (bool b : rep.coverage_refuted) refs.push_back(b);
        report["coverage_refuted"] = refs;
        report["contradiction"] = rep.contradiction;
        emit(report, as_json);
        return rep.contradiction ? kExitRefuted : kExitCertified;
      }
      auto rep = li.inst.vds_kind == VdsKind::K
                     ? sum_openness_harness(li.inst, x, y, radius, a_frac, rho_count)
                     : lifted_openness_harness(li.inst, x, y, radius, a_frac, rho_count);
      if (!rep.hypotheses_ok) {
        report["failure"] = rep.failure;
        emit(report, as_json);
        return kExitHypothesis;
      }
      report["c"] = rep.c;
      report["theta"] = rep.theta;
      ordered cov = ordered::array();
      for (bool b : rep.covered) cov.push_back(b);
      report["covered"] = cov;
      emit(report, as_json);
      return rep.all_covered ? kExitCertified : kExitRefuted;
    }

    if (red_cmd->parsed()) {
      Vec x = pt.resolve_x(li), y = pt.resolve_y(li);
      auto lifted = lift(li.inst, x, y);
      save_instance(red_out, lifted.inst, &lifted.lifted_x_bar, &y,
                    "lifted from " + inst_path);
      report["command"] = "reduce";
      report["out"] = red_out;
      report["lifted_nodes"] = lifted.inst.objective.nodes.size();
      emit(report, as_json);
      return kExitCertified;
    }
    return 64;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis failure: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
