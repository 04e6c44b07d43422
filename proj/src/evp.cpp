#include "vardom/evp.hpp"

#include "vardom/solutions.hpp"

#include <algorithm>

namespace vardom {

bool metric_axioms_ok(const FiniteMetricSpace& m, SplitRng& rng, int triples, double tol) {
  const int n = static_cast<int>(m.points.size());
  if (n == 0) return true;
  SplitRng local = rng.fork(0x6d657472);
  for (int t = 0; t < triples; ++t) {
    const Vec& a = m.points[local.uniform_int(0, n - 1)];
    const Vec& b = m.points[local.uniform_int(0, n - 1)];
    const Vec& c = m.points[local.uniform_int(0, n - 1)];
    double ab = m.dist(a, b), ba = m.dist(b, a);
    if (std::abs(ab - ba) > tol) return false;
    if (ab < -tol) return false;
    if ((a - b).cwiseAbs().maxCoeff() <= tol && ab > tol) return false;
    if (m.dist(a, c) > ab + m.dist(b, c) + tol) return false;
  }
  return true;
}

EvpResult evp_finite(const FiniteMetricSpace& m, const std::vector<double>& f,
                     int start_index, double eps, double lambda, double tol) {
  const int n = static_cast<int>(m.points.size());
  if (n == 0) throw Error("evp_finite: empty space");
  if (f.size() != static_cast<std::size_t>(n)) throw DimMismatch("evp_finite: table size");
  if (start_index < 0 || start_index >= n) throw Error("evp_finite: bad start index");
  if (!std::isfinite(f[start_index])) throw Error("evp_finite: f(x_tilde) not finite");
  double fmin = kInf;
  for (double v : f) fmin = std::min(fmin, v);
  if (f[start_index] > fmin + eps + tol)
    throw HypothesisError("evp_finite: start point is not an eps-minimizer");

  int cur = start_index;
  int iters = 0;
  for (;;) {
    // weak improvers of the perturbed function at the current point
    int best = -1;
    double best_val = kInf;
    for (int i = 0; i < n; ++i) {
      if (i == cur || !std::isfinite(f[i])) continue;
      double val = f[i] + lambda * m.dist(m.points[i], m.points[cur]);
      if (val <= f[cur] + tol) {
        if (val < best_val - tol ||
            (val < best_val + tol && (best < 0 || lex_less(m.points[i], m.points[best])))) {
          best = i;
          best_val = val;
        }
      }
    }
    if (best < 0) break;
    cur = best;
    ++iters;
    if (iters > 4 * n + 16) throw Error("evp_finite: descent failed to terminate");
  }

  EvpResult res;
  res.index = cur;
  res.x_bar = m.points[cur];
  res.iterations = iters;
  double d_start = m.dist(m.points[cur], m.points[start_index]);
  res.decrease_residual = f[cur] + lambda * d_start - f[start_index];
  res.decrease_ok = res.decrease_residual <= tol;
  res.locality_residual = d_start - eps / lambda;
  res.locality_ok = res.locality_residual <= tol;
  double margin = kInf;
  for (int i = 0; i < n; ++i) {
    if (i == cur || !std::isfinite(f[i])) continue;
    margin = std::min(margin, f[i] + lambda * m.dist(m.points[i], m.points[cur]) - f[cur]);
  }
  res.strict_min_margin = margin;
  res.strict_min_ok = margin > tol;  // exhaustive scan, never assumed
  return res;
}

EvpVdsResult evp_vds(const Instance& inst, const Vec& x_tilde, double eps_prime,
                     bool check_hypotheses) {
  inst.check_basic();
  if (inst.vds_kind != VdsKind::K) throw Error("evp_vds requires a K-instance");
  if (!inst.objective.single_valued()) throw Error("evp_vds requires single-valued objective");
  if (!(eps_prime > 0 && eps_prime < inst.epsilon))
    throw HypothesisError("evp_vds: eps_prime must lie in (0, epsilon)");
  Vec f_tilde = inst.objective.value(x_tilde);

  if (check_hypotheses) {
    auto cert = certify_nondominated_K(inst, x_tilde, f_tilde);
    if (cert.verdict != Verdict::Certified)
      throw HypothesisError("evp_vds: candidate is not (eps,delta,k)-nondominated");
    auto sc = scalarization_condition(inst.cone_field, x_tilde, inst.epsilon, inst.k, inst.norm);
    if (!sc.holds) throw HypothesisError("evp_vds: scalarization condition fails on the ball");
  }

  EvpVdsResult out;
  // closed ball here, open ball in the certifier
  for (const Vec& g : inst.omega_grid) {
    if (!inst.omega.contains(g, inst.tol)) continue;
    if (norm_of(Vec(g - x_tilde), inst.norm) <= eps_prime + inst.tol) out.grid.push_back(g);
  }
  std::sort(out.grid.begin(), out.grid.end(),
            [](const Vec& a, const Vec& b) { return lex_less(a, b); });
  if (out.grid.empty()) throw Error("evp_vds: empty grid ball");

  int start = -1;
  out.scalarization.reserve(out.grid.size());
  for (int i = 0; i < static_cast<int>(out.grid.size()); ++i) {
    const Vec& x = out.grid[i];
    if ((x - x_tilde).cwiseAbs().maxCoeff() <= inst.tol) start = i;
    auto s = s_vds(inst.objective, inst.cone_field, f_tilde, inst.k, x);
    if (s.status == GwStatus::BracketExhausted || s.status == GwStatus::MinusInf)
      throw Error("evp_vds: scalarization unbounded; hypothesis certification was wrong");
    out.scalarization.push_back(s.status == GwStatus::Finite ? s.value : kInf);
  }
  if (start < 0) throw Error("evp_vds: x_tilde is not a grid point");

  out.g_at_start = out.scalarization[start];
  out.min_g = *std::min_element(out.scalarization.begin(), out.scalarization.end());
  out.lower_bound_ok = out.min_g >= -inst.delta - inst.tol;
  out.start_zero_ok = std::abs(out.g_at_start) <= inst.tol;
  if (!out.lower_bound_ok)
    throw Error("evp_vds: scalarization dips below -delta; certificate inconsistent");

  FiniteMetricSpace space;
  space.points = out.grid;
  space.norm = inst.norm;
  double lambda = std::sqrt(inst.delta);
  out.evp = evp_finite(space, out.scalarization, start, inst.delta, lambda, inst.tol);

  const Vec& xb = out.evp.x_bar;
  double g_xb = out.scalarization[out.evp.index];
  double dist_bt = norm_of(Vec(xb - x_tilde), inst.norm);
  out.residual_i = g_xb + lambda * dist_bt - out.g_at_start;
  out.conclusion_i = out.residual_i <= inst.tol;
  out.residual_ii = dist_bt - std::min(lambda, eps_prime);  // lambda = sqrt(delta)
  out.conclusion_ii = out.residual_ii <= inst.tol;
  double margin = kInf;
  for (int i = 0; i < static_cast<int>(out.grid.size()); ++i) {
    if (i == out.evp.index || !std::isfinite(out.scalarization[i])) continue;
    margin = std::min(margin, out.scalarization[i] +
                                  lambda * norm_of(Vec(out.grid[i] - xb), inst.norm) - g_xb);
  }
  out.residual_iii = margin;
  out.conclusion_iii = margin > inst.tol;
  return out;
}

}  // namespace vardom
