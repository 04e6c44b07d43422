#include "vardom/scalarize.hpp"

namespace vardom {

namespace {

// Generic bisection path on an upper-closed feasible t-set {t : member(t)}.
// recession_ok distinguishes genuine +inf from bracket exhaustion.
template <typename MemberFn>
GwResult bisect_inf(const MemberFn& member, bool recession_ok, const GwOptions& opt) {
  GwResult res;
  res.closed_form = false;
  double hi = 1.0;
  while (hi <= opt.t_max && !member(hi)) hi *= 2.0;
  if (hi > opt.t_max) {
    if (member(opt.t_max)) {
      hi = opt.t_max;
    } else {
      res.status = recession_ok ? GwStatus::PlusInf : GwStatus::BracketExhausted;
      res.value = kInf;
      return res;
    }
  }
  double lo = -1.0;
  while (lo >= -opt.t_max && member(lo)) lo *= 2.0;
  if (lo < -opt.t_max) {
    res.status = GwStatus::MinusInf;
    res.value = -kInf;
    return res;
  }
  for (int i = 0; i < opt.max_iter && hi - lo > opt.tol; ++i) {
    double mid = 0.5 * (lo + hi);
    if (member(mid))
      hi = mid;
    else
      lo = mid;
  }
  res.value = hi;
  res.status = GwStatus::Finite;
  return res;
}

}  // namespace

GwResult gerstewitz(const Vec& k, const PolyCone& r, const Vec& y, GwOptions opt) {
  if (k.size() != r.dim || y.size() != r.dim) throw DimMismatch("gerstewitz dims");
  // t k - y in R  <=>  t <d,k> >= <d,y> for every dual generator d
  double min_pair = kInf, max_pair = -kInf;
  for (const Vec& d : r.dual) {
    double p = d.dot(k);
    min_pair = std::min(min_pair, p);
    max_pair = std::max(max_pair, p);
  }
  if (!r.dual.empty() && min_pair >= -kTol && max_pair > kTol) {
    GwResult res;
    res.closed_form = true;
    double lo = -kInf;
    for (const Vec& d : r.dual) {
      double p = d.dot(k);
      double q = d.dot(y);
      if (p > kTol) {
        lo = std::max(lo, q / p);
      } else if (q > kTol) {
        // <d,k> = 0 branch infeasible for every t
        res.status = GwStatus::PlusInf;
        res.value = kInf;
        return res;
      }
    }
    res.value = lo;
    res.status = GwStatus::Finite;
    return res;
  }
  bool recession_ok = cone_contains_dual(r, k, kTol);
  return bisect_inf([&](double t) { return cone_contains_dual(r, Vec(t * k - y), 10 * kTol); },
                    recession_ok, opt);
}

GwResult gerstewitz(const Vec& k, const Polyhedron& r, const Vec& y, GwOptions opt) {
  if (k.size() != r.dim || y.size() != r.dim) throw DimMismatch("gerstewitz dims");
  // recession cone of {z : <n,z> <= o} is {u : <n,u> <= 0}
  bool recession_ok = true;
  for (const auto& h : r.halfspaces) {
    if (h.normal.dot(k) > kTol) recession_ok = false;
  }
  return bisect_inf([&](double t) { return r.contains(Vec(t * k - y), 10 * kTol); },
                    recession_ok, opt);
}

GwResult s_vds(const GraphMap& f, const ConeField& kf, const Vec& a, const Vec& k,
               const Vec& x, GwOptions opt) {
  if (!f.single_valued()) throw Error("s_vds requires a single-valued objective");
  Vec fx = f.value(x);
  const PolyCone& cone = cone_at(kf, x);
  return gerstewitz(k, cone, Vec(fx - a), opt);
}

double t_min(const Vec& u, const Vec& x, const std::vector<Vec>& pts, double parallel_tol) {
  if (pts.empty()) throw Error("t_min over empty set");
  double un2 = u.squaredNorm();
  if (un2 <= 0) throw Error("t_min: zero direction");
  double best = kInf;
  for (const Vec& a : pts) {
    Vec w = a - x;
    double t = w.dot(u) / un2;
    if (t < -parallel_tol) continue;
    if ((w - t * u).norm() > parallel_tol) continue;
    best = std::min(best, std::max(t, 0.0));
  }
  return best;
}

double t_min(const Vec& u, const Vec& x, const Polyhedron& a, double tol) {
  return ray_hit(a, x, u, tol);
}

}  // namespace vardom
