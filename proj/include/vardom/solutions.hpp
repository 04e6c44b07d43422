#pragma once

#include "vardom/instance.hpp"

namespace vardom {

// Brute-force certifiers for the solution concepts: exhaustive scans over the
// grid realization of B(x_bar, eps) with exact cone-membership arithmetic.
// delta = 0 recovers the exact (non-approximate) concepts.

struct CertifyOptions {
  // For the Q-concepts with delta = 0 the printed definitions differ on
  // whether 0 is excluded from Q(y); both variants are exposed.
  bool q_exclude_zero = true;
};

Certificate certify_nondominated_K(const Instance& inst, const Vec& x_bar, const Vec& y_bar);
Certificate certify_nondominated_Q(const Instance& inst, const Vec& x_bar, const Vec& y_bar,
                                   CertifyOptions opt = {});
Certificate certify_efficient(const Instance& inst, const Vec& x_bar, const Vec& y_bar);
// Pareto solution wrt a fixed cone; named entry point delegating to the
// efficient certifier with a constant field.
Certificate certify_pareto(const Instance& inst, const PolyCone& cone, const Vec& x_bar,
                           const Vec& y_bar);

// Grid points of the open ball B(center, radius) intersected with omega.
std::vector<Vec> ball_grid(const Instance& inst, const Vec& center, double radius);

// Candidate membership check (graph plus omega).
bool instance_on_graph(const Instance& inst, const Vec& x, const Vec& y);

// Re-check a refutation witness by direct membership arithmetic.
bool revalidate_witness(const Instance& inst, const Vec& x_bar, const Vec& y_bar,
                        const Witness& w);

}  // namespace vardom
