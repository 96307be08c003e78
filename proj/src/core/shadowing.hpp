#pragma once

// Foliated shadowing at grid scale: a layered-DAG search over grid cells
// (exhaustive at the resolution, so a miss is a certificate), followed by a
// continuous within-tube refinement that tightens the discrete path toward
// the orbit-form step condition. A closed-form hyperbolic shadowing oracle
// validates the search on linear Anosov examples.

#include <optional>

#include "grid.hpp"
#include "orbit.hpp"

namespace folia {

struct ShadowProblem {
  const ToralMap* map = nullptr;
  const LinearFoliation* foliation = nullptr;
  Trajectory target;       // the chain to shadow
  double eps = 0.0;        // shadow radius
  const Grid* grid = nullptr;
  double leaf_tol = kGeomTol;
  int refine_sweeps = 200;
};

struct ShadowSolution {
  Trajectory trajectory;
  std::vector<double> step_defects;  // chain defect per step at radius eps
  double max_offset = 0.0;           // max_k d(x_k, y_k)
  bool resolution_limited = false;   // eps <= cell diameter
};

struct ShadowSearchStats {
  size_t layers = 0;
  size_t states = 0;
  size_t edges = 0;
};

std::optional<ShadowSolution> finite_shadow(const ShadowProblem& p,
                                            ShadowSearchStats* stats = nullptr);

// All shadow solutions anchored at the distinct feasible cells of the layer
// holding trajectory index 0 (used to enumerate H(x) candidates).
std::vector<ShadowSolution> finite_shadow_all_anchors(const ShadowProblem& p);

// Periodize a chain loop from x to itself over [-n, n] and shadow it.
std::optional<ShadowSolution> shadow_periodized(const ToralMap& f,
                                                const LinearFoliation& fol,
                                                const Trajectory& loop, double eps,
                                                long long n, const Grid& grid,
                                                double leaf_tol = kGeomTol);

// Continuous refinement of a chain loop: the first and last points stay
// pinned, the interior points move freely to shrink the step defects (the
// plaque radius gives the in-leaf slack). Turns a coarse cell-center loop
// into a genuine low-defect chain through its start point.
Trajectory refine_loop(const ToralMap& f, const LinearFoliation& fol,
                       const Trajectory& loop, double plaque_radius,
                       int sweeps = 100, double leaf_tol = kGeomTol);

// Exact orbit shadowing a pseudo-orbit of a hyperbolic linear map, obtained
// by distributing the per-step errors along the stable eigendirections
// forward and the unstable ones backward.
Trajectory exact_shadow_hyperbolic(const IntMat& matrix, const Trajectory& pseudo);

}  // namespace folia
