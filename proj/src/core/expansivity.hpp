#pragma once

// Finite-horizon expansivity experiments: exhaustive-at-grid-scale search for
// pairs of nearby orbits that refuse to separate (violation witnesses), and a
// sweep that certifies an expansivity constant usable as a budget elsewhere.

#include <cstdint>
#include <optional>

#include "grid.hpp"
#include "orbit.hpp"

namespace folia {

struct ExpansivityWitness {
  Trajectory x_orbit, y_orbit;  // exact orbits over [-N, N]
  double max_pair_dist = 0.0;   // max_k d(x_k, y_k), <= e
  double plaque_defect = 0.0;   // dist(y_0, eps0-plaque of x_0), > rho
};

struct ExpansivitySearchResult {
  std::optional<ExpansivityWitness> witness;
  bool timed_out = false;
  size_t explored_pairs = 0;
  size_t candidate_pairs = 0;  // pairs passing the static defect filter
  int resolution = 0;
  long long horizon = 0;
};

// Enumerates all pairs of grid-cell-seeded exact orbits with starting
// distance <= e and starting plaque defect > rho, and returns the first pair
// that stays e-close over [-N, N]. An empty result is evidence at this grid
// resolution and horizon, not a proof.
ExpansivitySearchResult expansivity_violation_search(
    const ToralMap& f, const LinearFoliation& fol, double e, double eps0,
    double rho, long long horizon, const Grid& grid,
    size_t pair_budget = SIZE_MAX);

struct ExpansivityCertificate {
  double e = 0.0;
  long long horizon = 0;
  size_t explored_pairs = 0;
};

// Shrinks e and grows the horizon until the violation search comes back
// empty; the floor max(2*rho, 2*cell_diameter) guards against vacuous
// certificates. Returns nullopt when nothing certifies within the budget.
std::optional<ExpansivityCertificate> uniform_expansivity_estimate(
    const ToralMap& f, const LinearFoliation& fol, double eps0, double rho,
    long long horizon_max, const Grid& grid, double e_init = 0.0,
    size_t pair_budget = SIZE_MAX);

}  // namespace folia
