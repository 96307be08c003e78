#pragma once

// The set-valued conjugating map H for a perturbed system g: H(x) collects
// the anchor points of shadow orbits of f tracking the g-orbit of x, with
// their witnessing orbit segments, plus the verifiers for the stability
// contract (identity closeness, step inclusion, valuation, continuity).

#include "shadowing.hpp"

namespace folia {

struct ImagePoint {
  TorusPoint y0;
  Trajectory witness;  // shadow segment over [-N, N] with witness.at_index(0) == y0
};

struct SemiSample {
  TorusPoint x;
  std::vector<ImagePoint> image;
  long long next_index = -1;  // position of the sample at g(x), -1 if absent
};

struct SetValuedMap {
  std::vector<SemiSample> samples;
  double eps_prime = 0.0;
  long long horizon = 0;
  double dedup_radius = 0.0;  // one grid cell diameter
};

// For each sample x: shadow the two-sided g-orbit segment of x with radius
// eps_prime; the image is the set of distinct shadow anchors (deduplicated at
// one cell diameter). Throws EmptyImage when some image would be empty.
SetValuedMap construct_semiconjugation(const ToralMap& f, const LinearFoliation& fol,
                                       const ToralMap& g, double eps_prime,
                                       long long horizon, const Grid& grid,
                                       const std::vector<TorusPoint>& sample_points);

struct StabilityReport {
  double c0_bound = 0.0;              // sup over x, y in H(x) of d(y, x)
  double step_inclusion_defect = 0.0; // worst dist(f(y), eps-plaque over H(g(x)))
  double valuation_defect = 0.0;
  size_t samples_checked = 0;
  size_t step_pairs_checked = 0;
  bool pass = false;
};

// Checks identity closeness and the step-inclusion clause, sample by sample.
// Samples without a stored successor are skipped for the step clause; if none
// has one the map was not built on a forward-closed set (MissingSample).
StabilityReport verify_stability_contract(const SetValuedMap& h, const ToralMap& f,
                                          const LinearFoliation& fol, double eps,
                                          double tol);

// Worst plaque-membership defect over samples x and pairs y, y' in H(x) of
// y' against the eps0-plaque of y.
double verify_valuation(const SetValuedMap& h, const LinearFoliation& fol,
                        double eps0, double leaf_tol = kGeomTol);

struct ContinuityRow {
  double delta = 0.0;
  double observed_rho = 0.0;
  size_t pair_count = 0;
  bool in_contract = true;  // false for delta beyond the contract range
  bool pass = true;
};

// Delta-sweep of the foliated-continuity clause: for each delta, the worst
// dist(y, eps0-plaque of y') over sample pairs with d(x, x') <= delta.
std::vector<ContinuityRow> verify_foliated_continuity(
    const SetValuedMap& h, const LinearFoliation& fol, double eps0, double rho,
    const std::vector<double>& delta_sweep, double contract_delta = 0.1,
    double tol = kGeomTol);

}  // namespace folia
