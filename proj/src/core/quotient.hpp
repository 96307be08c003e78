#pragma once

// Quotient dynamics for foliations with compact (rational linear) leaves:
// the leaf space is a lower-dimensional torus and the map descends to it.

#include <cstdint>

#include "grid.hpp"
#include "orbit.hpp"

namespace folia {

struct QuotientSystem {
  LinearFoliation base_foliation;
  ToralMap quotient_map;      // acts on the transverse torus T^(d-c)
  double commute_defect = 0.0;  // max sampled d(Q(pi x), pi(f x))
};

// Wraps the induced transverse map with a sampled commuting-diagram
// certificate. Throws NotInvariant when f does not preserve the foliation
// and Unsupported for the one-leaf foliation (the quotient is a point).
QuotientSystem build_quotient_system(const ToralMap& f, const LinearFoliation& fol,
                                     int samples_per_axis = 16);

// Projection of a point to the quotient torus.
TorusPoint quotient_point(const QuotientSystem& qs, const TorusPoint& x);

struct TransferTrial {
  bool shadow_found = false;
  double downstairs_step_defect = 0.0;  // pseudo-orbit defect of the projected shadow
  double downstairs_offset = 0.0;       // sup distance to the projected target
};

struct TransferReport {
  std::vector<TransferTrial> trials;
  size_t shadow_failures = 0;
  double worst_step_defect = 0.0;
  double worst_offset = 0.0;
  bool pass = false;  // every found shadow projects to an eps-tracking pseudo-orbit
};

// Random delta-pseudo-orbits of f are shadowed upstairs with the foliated
// engine; both sequences are projected and the projection of the shadow must
// eps-track the projected pseudo-orbit as a pseudo-orbit of the quotient map.
TransferReport transfer_shadowing_check(const QuotientSystem& qs, const ToralMap& f,
                                        double delta, double eps, const Grid& grid,
                                        int trials, int length, uint64_t seed);

}  // namespace folia
