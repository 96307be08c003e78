#pragma once

// Finite trajectory segments and the verifiers for the four sequence
// classes: delta-pseudo-orbits and delta-chains (classical), and the
// plaque-relative orbit and chain conditions.

#include "foliation.hpp"
#include "toral_map.hpp"
#include "torus.hpp"

namespace folia {

struct Trajectory {
  std::vector<TorusPoint> points;  // length >= 2 for chain checks
  long long index_offset = 0;      // position of index 0 in two-sided segments

  size_t length() const { return points.size(); }
  const TorusPoint& at_index(long long k) const {
    return points.at((size_t)(k + index_offset));
  }
};

struct ChainReport {
  bool valid = true;
  long long worst_index = -1;
  double worst_defect = 0.0;
};

// d(f(x_i), x_{i+1}) <= delta for every consecutive pair.
ChainReport is_pseudo_orbit(const ToralMap& f, const Trajectory& t, double delta);

// f(x_k) lands in the eps-plaque of x_{k+1}.
ChainReport is_foliated_orbit(const ToralMap& f, const LinearFoliation& fol,
                              const Trajectory& t, double eps, double tol);

// dist(f(x_i), plaque(x_{i+1}, delta)) <= delta.
ChainReport is_foliated_chain(const ToralMap& f, const LinearFoliation& fol,
                              const Trajectory& t, double delta, double tol);

// Two-sided segment (g^k(x)) for k = -n..n with index_offset = n.
Trajectory orbit_segment(const ToralMap& g, const TorusPoint& x, long long n);

}  // namespace folia
