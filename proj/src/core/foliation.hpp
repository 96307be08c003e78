#pragma once

// Linear foliations of T^d with rational (integer-vector) leaf directions.
// Leaves are compact subtori, so leaf identity, intrinsic leaf distance and
// plaque geometry are exactly computable. The two degenerate foliations
// (by points, by one leaf) are handled as separate kinds.

#include <limits>
#include <optional>

#include "linalg.hpp"
#include "torus.hpp"

namespace folia {

enum class FoliationKind { Points, Linear, WholeManifold };

class LinearFoliation {
 public:
  // Points / WholeManifold constructor.
  LinearFoliation(FoliationKind kind, int dim, double leaf_tol = kGeomTol);
  // Linear constructor from integer direction vectors spanning the leaf
  // direction V (made primitive; must be linearly independent, 0 < c < d
  // collapses to Points/WholeManifold are rejected only for c==0 or c==d).
  LinearFoliation(int dim, const std::vector<IntVec>& directions,
                  double leaf_tol = kGeomTol);

  FoliationKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int leaf_dim() const { return leaf_dim_; }
  int transverse_dim() const { return dim_ - leaf_dim_; }
  double leaf_tol() const { return leaf_tol_; }
  const std::vector<IntVec>& directions() const { return directions_; }
  const IntMat& transverse_basis() const { return transverse_; }
  const IntMat& leaf_lattice() const { return leaf_lattice_; }
  const Eigen::MatrixXd& leaf_frame() const { return leaf_frame_; }

  // Transverse coordinates (w_i . x mod 1); constant on leaves.
  Vec transverse_coords(const TorusPoint& x) const;
  // In-leaf coordinates of x against the orthonormal leaf frame.
  Vec tangent_coords(const TorusPoint& x) const;

  bool same_leaf(const TorusPoint& x, const TorusPoint& y, double tol) const;
  // Norm of the circle-wise transverse coordinate differences.
  double transverse_dist(const TorusPoint& x, const TorusPoint& y) const;

  // Geodesic distance inside the leaf; +infinity when the points are on
  // different leaves (tested at the construction leaf tolerance).
  double intrinsic_leaf_dist(const TorusPoint& x, const TorusPoint& y) const;

  Vec quotient_project(const TorusPoint& x) const;

 private:
  FoliationKind kind_;
  int dim_;
  int leaf_dim_;
  double leaf_tol_;
  std::vector<IntVec> directions_;
  IntMat transverse_;       // rows: basis of the annihilator lattice
  IntMat leaf_lattice_;     // rows: basis of Z^d intersected with V
  Eigen::MatrixXd leaf_frame_;  // d x c orthonormal in-leaf basis
  bool axis_aligned_ = false;
  std::vector<int> leaf_axes_, transverse_axes_;  // set when axis_aligned_
  int shift_range_ = 1;

  friend struct PlaqueDescriptor;
  friend double dist_to_plaque(const struct PlaqueDescriptor&, const TorusPoint&);
};

struct PlaqueDescriptor {
  TorusPoint center;
  const LinearFoliation* foliation;
  double radius;  // >= 0, intrinsic length
};

// Ambient distance from y to the closed plaque set.
double dist_to_plaque(const PlaqueDescriptor& p, const TorusPoint& y);

bool membership_in_plaque(const PlaqueDescriptor& p, const TorusPoint& y, double tol);

// 0 when y is in the plaque; transverse distance-to-plaque when y is off the
// leaf; in-leaf radius excess when on the leaf but outside the ball.
double plaque_membership_defect(const PlaqueDescriptor& p, const TorusPoint& y,
                                double leaf_tol);

}  // namespace folia
