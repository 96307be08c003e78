#pragma once

// Flat-torus geometry on T^d = R^d / Z^d with the quotient-Euclidean metric.
// All points carry canonical representatives in [0,1)^d; the metric is the
// minimum over integer shifts k in {-1,0,1}^d, which is exact for canonical
// representatives.

#include <cstddef>
#include <vector>

#include "error.hpp"

namespace folia {

using Vec = std::vector<double>;

inline constexpr double kGeomTol = 1e-9;

struct TorusPoint {
  Vec coords;  // each in [0,1)

  int dim() const { return static_cast<int>(coords.size()); }
  bool operator==(const TorusPoint&) const = default;
};

struct PointSet {
  std::vector<TorusPoint> elems;
};

// Componentwise reduction mod 1 into [0,1). Rejects non-finite entries.
TorusPoint wrap(const Vec& v);

// Nearest-image displacement y - x as a vector in (-1/2, 1/2]^d ... the
// representative of minimal Euclidean norm among shifts in {-1,0,1}^d.
Vec torus_displacement(const TorusPoint& x, const TorusPoint& y);

double torus_dist(const TorusPoint& x, const TorusPoint& y);

// Circle distance of two scalars mod 1.
double circle_dist(double a, double b);

double dist_point_to_set(const TorusPoint& a, const PointSet& b);

// D(A,B) = max of the two directed sup-inf distances.
double hausdorff_dist(const PointSet& a, const PointSet& b);

double norm(const Vec& v);
double dot(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double s);

}  // namespace folia
