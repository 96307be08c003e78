#include "torus.hpp"

#include <cmath>

namespace folia {

TorusPoint wrap(const Vec& v) {
  TorusPoint p;
  p.coords.reserve(v.size());
  for (double c : v) {
    if (!std::isfinite(c)) fail(ErrorCode::InvalidInput, "wrap: non-finite coordinate");
    double r = c - std::floor(c);
    if (r >= 1.0) r = 0.0;  // guard against floor rounding at the boundary
    p.coords.push_back(r);
  }
  return p;
}

double circle_dist(double a, double b) {
  double d = std::fabs(a - b);
  d = d - std::floor(d);
  return std::min(d, 1.0 - d);
}

Vec torus_displacement(const TorusPoint& x, const TorusPoint& y) {
  if (x.dim() != y.dim())
    fail(ErrorCode::DimMismatch, "torus_displacement: dimension mismatch");
  Vec d(x.coords.size());
  for (size_t i = 0; i < d.size(); ++i) {
    double u = y.coords[i] - x.coords[i];
    // u in (-1,1); the minimal representative is u, u+1 or u-1.
    if (u > 0.5) u -= 1.0;
    else if (u <= -0.5) u += 1.0;
    d[i] = u;
  }
  return d;
}

double torus_dist(const TorusPoint& x, const TorusPoint& y) {
  Vec d = torus_displacement(x, y);
  return norm(d);
}

double dist_point_to_set(const TorusPoint& a, const PointSet& b) {
  if (b.elems.empty()) fail(ErrorCode::EmptySet, "dist_point_to_set: empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : b.elems) best = std::min(best, torus_dist(a, p));
  return best;
}

double hausdorff_dist(const PointSet& a, const PointSet& b) {
  if (a.elems.empty() || b.elems.empty())
    fail(ErrorCode::EmptySet, "hausdorff_dist: empty set");
  double d_ab = 0.0, d_ba = 0.0;
  for (const auto& p : a.elems) d_ab = std::max(d_ab, dist_point_to_set(p, b));
  for (const auto& p : b.elems) d_ba = std::max(d_ba, dist_point_to_set(p, a));
  return std::max(d_ab, d_ba);
}

double norm(const Vec& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec scale(const Vec& a, double s) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

}  // namespace folia
