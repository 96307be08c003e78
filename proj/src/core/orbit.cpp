#include "orbit.hpp"

namespace folia {

namespace {

void require_chain(const Trajectory& t) {
  if (t.points.size() < 2)
    fail(ErrorCode::InvalidInput, "trajectory needs at least two points");
}

}  // namespace

ChainReport is_pseudo_orbit(const ToralMap& f, const Trajectory& t, double delta) {
  if (delta < 0) fail(ErrorCode::InvalidInput, "is_pseudo_orbit: delta < 0");
  require_chain(t);
  ChainReport r;
  for (size_t i = 0; i + 1 < t.points.size(); ++i) {
    double d = torus_dist(f.apply(t.points[i]), t.points[i + 1]);
    if (d > r.worst_defect) {
      r.worst_defect = d;
      r.worst_index = (long long)i - t.index_offset;
    }
  }
  r.valid = r.worst_defect <= delta + kGeomTol;
  return r;
}

ChainReport is_foliated_orbit(const ToralMap& f, const LinearFoliation& fol,
                              const Trajectory& t, double eps, double tol) {
  if (eps < 0 || tol < 0) fail(ErrorCode::InvalidInput, "is_foliated_orbit: negative bound");
  require_chain(t);
  ChainReport r;
  for (size_t i = 0; i + 1 < t.points.size(); ++i) {
    PlaqueDescriptor plaque{t.points[i + 1], &fol, eps};
    TorusPoint image = f.apply(t.points[i]);
    double defect = plaque_membership_defect(plaque, image, tol);
    if (defect > r.worst_defect) {
      r.worst_defect = defect;
      r.worst_index = (long long)i - t.index_offset;
    }
    if (!membership_in_plaque(plaque, image, tol)) r.valid = false;
  }
  return r;
}

ChainReport is_foliated_chain(const ToralMap& f, const LinearFoliation& fol,
                              const Trajectory& t, double delta, double tol) {
  if (delta < 0) fail(ErrorCode::InvalidInput, "is_foliated_chain: delta < 0");
  require_chain(t);
  ChainReport r;
  for (size_t i = 0; i + 1 < t.points.size(); ++i) {
    PlaqueDescriptor plaque{t.points[i + 1], &fol, delta};
    double d = dist_to_plaque(plaque, f.apply(t.points[i]));
    if (d > r.worst_defect) {
      r.worst_defect = d;
      r.worst_index = (long long)i - t.index_offset;
    }
  }
  r.valid = r.worst_defect <= delta + tol + kGeomTol;
  return r;
}

Trajectory orbit_segment(const ToralMap& g, const TorusPoint& x, long long n) {
  if (n < 0) fail(ErrorCode::InvalidInput, "orbit_segment: negative horizon");
  Trajectory t;
  t.index_offset = n;
  t.points.resize((size_t)(2 * n + 1));
  t.points[(size_t)n] = x;
  TorusPoint fwd = x, bwd = x;
  for (long long k = 1; k <= n; ++k) {
    fwd = g.apply(fwd);
    bwd = g.apply_inverse(bwd);
    t.points[(size_t)(n + k)] = fwd;
    t.points[(size_t)(n - k)] = bwd;
  }
  return t;
}

}  // namespace folia
