#include "foliation.hpp"

#include <algorithm>
#include <cmath>

namespace folia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_unit_axis(const IntVec& v, int* axis) {
  int found = -1;
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    if (std::llabs(v[i]) != 1 || found >= 0) return false;
    found = (int)i;
  }
  if (found < 0) return false;
  *axis = found;
  return true;
}

}  // namespace

LinearFoliation::LinearFoliation(FoliationKind kind, int dim, double leaf_tol)
    : kind_(kind), dim_(dim), leaf_tol_(leaf_tol) {
  if (dim < 1 || dim > 3) fail(ErrorCode::InvalidInput, "foliation: dim must be 1..3");
  if (kind == FoliationKind::Linear)
    fail(ErrorCode::InvalidInput, "foliation: Linear kind needs direction vectors");
  leaf_dim_ = (kind == FoliationKind::Points) ? 0 : dim;
  if (kind == FoliationKind::Points) {
    transverse_ = IntMat(dim, IntVec(dim, 0));
    for (int i = 0; i < dim; ++i) transverse_[i][i] = 1;
  }
  leaf_frame_ = Eigen::MatrixXd::Zero(dim, 0);
}

LinearFoliation::LinearFoliation(int dim, const std::vector<IntVec>& directions,
                                 double leaf_tol)
    : kind_(FoliationKind::Linear), dim_(dim), leaf_tol_(leaf_tol) {
  if (dim < 1 || dim > 3) fail(ErrorCode::InvalidInput, "foliation: dim must be 1..3");
  if (directions.empty() || (int)directions.size() >= dim)
    fail(ErrorCode::InvalidInput, "foliation: Linear needs 0 < c < d directions");
  for (const auto& v : directions) {
    if ((int)v.size() != dim) fail(ErrorCode::InvalidInput, "foliation: direction length != dim");
    directions_.push_back(primitive(v));
  }
  leaf_dim_ = (int)directions_.size();
  {
    Eigen::MatrixXd dm(leaf_dim_, dim);
    for (int i = 0; i < leaf_dim_; ++i)
      for (int j = 0; j < dim; ++j) dm(i, j) = (double)directions_[i][j];
    if ((int)Eigen::FullPivLU<Eigen::MatrixXd>(dm).rank() != leaf_dim_)
      fail(ErrorCode::InvalidInput, "foliation: directions linearly dependent");
  }
  IntMat dir_rows(directions_.begin(), directions_.end());
  transverse_ = integer_nullspace(dir_rows, dim);
  leaf_lattice_ = integer_nullspace(transverse_, dim);
  leaf_frame_ = orthonormal_basis(directions_, dim);

  axis_aligned_ = true;
  std::vector<bool> is_leaf_axis(dim, false);
  for (const auto& v : directions_) {
    int axis;
    if (!is_unit_axis(v, &axis)) {
      axis_aligned_ = false;
      break;
    }
    is_leaf_axis[axis] = true;
  }
  if (axis_aligned_) {
    for (int i = 0; i < dim; ++i)
      (is_leaf_axis[i] ? leaf_axes_ : transverse_axes_).push_back(i);
  }
  long long max_col = 1;
  for (int j = 0; j < dim; ++j) {
    long long s = 0;
    for (const auto& v : directions_) s += std::llabs(v[j]);
    max_col = std::max(max_col, s);
  }
  shift_range_ = (int)max_col + 1;
}

Vec LinearFoliation::transverse_coords(const TorusPoint& x) const {
  if (kind_ == FoliationKind::WholeManifold)
    fail(ErrorCode::Unsupported, "transverse_coords: one-leaf foliation");
  if ((int)x.coords.size() != dim_) fail(ErrorCode::DimMismatch, "transverse_coords");
  if (kind_ == FoliationKind::Points) return x.coords;
  Vec t;
  t.reserve(transverse_.size());
  for (const auto& w : transverse_) {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += (double)w[j] * x.coords[j];
    s -= std::floor(s);
    if (s >= 1.0) s = 0.0;
    t.push_back(s);
  }
  return t;
}

Vec LinearFoliation::tangent_coords(const TorusPoint& x) const {
  if (kind_ == FoliationKind::WholeManifold)
    fail(ErrorCode::Unsupported, "tangent_coords: one-leaf foliation");
  Vec t(leaf_dim_, 0.0);
  for (int j = 0; j < leaf_dim_; ++j)
    for (int i = 0; i < dim_; ++i) t[j] += leaf_frame_(i, j) * x.coords[i];
  return t;
}

double LinearFoliation::transverse_dist(const TorusPoint& x, const TorusPoint& y) const {
  if (kind_ == FoliationKind::WholeManifold) return 0.0;
  Vec tx = transverse_coords(x), ty = transverse_coords(y);
  double s = 0.0;
  for (size_t i = 0; i < tx.size(); ++i) {
    double c = circle_dist(tx[i], ty[i]);
    s += c * c;
  }
  return std::sqrt(s);
}

bool LinearFoliation::same_leaf(const TorusPoint& x, const TorusPoint& y, double tol) const {
  if (kind_ == FoliationKind::WholeManifold) return true;
  return transverse_dist(x, y) <= tol;
}

double LinearFoliation::intrinsic_leaf_dist(const TorusPoint& x, const TorusPoint& y) const {
  if (kind_ == FoliationKind::WholeManifold) return torus_dist(x, y);
  if (kind_ == FoliationKind::Points)
    return torus_dist(x, y) <= leaf_tol_ ? 0.0 : kInf;
  if (!same_leaf(x, y, leaf_tol_)) return kInf;

  if (axis_aligned_) {
    double s = 0.0;
    for (int a : leaf_axes_) {
      double c = circle_dist(x.coords[a], y.coords[a]);
      s += c * c;
    }
    return std::sqrt(s);
  }

  // Enumerate integer shifts; displacements landing on V (up to the leaf
  // tolerance) are in-leaf representatives, the shortest projected one is
  // the geodesic length.
  Vec u = sub(y.coords, x.coords);
  const int K = shift_range_;
  double best = kInf;
  double best_res = kInf;
  IntVec k(dim_, -K);
  while (true) {
    Vec z = u;
    for (int i = 0; i < dim_; ++i) z[i] += (double)k[i];
    // project onto V
    Vec p(dim_, 0.0);
    for (int j = 0; j < leaf_dim_; ++j) {
      double c = 0.0;
      for (int i = 0; i < dim_; ++i) c += leaf_frame_(i, j) * z[i];
      for (int i = 0; i < dim_; ++i) p[i] += leaf_frame_(i, j) * c;
    }
    double res = norm(sub(z, p));
    if (res < best_res - 1e-12) {
      best_res = res;
      best = norm(p);
    } else if (res <= best_res + 1e-12) {
      best = std::min(best, norm(p));
    }
    int i = 0;
    while (i < dim_ && ++k[i] > K) k[i++] = -K;
    if (i == dim_) break;
  }
  return best;
}

Vec LinearFoliation::quotient_project(const TorusPoint& x) const {
  if (kind_ == FoliationKind::WholeManifold)
    fail(ErrorCode::Unsupported, "quotient_project: one-leaf foliation");
  return transverse_coords(x);
}

double dist_to_plaque(const PlaqueDescriptor& p, const TorusPoint& y) {
  const LinearFoliation& f = *p.foliation;
  if (p.radius < 0) fail(ErrorCode::InvalidInput, "dist_to_plaque: negative radius");
  switch (f.kind()) {
    case FoliationKind::Points:
      return torus_dist(p.center, y);
    case FoliationKind::WholeManifold:
      return std::max(0.0, torus_dist(p.center, y) - p.radius);
    case FoliationKind::Linear:
      break;
  }

  if (f.axis_aligned_) {
    double trans = 0.0;
    for (int a : f.transverse_axes_) {
      double c = circle_dist(p.center.coords[a], y.coords[a]);
      trans += c * c;
    }
    double inleaf = 0.0;
    for (int a : f.leaf_axes_) {
      double c = circle_dist(p.center.coords[a], y.coords[a]);
      inleaf += c * c;
    }
    double excess = std::max(0.0, std::sqrt(inleaf) - p.radius);
    return std::sqrt(trans + excess * excess);
  }

  // General case: minimize |z - clamp(P_V z)| over integer shifts, where the
  // clamp caps the in-leaf component at the plaque radius. Leaf-lattice
  // wrapping is covered by the shift enumeration.
  Vec u = sub(y.coords, p.center.coords);
  const int K = (int)std::ceil(p.radius) + 1;
  const int d = f.dim();
  double best = kInf;
  IntVec k(d, -K);
  while (true) {
    Vec z = u;
    for (int i = 0; i < d; ++i) z[i] += (double)k[i];
    Vec proj(d, 0.0);
    for (int j = 0; j < f.leaf_dim(); ++j) {
      double c = 0.0;
      for (int i = 0; i < d; ++i) c += f.leaf_frame_(i, j) * z[i];
      for (int i = 0; i < d; ++i) proj[i] += f.leaf_frame_(i, j) * c;
    }
    double pn = norm(proj);
    Vec v = (pn > p.radius && pn > 0.0) ? scale(proj, p.radius / pn) : proj;
    best = std::min(best, norm(sub(z, v)));
    int i = 0;
    while (i < d && ++k[i] > K) k[i++] = -K;
    if (i == d) break;
  }
  return best;
}

bool membership_in_plaque(const PlaqueDescriptor& p, const TorusPoint& y, double tol) {
  if (tol < 0) fail(ErrorCode::InvalidInput, "membership_in_plaque: tol < 0");
  const LinearFoliation& f = *p.foliation;
  if (f.kind() == FoliationKind::WholeManifold)
    return torus_dist(p.center, y) <= p.radius + tol;
  if (f.kind() == FoliationKind::Points) return torus_dist(p.center, y) <= tol;
  if (!f.same_leaf(p.center, y, tol)) return false;
  return f.intrinsic_leaf_dist(p.center, y) <= p.radius + tol;
}

double plaque_membership_defect(const PlaqueDescriptor& p, const TorusPoint& y,
                                double leaf_tol) {
  const LinearFoliation& f = *p.foliation;
  if (f.kind() == FoliationKind::WholeManifold)
    return std::max(0.0, torus_dist(p.center, y) - p.radius);
  if (f.kind() == FoliationKind::Points) return torus_dist(p.center, y);
  if (f.same_leaf(p.center, y, leaf_tol)) {
    double in = f.intrinsic_leaf_dist(p.center, y);
    return std::max(0.0, in - p.radius);
  }
  return dist_to_plaque(p, y);
}

}  // namespace folia
